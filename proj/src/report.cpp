#include "statedisc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "statedisc/config.hpp"

namespace statedisc {
namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

// One CSV row assembled field by field; keeps column order in one place.
class CsvRow {
 public:
  void add(std::string value) {
    if (!fields_.empty()) fields_ += ',';
    fields_ += csv_field(value);
  }
  void add(double value) { add(format_number(value)); }
  void add(long long value) { add(std::to_string(value)); }
  void add(int value) { add(std::to_string(value)); }
  void add(std::uint64_t value) { add(std::to_string(value)); }
  const std::string& str() const { return fields_; }

 private:
  std::string fields_;
};

json rounded(double v) {
  if (std::isnan(v)) return nullptr;
  return round_sig(v);
}

// Applies round_sig to every number in a JSON tree (the config echo is
// built from raw doubles).
json round_numbers(json j) {
  if (j.is_number_float()) return round_sig(j.get<double>());
  if (j.is_object()) {
    for (auto& item : j.items()) item.value() = round_numbers(item.value());
  } else if (j.is_array()) {
    for (auto& item : j) item = round_numbers(item);
  }
  return j;
}

json metrics_to_json(const Metrics& m) {
  return {{"p_suc", rounded(m.p_suc)},
          {"p_err", rounded(m.p_err)},
          {"p_inc", rounded(m.p_inc)}};
}

Metrics metrics_from_json(const json& j) {
  auto get = [&](const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kNan;
    return j.at(key).get<double>();
  };
  return {get("p_suc"), get("p_err"), get("p_inc")};
}

json ensemble_to_json(const EnsembleMetrics& m) {
  json j = metrics_to_json(m.overall);
  json per_family = json::array();
  for (const Metrics& fm : m.per_family) per_family.push_back(metrics_to_json(fm));
  j["per_family"] = std::move(per_family);
  return j;
}

EnsembleMetrics ensemble_from_json(const json& j) {
  EnsembleMetrics m;
  m.overall = metrics_from_json(j);
  if (j.contains("per_family")) {
    for (const json& fm : j.at("per_family")) {
      m.per_family.push_back(metrics_from_json(fm));
    }
  }
  return m;
}

json aggregate_to_json(const AggregateRow& row) {
  return {{"train", metrics_to_json(row.train)},
          {"test", metrics_to_json(row.test)},
          {"j1_exact", rounded(row.j1_exact)},
          {"j1_estimate", rounded(row.j1_estimate)},
          {"mean_fidelity", rounded(row.mean_fidelity)}};
}

AggregateRow aggregate_from_json(const json& j) {
  auto get = [&](const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return kNan;
    return j.at(key).get<double>();
  };
  AggregateRow row;
  row.train = metrics_from_json(j.at("train"));
  row.test = metrics_from_json(j.at("test"));
  row.j1_exact = get("j1_exact");
  row.j1_estimate = get("j1_estimate");
  row.mean_fidelity = get("mean_fidelity");
  return row;
}

json param_set_to_json(const ParamSetSpec& set) {
  if (set.evenly_spaced) {
    return {{"type", "linspace"}, {"lo", set.lo}, {"hi", set.hi}};
  }
  return distribution_to_json(set.dist);
}

ParamSetSpec param_set_from_json(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("type") && j.at("type").is_string() &&
      j.at("type").get<std::string>() == "linspace") {
    ParamSetSpec set;
    set.evenly_spaced = true;
    set.lo = j.at("lo").get<double>();
    set.hi = j.at("hi").get<double>();
    set.dist = UniformDist{set.lo, set.hi};
    return set;
  }
  ParamSetSpec set;
  set.dist = distribution_from_json(j, path);
  return set;
}

json run_to_json(const RunSummary& run) {
  json j;
  j["run"] = run.run;
  j["seed"] = run.seed;
  if (!run.error.empty()) {
    j["error"] = run.error;
    return j;
  }
  j["train"] = ensemble_to_json(run.train_metrics);
  j["test"] = ensemble_to_json(run.test_metrics);
  j["j1_exact"] = rounded(run.final_j1_exact);
  j["j1_estimate"] = rounded(run.final_j1_estimate);
  j["mean_fidelity"] = rounded(run.mean_fidelity);
  json params = json::array();
  for (double p : run.final_params) params.push_back(rounded(p));
  j["final_params"] = std::move(params);
  return j;
}

RunSummary run_from_json(const json& j) {
  RunSummary run;
  run.run = j.at("run").get<int>();
  run.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("error")) {
    run.error = j.at("error").get<std::string>();
    return run;
  }
  run.train_metrics = ensemble_from_json(j.at("train"));
  run.test_metrics = ensemble_from_json(j.at("test"));
  run.final_j1_exact = j.at("j1_exact").is_null() ? kNan : j.at("j1_exact").get<double>();
  run.final_j1_estimate =
      j.at("j1_estimate").is_null() ? kNan : j.at("j1_estimate").get<double>();
  run.mean_fidelity =
      j.at("mean_fidelity").is_null() ? kNan : j.at("mean_fidelity").get<double>();
  for (const json& p : j.at("final_params")) {
    run.final_params.push_back(p.get<double>());
  }
  return run;
}

json cell_to_json(const CellReport& cell) {
  json j;
  j["index"] = cell.spec.index;
  j["name"] = cell.spec.name;
  j["alpha_err"] = rounded(cell.spec.cost.alpha_err);
  j["alpha_inc"] = rounded(cell.spec.cost.alpha_inc);
  j["cost_scale"] = rounded(cell.spec.cost.scale);
  j["optimizer"] = optimizer_name(cell.spec.optimizer);
  j["learning_rate"] = rounded(cell.spec.hyperparams.learning_rate);
  j["iterations"] = cell.spec.iterations;
  j["minibatch_size"] = cell.spec.minibatch_size;
  j["gradient_step"] = rounded(cell.spec.gradient_step);
  j["shots"] = cell.spec.shots;
  j["train_points"] = cell.spec.train_points;
  j["test_points"] = cell.spec.test_points;
  j["priors"] = {rounded(cell.spec.prior1), rounded(cell.spec.prior2)};
  j["train_a"] = round_numbers(param_set_to_json(cell.spec.train_a));
  j["train_b"] = round_numbers(param_set_to_json(cell.spec.train_b));
  j["test_a"] = round_numbers(param_set_to_json(cell.spec.test_a));
  j["test_b"] = round_numbers(param_set_to_json(cell.spec.test_b));
  j["repetitions"] = cell.spec.repetitions;
  j["ok_runs"] = cell.ok_runs;
  if (!cell.error.empty()) j["error"] = cell.error;
  json runs = json::array();
  for (const RunSummary& run : cell.runs) runs.push_back(run_to_json(run));
  j["runs"] = std::move(runs);
  j["mean"] = aggregate_to_json(cell.mean);
  j["sd"] = aggregate_to_json(cell.sd);
  return j;
}

CellReport cell_from_json(const json& j, std::uint64_t experiment_seed) {
  CellReport cell;
  cell.spec.index = j.at("index").get<int>();
  cell.spec.name = j.at("name").get<std::string>();
  cell.spec.cost.alpha_err = j.at("alpha_err").get<double>();
  cell.spec.cost.alpha_inc = j.at("alpha_inc").get<double>();
  cell.spec.cost.scale = j.at("cost_scale").get<double>();
  if (auto kind = optimizer_from_name(j.at("optimizer").get<std::string>())) {
    cell.spec.optimizer = *kind;
  } else {
    throw ValidationError({"cells[" + std::to_string(cell.spec.index) +
                           "].optimizer: unknown optimizer"});
  }
  cell.spec.hyperparams.learning_rate = j.at("learning_rate").get<double>();
  cell.spec.iterations = j.at("iterations").get<int>();
  cell.spec.minibatch_size = j.at("minibatch_size").get<int>();
  cell.spec.gradient_step = j.at("gradient_step").get<double>();
  cell.spec.shots = j.at("shots").get<long long>();
  cell.spec.train_points = j.at("train_points").get<int>();
  cell.spec.test_points = j.at("test_points").get<int>();
  cell.spec.prior1 = j.at("priors").at(0).get<double>();
  cell.spec.prior2 = j.at("priors").at(1).get<double>();
  const std::string base = "cells[" + std::to_string(cell.spec.index) + "]";
  cell.spec.train_a = param_set_from_json(j.at("train_a"), base + ".train_a");
  cell.spec.train_b = param_set_from_json(j.at("train_b"), base + ".train_b");
  cell.spec.test_a = param_set_from_json(j.at("test_a"), base + ".test_a");
  cell.spec.test_b = param_set_from_json(j.at("test_b"), base + ".test_b");
  cell.spec.repetitions = j.at("repetitions").get<int>();
  cell.spec.seed = experiment_seed;
  cell.ok_runs = j.at("ok_runs").get<int>();
  if (j.contains("error")) cell.error = j.at("error").get<std::string>();
  for (const json& run : j.at("runs")) cell.runs.push_back(run_from_json(run));
  cell.mean = aggregate_from_json(j.at("mean"));
  cell.sd = aggregate_from_json(j.at("sd"));
  return cell;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("cannot write output file: " + path);
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown report format '" + name +
                              "' (expected csv or json)");
}

const char* const kReportCsvHeader =
    "experiment,kind,cell,cell_index,row_kind,run,seed,alpha_err,alpha_inc,"
    "shots,gradient_step,learning_rate,optimizer,iterations,mean_fidelity,"
    "train_p_suc,train_p_err,train_p_inc,test_p_suc,test_p_err,test_p_inc,"
    "j1_exact,j1_estimate,error";

const char* const kTrajectoryCsvHeader =
    "iteration,j1_estimate,j1_exact,train_p_suc,train_p_err,train_p_inc";

double round_sig(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = kReportCsvHeader;
  out += '\n';
  const std::string kind = experiment_kind_name(report.spec.kind);
  for (const CellReport& cell : report.cells) {
    auto cell_prefix = [&](CsvRow& row, const std::string& row_kind) {
      row.add(report.spec.name);
      row.add(kind);
      row.add(cell.spec.name);
      row.add(cell.spec.index);
      row.add(row_kind);
    };
    auto cell_config = [&](CsvRow& row) {
      row.add(cell.spec.cost.alpha_err);
      row.add(cell.spec.cost.alpha_inc);
      row.add(cell.spec.shots);
      row.add(cell.spec.gradient_step);
      row.add(cell.spec.hyperparams.learning_rate);
      row.add(optimizer_name(cell.spec.optimizer));
      row.add(cell.spec.iterations);
    };
    for (const RunSummary& run : cell.runs) {
      CsvRow row;
      cell_prefix(row, "run");
      row.add(run.run);
      row.add(run.seed);
      cell_config(row);
      if (run.error.empty()) {
        row.add(run.mean_fidelity);
        row.add(run.train_metrics.overall.p_suc);
        row.add(run.train_metrics.overall.p_err);
        row.add(run.train_metrics.overall.p_inc);
        row.add(run.test_metrics.overall.p_suc);
        row.add(run.test_metrics.overall.p_err);
        row.add(run.test_metrics.overall.p_inc);
        row.add(run.final_j1_exact);
        row.add(run.final_j1_estimate);
        row.add(std::string());
      } else {
        for (int i = 0; i < 9; ++i) row.add(std::string());
        row.add(run.error);
      }
      out += row.str();
      out += '\n';
    }
    for (const auto& [row_kind, aggregate] :
         {std::pair<const char*, const AggregateRow&>{"mean", cell.mean},
          {"sd", cell.sd}}) {
      CsvRow row;
      cell_prefix(row, row_kind);
      row.add(std::string());  // run
      row.add(std::string());  // seed
      cell_config(row);
      row.add(aggregate.mean_fidelity);
      row.add(aggregate.train.p_suc);
      row.add(aggregate.train.p_err);
      row.add(aggregate.train.p_inc);
      row.add(aggregate.test.p_suc);
      row.add(aggregate.test.p_err);
      row.add(aggregate.test.p_inc);
      row.add(aggregate.j1_exact);
      row.add(aggregate.j1_estimate);
      row.add(cell.error);
      out += row.str();
      out += '\n';
    }
  }
  return out;
}

std::string report_to_json_text(const ExperimentReport& report) {
  json j;
  j["config"] = round_numbers(experiment_spec_to_json(report.spec));
  json cells = json::array();
  for (const CellReport& cell : report.cells) cells.push_back(cell_to_json(cell));
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("json: ") + e.what()});
  }
  ExperimentReport report;
  report.spec = parse_experiment_spec(j.at("config").dump());
  for (const json& cell : j.at("cells")) {
    report.cells.push_back(cell_from_json(cell, report.spec.seed));
  }
  return report;
}

void export_report(const ExperimentReport& report, const std::string& path,
                   ReportFormat format) {
  write_file(path, format == ReportFormat::Csv ? report_to_csv(report)
                                               : report_to_json_text(report));
}

std::string train_result_to_csv(const TrainResult& result) {
  std::string out = kTrajectoryCsvHeader;
  out += '\n';
  for (const TrajectoryPoint& point : result.trajectory) {
    CsvRow row;
    row.add(point.iteration);
    row.add(point.j1_estimate);
    row.add(point.j1_exact);
    row.add(point.train.p_suc);
    row.add(point.train.p_err);
    row.add(point.train.p_inc);
    out += row.str();
    out += '\n';
  }
  return out;
}

std::string train_result_to_json_text(const TrainResult& result,
                                      const ExperimentSpec& spec) {
  json j;
  j["config"] = round_numbers(experiment_spec_to_json(spec));
  j["seed"] = result.seed;
  if (!result.error.empty()) j["error"] = result.error;
  json params = json::array();
  for (double p : result.final_params) params.push_back(rounded(p));
  j["final_params"] = std::move(params);
  j["final_j1_exact"] = rounded(result.final_j1_exact);
  j["final_j1_estimate"] = rounded(result.final_j1_estimate);
  j["train"] = ensemble_to_json(result.train_metrics);
  j["test"] = ensemble_to_json(result.test_metrics);
  json trajectory = json::array();
  for (const TrajectoryPoint& point : result.trajectory) {
    trajectory.push_back({{"iteration", point.iteration},
                          {"j1_estimate", rounded(point.j1_estimate)},
                          {"j1_exact", rounded(point.j1_exact)},
                          {"train", metrics_to_json(point.train)}});
  }
  j["trajectory"] = std::move(trajectory);
  return j.dump(2) + "\n";
}

void export_train_result(const TrainResult& result, const ExperimentSpec& spec,
                         const std::string& path, ReportFormat format) {
  write_file(path, format == ReportFormat::Csv
                       ? train_result_to_csv(result)
                       : train_result_to_json_text(result, spec));
}

}  // namespace statedisc
