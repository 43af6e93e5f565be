#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "statedisc/config.hpp"
#include "statedisc/report.hpp"

namespace {

using statedisc::ExperimentKind;
using statedisc::ExperimentSpec;
using statedisc::ReportFormat;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  std::optional<long long> shots;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("config", flags.config_path, "Experiment config file (JSON)")
      ->required();
  cmd.add_option("--seed", flags.seed, "Override the config's top-level seed");
  cmd.add_option("--out", flags.out, "Output file path");
  cmd.add_option("--format", flags.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd.add_option("--jobs", flags.jobs, "Worker threads for repetitions")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--shots", flags.shots,
                 "Override shots per cost evaluation (0 = exact)");
}

ExperimentSpec load_spec(const CommonFlags& flags) {
  ExperimentSpec spec = statedisc::load_experiment_spec(flags.config_path);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.shots) spec.shots = *flags.shots;
  return spec;
}

std::string default_out(const std::string& stem, const std::string& format) {
  return stem + "." + format;
}

void print_error(const std::string& type, const std::string& message,
                 const std::vector<std::string>& issues = {}) {
  nlohmann::json record{{"error", {{"type", type}, {"message", message}}}};
  if (!issues.empty()) record["error"]["issues"] = issues;
  std::cerr << record.dump() << "\n";
}

void print_cell_summary(const statedisc::CellReport& cell) {
  std::fprintf(stderr,
               "  cell %d '%s': %d/%zu runs ok, test P_suc=%.4f P_err=%.4f "
               "P_inc=%.4f, J1=%.4f\n",
               cell.spec.index, cell.spec.name.c_str(), cell.ok_runs,
               cell.runs.size(), cell.mean.test.p_suc, cell.mean.test.p_err,
               cell.mean.test.p_inc, cell.mean.j1_exact);
}

int run_train(const CommonFlags& flags) {
  ExperimentSpec spec = statedisc::resolve_defaults(load_spec(flags));
  if (auto issues = statedisc::validate_spec(spec); !issues.empty()) {
    throw statedisc::ValidationError(std::move(issues));
  }
  auto cells = statedisc::expand_cells(spec);
  const statedisc::CellSpec& cell = cells.front();
  std::fprintf(stderr, "training cell 0 '%s' (run 0 of experiment seed %llu)\n",
               cell.name.c_str(),
               static_cast<unsigned long long>(spec.seed));

  statedisc::TrainConfig config = statedisc::make_run_config(cell, 0);
  statedisc::TrainResult result = statedisc::train(config);

  const std::string out =
      flags.out.empty() ? default_out("train_result", flags.format) : flags.out;
  statedisc::export_train_result(result, spec, out,
                                 statedisc::parse_report_format(flags.format));
  std::fprintf(stderr,
               "final J1=%.6f, test P_suc=%.4f P_err=%.4f P_inc=%.4f\n",
               result.final_j1_exact, result.test_metrics.overall.p_suc,
               result.test_metrics.overall.p_err,
               result.test_metrics.overall.p_inc);
  std::fprintf(stderr, "wrote %s (%.1f s)\n", out.c_str(), result.wall_seconds);
  if (!result.error.empty()) {
    print_error("numeric", result.error);
    return 2;
  }
  return 0;
}

int run_experiment_cmd(const CommonFlags& flags, bool sweep_only) {
  ExperimentSpec spec = load_spec(flags);
  if (sweep_only && spec.kind != ExperimentKind::PenaltySweep) {
    throw statedisc::ValidationError(
        {"kind: the sweep command expects a penalty_sweep config"});
  }
  auto start = std::chrono::steady_clock::now();
  statedisc::ExperimentReport report =
      statedisc::run_experiment(spec, flags.jobs);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const std::string out =
      flags.out.empty() ? default_out("report", flags.format) : flags.out;
  statedisc::export_report(report, out,
                           statedisc::parse_report_format(flags.format));

  std::size_t total_runs = 0;
  for (const auto& cell : report.cells) total_runs += cell.runs.size();
  std::fprintf(stderr, "%s: %zu cells, %zu runs, %.1f s\n",
               report.spec.name.c_str(), report.cells.size(), total_runs,
               elapsed);
  for (const auto& cell : report.cells) print_cell_summary(cell);
  std::fprintf(stderr, "wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trains and evaluates a 4-qubit measurement circuit that "
               "discriminates families of non-orthogonal quantum states"};
  app.require_subcommand(1);

  CommonFlags train_flags, experiment_flags, sweep_flags;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Run one training (first cell, run 0) and export its "
               "per-iteration trajectory");
  add_common_flags(*train_cmd, train_flags);
  CLI::App* experiment_cmd = app.add_subcommand(
      "experiment", "Run every cell of an experiment config and export the "
                    "aggregated report");
  add_common_flags(*experiment_cmd, experiment_flags);
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run a penalty_sweep config across its (alpha_err, alpha_inc) "
               "grid and export the aggregated report");
  add_common_flags(*sweep_cmd, sweep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 1;
  }

  try {
    if (app.got_subcommand(train_cmd)) return run_train(train_flags);
    if (app.got_subcommand(experiment_cmd)) {
      return run_experiment_cmd(experiment_flags, /*sweep_only=*/false);
    }
    return run_experiment_cmd(sweep_flags, /*sweep_only=*/true);
  } catch (const statedisc::ValidationError& e) {
    print_error("validation", e.what(), e.issues());
    return 1;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 2;
  }
}
