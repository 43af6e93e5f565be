#include "statedisc/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <utility>

#include "statedisc/stats.hpp"

namespace statedisc {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDataSeedTag = 0x6461746164726177ULL;

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string base_distribution_label(const BaseDistribution& dist) {
  if (const auto* f = std::get_if<FixedValue>(&dist)) {
    return "fixed(" + fmt("%g", f->value) + ")";
  }
  if (const auto* n = std::get_if<TruncatedNormalDist>(&dist)) {
    return "normal(" + fmt("%g", n->mean) + "," + fmt("%g", n->stddev) + ")";
  }
  const auto& u = std::get<UniformDist>(dist);
  return "uniform[" + fmt("%g", u.lo) + "," + fmt("%g", u.hi) + "]";
}

struct KindDefaults {
  double alpha_err;
  double alpha_inc;
  double gradient_step;
  int repetitions;
  int test_points;
};

KindDefaults defaults_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::CenteredA0:
      return {25.0, 2.0, 1e-6, 50, 1};
    case ExperimentKind::FullRange:
      return {20.0, 2.0, 1e-3, 50, 150};
    case ExperimentKind::Generalization:
      return {40.0, 4.0, 1e-3, 10, 150};
    case ExperimentKind::DistributionClassification:
      return {40.0, 4.0, 1e-3, 10, 150};
    case ExperimentKind::PenaltySweep:
      return {20.0, 2.0, 1e-3, 50, 150};
    case ExperimentKind::ShotConvergence:
      return {40.0, 5.0, 1e-2, 20, 150};
    case ExperimentKind::OptimizerComparison:
      return {20.0, 2.0, 1e-3, 10, 150};
  }
  throw std::invalid_argument("unknown experiment kind");
}

ParamSetSpec fixed_set(double value) {
  ParamSetSpec set;
  set.dist = FixedValue{value};
  return set;
}

ParamSetSpec dist_set(ParamDistribution dist) {
  ParamSetSpec set;
  set.dist = std::move(dist);
  return set;
}

ParamSetSpec spaced_set(double lo, double hi) {
  ParamSetSpec set;
  set.evenly_spaced = true;
  set.lo = lo;
  set.hi = hi;
  set.dist = UniformDist{lo, hi};
  return set;
}

// The shared non-penalty knobs of a cell; callers fill the data recipes.
CellSpec base_cell(const ExperimentSpec& spec) {
  CellSpec cell;
  cell.cost = {*spec.alpha_err, *spec.alpha_inc, spec.cost_scale};
  cell.optimizer = spec.optimizer;
  cell.hyperparams = spec.hyperparams;
  cell.assignment = spec.assignment;
  cell.iterations = spec.iterations;
  cell.minibatch_size = spec.minibatch_size;
  cell.gradient_step = *spec.gradient_step;
  cell.shots = spec.shots;
  cell.train_points = spec.train_points;
  cell.test_points = *spec.test_points;
  cell.prior1 = spec.prior1;
  cell.prior2 = spec.prior2;
  cell.train_b = fixed_set(spec.b_value);
  cell.test_b = fixed_set(spec.b_value);
  cell.repetitions = *spec.repetitions;
  cell.seed = spec.seed;
  return cell;
}

void check(std::vector<std::string>& issues, bool ok, const std::string& msg) {
  if (!ok) issues.push_back(msg);
}

struct Accumulator {
  std::vector<double> values;
  void add(double v) { values.push_back(v); }
  double mean() const { return values.empty() ? kNan : statedisc::mean(values); }
  double sd() const { return values.size() < 2 ? kNan : sample_sd(values); }
};

void aggregate_cell(CellReport& cell) {
  Accumulator acc[9];
  cell.ok_runs = 0;
  for (const RunSummary& run : cell.runs) {
    if (!run.error.empty()) continue;
    ++cell.ok_runs;
    acc[0].add(run.train_metrics.overall.p_suc);
    acc[1].add(run.train_metrics.overall.p_err);
    acc[2].add(run.train_metrics.overall.p_inc);
    acc[3].add(run.test_metrics.overall.p_suc);
    acc[4].add(run.test_metrics.overall.p_err);
    acc[5].add(run.test_metrics.overall.p_inc);
    acc[6].add(run.final_j1_exact);
    acc[7].add(run.final_j1_estimate);
    acc[8].add(run.mean_fidelity);
  }
  auto fill = [&](AggregateRow& row, auto&& pick) {
    row.train = {pick(acc[0]), pick(acc[1]), pick(acc[2])};
    row.test = {pick(acc[3]), pick(acc[4]), pick(acc[5])};
    row.j1_exact = pick(acc[6]);
    row.j1_estimate = pick(acc[7]);
    row.mean_fidelity = pick(acc[8]);
  };
  fill(cell.mean, [](const Accumulator& a) { return a.mean(); });
  fill(cell.sd, [](const Accumulator& a) { return a.sd(); });
}

}  // namespace

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::CenteredA0: return "centered_a0";
    case ExperimentKind::FullRange: return "full_range";
    case ExperimentKind::Generalization: return "generalization";
    case ExperimentKind::DistributionClassification:
      return "distribution_classification";
    case ExperimentKind::PenaltySweep: return "penalty_sweep";
    case ExperimentKind::ShotConvergence: return "shot_convergence";
    case ExperimentKind::OptimizerComparison: return "optimizer_comparison";
  }
  throw std::invalid_argument("unknown experiment kind");
}

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& issue : issues) msg += "; " + issue;
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentSpec resolve_defaults(ExperimentSpec spec) {
  const KindDefaults d = defaults_for(spec.kind);
  if (spec.name.empty()) spec.name = experiment_kind_name(spec.kind);
  if (!spec.repetitions) spec.repetitions = d.repetitions;
  if (!spec.alpha_err) spec.alpha_err = d.alpha_err;
  if (!spec.alpha_inc) spec.alpha_inc = d.alpha_inc;
  if (!spec.gradient_step) spec.gradient_step = d.gradient_step;
  if (!spec.test_points) spec.test_points = d.test_points;
  if (spec.kind == ExperimentKind::PenaltySweep && spec.penalty_grid.empty()) {
    for (double alpha_err = 10.0; alpha_err <= 40.0; alpha_err += 5.0) {
      spec.penalty_grid.push_back({alpha_err, 2.0});
    }
  }
  if (spec.kind == ExperimentKind::ShotConvergence) {
    if (spec.shots_grid.empty()) spec.shots_grid = {1000, 10000, 100000};
    if (spec.gradient_steps.empty()) spec.gradient_steps = {1e-2, 1e-3};
    if (spec.learning_rates.empty()) {
      spec.learning_rates = {spec.hyperparams.learning_rate};
    }
  }
  if (spec.kind == ExperimentKind::DistributionClassification &&
      spec.sources.empty()) {
    TruncatedNormalDist low{0.25, 0.05, 0.0, 1.0};
    TruncatedNormalDist high{spec.b_value, 0.05, 0.0, 1.0};
    spec.sources = {low, high, UniformDist{0.0, 1.0},
                    MixtureDist{{{0.5, low}, {0.5, high}}}};
  }
  if (spec.kind == ExperimentKind::OptimizerComparison && spec.optimizers.empty()) {
    spec.optimizers = {OptimizerKind::Adam, OptimizerKind::Sgd,
                       OptimizerKind::RmsProp};
  }
  return spec;
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> issues;
  check(issues, spec.repetitions && *spec.repetitions >= 1,
        "repetitions: must be >= 1");
  check(issues, spec.alpha_err && *spec.alpha_err >= 0.0,
        "alpha_err: must be >= 0");
  check(issues, spec.alpha_inc && *spec.alpha_inc >= 0.0,
        "alpha_inc: must be >= 0");
  check(issues, spec.cost_scale > 0.0, "cost_scale: must be > 0");
  check(issues, spec.gradient_step && *spec.gradient_step > 0.0,
        "gradient_step: must be > 0");
  check(issues, spec.iterations >= 0, "iterations: must be >= 0");
  check(issues, spec.minibatch_size >= 1, "minibatch_size: must be >= 1");
  check(issues, spec.shots >= 0, "shots: must be >= 0");
  check(issues, spec.train_points >= 1, "train_points: must be >= 1");
  check(issues, spec.test_points && *spec.test_points >= 1,
        "test_points: must be >= 1");
  check(issues, spec.prior1 > 0.0 && spec.prior2 > 0.0,
        "priors: must be > 0");
  check(issues, std::abs(spec.prior1 + spec.prior2 - 1.0) <= 1e-9,
        "priors: must sum to 1");
  check(issues, spec.b_value >= 0.0 && spec.b_value <= 1.0,
        "b_value: must lie in [0, 1]");
  check(issues, spec.hyperparams.learning_rate > 0.0,
        "hyperparams.learning_rate: must be > 0");
  check(issues,
        spec.hyperparams.beta1 >= 0.0 && spec.hyperparams.beta1 < 1.0,
        "hyperparams.beta1: must lie in [0, 1)");
  check(issues,
        spec.hyperparams.beta2 >= 0.0 && spec.hyperparams.beta2 < 1.0,
        "hyperparams.beta2: must lie in [0, 1)");
  check(issues, spec.hyperparams.epsilon_hat > 0.0,
        "hyperparams.epsilon_hat: must be > 0");
  check(issues,
        spec.hyperparams.rms_decay > 0.0 && spec.hyperparams.rms_decay < 1.0,
        "hyperparams.rms_decay: must lie in (0, 1)");
  for (const auto& issue : validate_assignment(spec.assignment, "assignment")) {
    issues.push_back(issue);
  }
  switch (spec.kind) {
    case ExperimentKind::CenteredA0:
      check(issues, spec.a0 >= 0.0 && spec.a0 <= 1.0,
            "a0: must lie in [0, 1]");
      check(issues, spec.a_sigma > 0.0, "a_sigma: must be > 0");
      break;
    case ExperimentKind::Generalization:
      check(issues,
            spec.train_lo >= 0.0 && spec.train_lo < spec.train_hi &&
                spec.train_hi <= 1.0,
            "train_lo/train_hi: need 0 <= lo < hi <= 1");
      break;
    case ExperimentKind::PenaltySweep: {
      check(issues, !spec.penalty_grid.empty(),
            "penalty_grid: must be nonempty");
      for (std::size_t i = 0; i < spec.penalty_grid.size(); ++i) {
        check(issues,
              spec.penalty_grid[i].alpha_err >= 0.0 &&
                  spec.penalty_grid[i].alpha_inc >= 0.0,
              "penalty_grid[" + std::to_string(i) + "]: penalties must be >= 0");
      }
      break;
    }
    case ExperimentKind::ShotConvergence: {
      check(issues, !spec.shots_grid.empty(), "shots_grid: must be nonempty");
      for (std::size_t i = 0; i < spec.shots_grid.size(); ++i) {
        check(issues, spec.shots_grid[i] >= 1,
              "shots_grid[" + std::to_string(i) + "]: must be >= 1");
      }
      for (std::size_t i = 0; i < spec.gradient_steps.size(); ++i) {
        check(issues, spec.gradient_steps[i] > 0.0,
              "gradient_steps[" + std::to_string(i) + "]: must be > 0");
      }
      check(issues, !spec.gradient_steps.empty(),
            "gradient_steps: must be nonempty");
      for (std::size_t i = 0; i < spec.learning_rates.size(); ++i) {
        check(issues, spec.learning_rates[i] > 0.0,
              "learning_rates[" + std::to_string(i) + "]: must be > 0");
      }
      check(issues, !spec.learning_rates.empty(),
            "learning_rates: must be nonempty");
      break;
    }
    case ExperimentKind::DistributionClassification: {
      check(issues, !spec.sources.empty(), "sources: must be nonempty");
      for (std::size_t i = 0; i < spec.sources.size(); ++i) {
        for (const auto& issue : validate_distribution(
                 spec.sources[i], "sources[" + std::to_string(i) + "]")) {
          issues.push_back(issue);
        }
      }
      break;
    }
    case ExperimentKind::OptimizerComparison:
      check(issues, !spec.optimizers.empty(), "optimizers: must be nonempty");
      break;
    case ExperimentKind::FullRange:
      break;
  }
  return issues;
}

std::vector<double> draw_params(const ParamSetSpec& set, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("draw_params: count must be >= 1");
  std::vector<double> params;
  params.reserve(std::size_t(count));
  if (set.evenly_spaced) {
    if (count == 1) {
      params.push_back(0.5 * (set.lo + set.hi));
    } else {
      for (int i = 0; i < count; ++i) {
        params.push_back(set.lo +
                         (set.hi - set.lo) * double(i) / double(count - 1));
      }
    }
    return params;
  }
  for (int i = 0; i < count; ++i) params.push_back(sample_param(set.dist, rng));
  return params;
}

std::string distribution_label(const ParamDistribution& dist) {
  if (const auto* mix = std::get_if<MixtureDist>(&dist)) {
    std::string label = "mix(";
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      if (i > 0) label += "+";
      label += fmt("%g", mix->components[i].weight) + "*" +
               base_distribution_label(mix->components[i].dist);
    }
    return label + ")";
  }
  if (const auto* f = std::get_if<FixedValue>(&dist)) {
    return base_distribution_label(BaseDistribution{*f});
  }
  if (const auto* n = std::get_if<TruncatedNormalDist>(&dist)) {
    return base_distribution_label(BaseDistribution{*n});
  }
  return base_distribution_label(BaseDistribution{std::get<UniformDist>(dist)});
}

std::string param_set_label(const ParamSetSpec& set) {
  if (set.evenly_spaced) {
    return "linspace[" + fmt("%g", set.lo) + "," + fmt("%g", set.hi) + "]";
  }
  return distribution_label(set.dist);
}

std::vector<CellSpec> expand_cells(const ExperimentSpec& spec) {
  std::vector<CellSpec> cells;
  auto push = [&](CellSpec cell, std::string name) {
    cell.index = int(cells.size());
    cell.name = std::move(name);
    cells.push_back(std::move(cell));
  };
  switch (spec.kind) {
    case ExperimentKind::CenteredA0: {
      CellSpec cell = base_cell(spec);
      cell.train_a =
          dist_set(TruncatedNormalDist{spec.a0, spec.a_sigma, 0.0, 1.0});
      cell.test_a = fixed_set(spec.a0);
      push(std::move(cell), "a0=" + fmt("%g", spec.a0));
      break;
    }
    case ExperimentKind::FullRange: {
      CellSpec cell = base_cell(spec);
      cell.train_a = spaced_set(0.0, 1.0);
      cell.test_a = dist_set(UniformDist{0.0, 1.0});
      push(std::move(cell), "full_range");
      break;
    }
    case ExperimentKind::Generalization: {
      CellSpec cell = base_cell(spec);
      cell.train_a = spaced_set(spec.train_lo, spec.train_hi);
      cell.test_a = dist_set(UniformDist{0.0, 1.0});
      push(std::move(cell), "train=" + param_set_label(cell.train_a));
      if (spec.include_full_range_baseline) {
        CellSpec baseline = base_cell(spec);
        baseline.train_a = spaced_set(0.0, 1.0);
        baseline.test_a = dist_set(UniformDist{0.0, 1.0});
        push(std::move(baseline), "train=" + param_set_label(baseline.train_a));
      }
      break;
    }
    case ExperimentKind::DistributionClassification: {
      for (const ParamDistribution& a_source : spec.sources) {
        for (const ParamDistribution& b_source : spec.sources) {
          CellSpec cell = base_cell(spec);
          cell.train_a = dist_set(a_source);
          cell.test_a = dist_set(a_source);
          cell.train_b = dist_set(b_source);
          cell.test_b = dist_set(b_source);
          push(std::move(cell), "a~" + distribution_label(a_source) + " b~" +
                                    distribution_label(b_source));
        }
      }
      break;
    }
    case ExperimentKind::PenaltySweep: {
      for (const PenaltyPoint& point : spec.penalty_grid) {
        CellSpec cell = base_cell(spec);
        cell.cost = {point.alpha_err, point.alpha_inc, spec.cost_scale};
        cell.train_a = spaced_set(0.0, 1.0);
        cell.test_a = dist_set(UniformDist{0.0, 1.0});
        push(std::move(cell), "alpha_err=" + fmt("%g", point.alpha_err) +
                                  " alpha_inc=" + fmt("%g", point.alpha_inc));
      }
      break;
    }
    case ExperimentKind::ShotConvergence: {
      auto shot_cell = [&](long long shots, double eps, double lr) {
        CellSpec cell = base_cell(spec);
        cell.shots = shots;
        cell.gradient_step = eps;
        cell.hyperparams.learning_rate = lr;
        cell.train_a = spaced_set(0.0, 1.0);
        cell.test_a = dist_set(UniformDist{0.0, 1.0});
        std::string name = shots == 0 ? "shots=exact" : "shots=" + std::to_string(shots);
        name += " eps=" + fmt("%g", eps) + " lr=" + fmt("%g", lr);
        push(std::move(cell), std::move(name));
      };
      if (spec.include_exact_baseline) {
        for (double eps : spec.gradient_steps) {
          for (double lr : spec.learning_rates) shot_cell(0, eps, lr);
        }
      }
      for (long long shots : spec.shots_grid) {
        for (double eps : spec.gradient_steps) {
          for (double lr : spec.learning_rates) shot_cell(shots, eps, lr);
        }
      }
      break;
    }
    case ExperimentKind::OptimizerComparison: {
      for (OptimizerKind kind : spec.optimizers) {
        CellSpec cell = base_cell(spec);
        cell.optimizer = kind;
        cell.train_a = spaced_set(0.0, 1.0);
        cell.test_a = dist_set(UniformDist{0.0, 1.0});
        push(std::move(cell), optimizer_name(kind));
      }
      break;
    }
  }
  return cells;
}

TrainConfig make_run_config(const CellSpec& cell, int run_index) {
  const std::uint64_t run_seed = derive_seed(
      cell.seed, std::uint64_t(cell.index), std::uint64_t(run_index));
  Rng train_a_rng(derive_seed(run_seed, kDataSeedTag, 1));
  Rng train_b_rng(derive_seed(run_seed, kDataSeedTag, 2));
  Rng test_a_rng(derive_seed(run_seed, kDataSeedTag, 3));
  Rng test_b_rng(derive_seed(run_seed, kDataSeedTag, 4));

  auto family_set = [](FamilyId family, double prior, const ParamSetSpec& set,
                       int count, Rng& rng) {
    FamilySampleSet out;
    out.spec = {family, prior, set.dist};
    out.params = draw_params(set, count, rng);
    return out;
  };
  TrainConfig config;
  config.cost = cell.cost;
  config.assignment = cell.assignment;
  config.optimizer = cell.optimizer;
  config.hyperparams = cell.hyperparams;
  config.train_ensemble = {
      family_set(FamilyId::Psi1, cell.prior1, cell.train_a, cell.train_points,
                 train_a_rng),
      family_set(FamilyId::Psi23, cell.prior2, cell.train_b, cell.train_points,
                 train_b_rng)};
  config.test_ensemble = {
      family_set(FamilyId::Psi1, cell.prior1, cell.test_a, cell.test_points,
                 test_a_rng),
      family_set(FamilyId::Psi23, cell.prior2, cell.test_b, cell.test_points,
                 test_b_rng)};
  config.minibatch_size = cell.minibatch_size;
  config.gradient_step = cell.gradient_step;
  config.max_iterations = cell.iterations;
  config.shots = cell.shots;
  config.seed = run_seed;
  return config;
}

RunSummary execute_run(const CellSpec& cell, int run_index) {
  RunSummary summary;
  summary.run = run_index;
  summary.seed = derive_seed(cell.seed, std::uint64_t(cell.index),
                             std::uint64_t(run_index));
  try {
    TrainConfig config = make_run_config(cell, run_index);

    // |<psi1(a)|psi23(b)>| = a * b, so the mean over all cross pairs of the
    // test draws factorizes into the product of the two means.
    summary.mean_fidelity = mean(config.test_ensemble[0].params) *
                            mean(config.test_ensemble[1].params);

    TrainResult result = train(config);
    summary.train_metrics = std::move(result.train_metrics);
    summary.test_metrics = std::move(result.test_metrics);
    summary.final_j1_exact = result.final_j1_exact;
    summary.final_j1_estimate = result.final_j1_estimate;
    summary.final_params = std::move(result.final_params);
    summary.error = std::move(result.error);
    summary.wall_seconds = result.wall_seconds;
  } catch (const std::exception& e) {
    summary.error = e.what();
  }
  return summary;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, int jobs) {
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  ExperimentReport report;
  report.spec = resolve_defaults(spec);
  if (auto issues = validate_spec(report.spec); !issues.empty()) {
    throw ValidationError(std::move(issues));
  }
  std::vector<CellSpec> cells = expand_cells(report.spec);

  report.cells.resize(cells.size());
  struct Task {
    std::size_t cell;
    int run;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    report.cells[c].spec = cells[c];
    report.cells[c].runs.resize(std::size_t(cells[c].repetitions));
    for (int r = 0; r < cells[c].repetitions; ++r) tasks.push_back({c, r});
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      report.cells[task.cell].runs[std::size_t(task.run)] =
          execute_run(cells[task.cell], task.run);
    }
  };
  int n_threads = int(std::min<std::size_t>(std::size_t(jobs), tasks.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();

  for (CellReport& cell : report.cells) aggregate_cell(cell);
  return report;
}

std::vector<PenaltyRow> sweep_penalties(const std::vector<PenaltyPoint>& grid,
                                        const ExperimentSpec& base,
                                        int repetitions, int jobs) {
  if (grid.empty()) throw std::invalid_argument("penalty grid must be nonempty");
  ExperimentSpec spec = base;
  spec.kind = ExperimentKind::PenaltySweep;
  spec.penalty_grid = grid;
  spec.repetitions = repetitions;
  ExperimentReport report = run_experiment(spec, jobs);

  std::vector<PenaltyRow> table;
  table.reserve(grid.size());
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const CellReport& cell = report.cells[i];
    PenaltyRow row;
    row.alpha_err = grid[i].alpha_err;
    row.alpha_inc = grid[i].alpha_inc;
    row.mean = cell.mean.test;
    row.sd = cell.sd.test;
    row.ok_runs = cell.ok_runs;
    row.error = cell.error;
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace statedisc
