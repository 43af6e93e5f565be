#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "statedisc/cost.hpp"
#include "statedisc/families.hpp"
#include "statedisc/metrics.hpp"
#include "statedisc/optimizer.hpp"
#include "statedisc/rng.hpp"
#include "statedisc/train.hpp"

namespace statedisc {

enum class ExperimentKind {
  CenteredA0,
  FullRange,
  Generalization,
  DistributionClassification,
  PenaltySweep,
  ShotConvergence,
  OptimizerComparison,
};

std::string experiment_kind_name(ExperimentKind kind);

struct PenaltyPoint {
  double alpha_err = 0.0;
  double alpha_inc = 0.0;
};

// Declarative description of one experiment.  Optional scalars and empty
// vectors fall back to per-kind defaults in resolve_defaults(); see the
// config schema in the README for the full table.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::FullRange;
  std::string name;  // empty -> experiment_kind_name(kind)
  std::uint64_t seed = 1;
  std::optional<int> repetitions;

  std::optional<double> alpha_err;
  std::optional<double> alpha_inc;
  double cost_scale = 1.0;

  OptimizerKind optimizer = OptimizerKind::Adam;
  OptimizerHyperparams hyperparams{};
  OutcomeAssignment assignment{};
  std::optional<double> gradient_step;
  int iterations = 5000;
  int minibatch_size = 50;
  long long shots = 0;  // 0 = exact probabilities

  int train_points = 100;
  std::optional<int> test_points;
  double prior1 = 1.0 / 3.0;
  double prior2 = 2.0 / 3.0;
  double b_value = 0.70710678118654752440;

  // CenteredA0
  double a0 = 0.25;
  double a_sigma = 0.01;

  // Generalization
  double train_lo = 0.9;
  double train_hi = 1.0;
  bool include_full_range_baseline = true;

  // PenaltySweep
  std::vector<PenaltyPoint> penalty_grid;

  // ShotConvergence
  std::vector<long long> shots_grid;
  std::vector<double> gradient_steps;
  std::vector<double> learning_rates;
  bool include_exact_baseline = true;

  // DistributionClassification: one cell per (a-source, b-source) pair
  std::vector<ParamDistribution> sources;

  // OptimizerComparison
  std::vector<OptimizerKind> optimizers;
};

// Fills every optional field with its per-kind default.
ExperimentSpec resolve_defaults(ExperimentSpec spec);

// Field-path-prefixed problems with a resolved spec; empty when valid.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Recipe for one family's parameter values in a single run: either a fixed
// evenly spaced ladder over [lo, hi] or i.i.d. draws from a distribution.
struct ParamSetSpec {
  bool evenly_spaced = false;
  double lo = 0.0;
  double hi = 1.0;
  ParamDistribution dist = FixedValue{};
};

std::vector<double> draw_params(const ParamSetSpec& set, int count, Rng& rng);
std::string param_set_label(const ParamSetSpec& set);
std::string distribution_label(const ParamDistribution& dist);

// One fully resolved training configuration inside an experiment.  Most
// experiments expand to a single cell; sweeps and grids produce several.
struct CellSpec {
  int index = 0;
  std::string name;
  CostConfig cost{};
  OptimizerKind optimizer = OptimizerKind::Adam;
  OptimizerHyperparams hyperparams{};
  OutcomeAssignment assignment{};
  int iterations = 5000;
  int minibatch_size = 50;
  double gradient_step = 1e-3;
  long long shots = 0;
  int train_points = 100;
  int test_points = 150;
  double prior1 = 1.0 / 3.0;
  double prior2 = 2.0 / 3.0;
  ParamSetSpec train_a, train_b, test_a, test_b;
  int repetitions = 1;
  std::uint64_t seed = 1;  // experiment seed; runs derive from (seed, index, run)
};

std::vector<CellSpec> expand_cells(const ExperimentSpec& spec);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  EnsembleMetrics train_metrics{};
  EnsembleMetrics test_metrics{};
  double final_j1_exact = 0.0;
  double final_j1_estimate = 0.0;
  // Mean overlap between the two families over this run's test draws.
  double mean_fidelity = 0.0;
  std::vector<double> final_params;
  std::string error;
  double wall_seconds = 0.0;  // kept in memory only, never serialized
};

struct AggregateRow {
  Metrics train{};
  Metrics test{};
  double j1_exact = 0.0;
  double j1_estimate = 0.0;
  double mean_fidelity = 0.0;
};

struct CellReport {
  CellSpec spec;
  std::vector<RunSummary> runs;
  int ok_runs = 0;
  AggregateRow mean{};  // over runs with no error; NaN when none succeeded
  AggregateRow sd{};    // sample standard deviation; NaN below two runs
  std::string error;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<CellReport> cells;
};

// The fully assembled training configuration for one run of a cell,
// including that run's fresh data draws. Deterministic in (cell, run_index).
TrainConfig make_run_config(const CellSpec& cell, int run_index);

RunSummary execute_run(const CellSpec& cell, int run_index);

// Runs every cell of the (unresolved) spec, repetitions in parallel across
// `jobs` worker threads.  Per-run failures land in RunSummary::error and are
// excluded from the aggregates; the rest of the report is still produced.
ExperimentReport run_experiment(const ExperimentSpec& spec, int jobs = 1);

struct PenaltyRow {
  double alpha_err = 0.0;
  double alpha_inc = 0.0;
  Metrics mean{};  // test-set aggregates
  Metrics sd{};
  int ok_runs = 0;
  std::string error;
};

// One PenaltySweep experiment over `grid`, reduced to test-set rows in grid
// order.  `base` supplies every non-penalty knob.
std::vector<PenaltyRow> sweep_penalties(const std::vector<PenaltyPoint>& grid,
                                        const ExperimentSpec& base,
                                        int repetitions, int jobs = 1);

}  // namespace statedisc
