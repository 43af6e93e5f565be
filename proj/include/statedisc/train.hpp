#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "statedisc/cost.hpp"
#include "statedisc/optimizer.hpp"

namespace statedisc {

struct TrainConfig {
  CostConfig cost;
  OutcomeAssignment assignment;
  OptimizerKind optimizer = OptimizerKind::Adam;
  OptimizerHyperparams hyperparams;
  std::vector<FamilySampleSet> train_ensemble;
  std::vector<FamilySampleSet> test_ensemble;
  int minibatch_size = 50;
  double gradient_step = 1e-6;
  int max_iterations = 5000;
  long long shots = 0;  // 0 = exact probabilities, > 0 = finite-shot estimates
  std::uint64_t seed = 0;
};

struct TrajectoryPoint {
  int iteration = 0;        // 1-based; values are at the pre-update point
  double j1_estimate = 0.0; // minibatch cost the optimizer saw (shot-noisy in sampled mode)
  double j1_exact = 0.0;    // exact cost on the full training set
  Metrics train;            // exact prior-weighted train metrics
};

struct TrainResult {
  std::vector<double> final_params;
  std::vector<TrajectoryPoint> trajectory;
  EnsembleMetrics train_metrics;
  EnsembleMetrics test_metrics;
  double final_j1_exact = 0.0;
  double final_j1_estimate = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // nonempty if training aborted on a numeric error
};

// Forward differences: component j = (f(x + eps e_j) - f(x)) / eps.
// Exactly params.size() + 1 evaluations of f. Returns (f(x), gradient).
// A non-finite value raises a numeric error naming the component.
template <class F>
std::pair<double, std::vector<double>> forward_diff_gradient_with_value(
    F&& f, std::vector<double> params, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("gradient step must be > 0");
  double base = f(params);
  if (!std::isfinite(base))
    throw std::runtime_error("cost is not finite at the base point");
  std::vector<double> grad(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) {
    double saved = params[j];
    params[j] = saved + eps;
    double shifted = f(params);
    params[j] = saved;
    if (!std::isfinite(shifted))
      throw std::runtime_error("cost is not finite at component " +
                               std::to_string(j));
    grad[j] = (shifted - base) / eps;
  }
  return {base, std::move(grad)};
}

template <class F>
std::vector<double> forward_diff_gradient(F&& f, std::vector<double> params,
                                          double eps) {
  return forward_diff_gradient_with_value(static_cast<F&&>(f),
                                          std::move(params), eps).second;
}

// Uniform with-replacement minibatch of each family's sample set. When
// batch_size >= |S_i| the full set is used unchanged, so the degenerate
// minibatch gradient equals the full-set gradient.
std::vector<FamilySampleSet> select_minibatch(
    std::span<const FamilySampleSet> ensemble, int batch_size, Rng& rng);

// Forward-difference gradient of the minibatch cost; in sampled mode
// (shots > 0) every cost evaluation uses fresh finite-shot estimates.
std::vector<double> minibatch_gradient(const std::vector<double>& params,
                                       std::span<const FamilySampleSet> ensemble,
                                       const CostConfig& cost,
                                       const OutcomeAssignment& assignment,
                                       int batch_size, double gradient_step,
                                       long long shots, Rng& rng);

// Runs max_iterations optimizer steps from i.i.d. uniform [0, 2pi) angles.
// Deterministic given config.seed. On a numeric error the result carries
// the trajectory so far and a nonempty error string.
TrainResult train(const TrainConfig& config);

}  // namespace statedisc
