#include "statedisc/train.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace statedisc {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Stream tags so init, minibatch selection and shot noise draw from
// independent generators derived from the one run seed.
enum : std::uint64_t { kInitStream = 1, kBatchStream = 2, kShotStream = 3 };

Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, 0x7261696e, stream));
}

struct ExactEvaluation {
  double j1 = 0.0;
  EnsembleMetrics metrics;
};

ExactEvaluation evaluate_exact(std::span<const double> angles,
                               std::span<const FamilySampleSet> ensemble,
                               const CostConfig& cost,
                               const OutcomeAssignment& assignment) {
  detail::TransferBlock block;
  detail::compute_transfer_block(angles, block);
  ExactEvaluation out;
  out.metrics = detail::ensemble_metrics_block(block, ensemble, assignment);
  out.j1 = detail::cost_from_metrics(out.metrics.per_family, cost);
  return out;
}

}  // namespace

std::vector<FamilySampleSet> select_minibatch(
    std::span<const FamilySampleSet> ensemble, int batch_size, Rng& rng) {
  if (batch_size < 1) throw std::invalid_argument("minibatch size must be >= 1");
  std::vector<FamilySampleSet> batch;
  batch.reserve(ensemble.size());
  for (const auto& set : ensemble) {
    if (std::size_t(batch_size) >= set.params.size()) {
      batch.push_back(set);
      continue;
    }
    FamilySampleSet sub;
    sub.spec = set.spec;
    sub.params.reserve(std::size_t(batch_size));
    for (int k = 0; k < batch_size; ++k) {
      auto idx = std::size_t(uniform_double(rng) * double(set.params.size()));
      if (idx >= set.params.size()) idx = set.params.size() - 1;
      sub.params.push_back(set.params[idx]);
    }
    batch.push_back(std::move(sub));
  }
  return batch;
}

std::vector<double> minibatch_gradient(const std::vector<double>& params,
                                       std::span<const FamilySampleSet> ensemble,
                                       const CostConfig& cost,
                                       const OutcomeAssignment& assignment,
                                       int batch_size, double gradient_step,
                                       long long shots, Rng& rng) {
  std::vector<FamilySampleSet> batch = select_minibatch(ensemble, batch_size, rng);
  auto f = [&](const std::vector<double>& theta) {
    if (shots > 0)
      return detail::cost_j1_angles_sampled(theta, batch, cost, assignment,
                                            shots, rng);
    return detail::cost_j1_angles(theta, batch, cost, assignment);
  };
  return forward_diff_gradient(f, params, gradient_step);
}

TrainResult train(const TrainConfig& config) {
  if (config.max_iterations < 0)
    throw std::invalid_argument("iteration count must be >= 0");
  if (config.minibatch_size < 1)
    throw std::invalid_argument("minibatch size must be >= 1");
  if (!(config.gradient_step > 0.0))
    throw std::invalid_argument("gradient step must be > 0");
  if (config.shots < 0)
    throw std::invalid_argument("shot count must be >= 0");
  if (config.train_ensemble.empty())
    throw std::invalid_argument("training ensemble is empty");
  if (config.cost.alpha_err < 0.0 || config.cost.alpha_inc < 0.0 ||
      !(config.cost.scale > 0.0))
    throw std::invalid_argument("invalid cost configuration");

  auto start = std::chrono::steady_clock::now();

  Rng init_rng = stream_rng(config.seed, kInitStream);
  Rng batch_rng = stream_rng(config.seed, kBatchStream);
  Rng shot_rng = stream_rng(config.seed, kShotStream);

  std::vector<double> theta(std::size_t(kParamCount), 0.0);
  for (auto& angle : theta) angle = uniform_in(init_rng, 0.0, kTwoPi);

  OptimizerState opt =
      make_optimizer_state(config.optimizer, config.hyperparams, theta.size());

  TrainResult result;
  result.seed = config.seed;
  result.trajectory.reserve(std::size_t(config.max_iterations));

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    std::vector<FamilySampleSet> batch =
        select_minibatch(config.train_ensemble, config.minibatch_size, batch_rng);
    auto f = [&](const std::vector<double>& angles) {
      if (config.shots > 0)
        return detail::cost_j1_angles_sampled(angles, batch, config.cost,
                                              config.assignment, config.shots,
                                              shot_rng);
      return detail::cost_j1_angles(angles, batch, config.cost,
                                    config.assignment);
    };

    double batch_j1 = 0.0;
    std::vector<double> grad;
    try {
      auto [value, g] = forward_diff_gradient_with_value(f, theta, config.gradient_step);
      batch_j1 = value;
      grad = std::move(g);
    } catch (const std::runtime_error& e) {
      result.error = e.what();
      break;
    }

    ExactEvaluation side = evaluate_exact(theta, config.train_ensemble,
                                          config.cost, config.assignment);
    result.trajectory.push_back(
        TrajectoryPoint{iter, batch_j1, side.j1, side.metrics.overall});

    auto [next, next_opt] = optimizer_step(std::move(opt), theta, grad);
    theta = std::move(next);
    opt = std::move(next_opt);
  }

  result.final_params = theta;
  ExactEvaluation final_train = evaluate_exact(theta, config.train_ensemble,
                                               config.cost, config.assignment);
  result.train_metrics = final_train.metrics;
  result.final_j1_exact = final_train.j1;
  result.final_j1_estimate =
      config.shots > 0
          ? detail::cost_j1_angles_sampled(theta, config.train_ensemble,
                                           config.cost, config.assignment,
                                           config.shots, shot_rng)
          : final_train.j1;
  if (!config.test_ensemble.empty())
    result.test_metrics = evaluate_exact(theta, config.test_ensemble,
                                         config.cost, config.assignment).metrics;

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace statedisc
