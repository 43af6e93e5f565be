#include "statedisc/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace statedisc {

std::string optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::RmsProp: return "rmsprop";
  }
  throw std::invalid_argument("unknown optimizer kind");
}

OptimizerState make_optimizer_state(OptimizerKind kind,
                                    const OptimizerHyperparams& hyperparams,
                                    std::size_t param_count) {
  OptimizerState state;
  state.kind = kind;
  state.hyperparams = hyperparams;
  state.m.assign(param_count, 0.0);
  state.v.assign(param_count, 0.0);
  return state;
}

std::pair<std::vector<double>, OptimizerState> optimizer_step(
    OptimizerState state, std::span<const double> params,
    std::span<const double> grad) {
  std::size_t n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n)
    throw std::invalid_argument("parameter/gradient/state length mismatch");

  const OptimizerHyperparams& hp = state.hyperparams;
  std::vector<double> next(params.begin(), params.end());
  switch (state.kind) {
    case OptimizerKind::Sgd: {
      for (std::size_t i = 0; i < n; ++i) next[i] -= hp.learning_rate * grad[i];
      break;
    }
    case OptimizerKind::Adam: {
      state.t += 1;
      double t = double(state.t);
      double alpha_t = hp.learning_rate *
                       std::sqrt(1.0 - std::pow(hp.beta2, t)) /
                       (1.0 - std::pow(hp.beta1, t));
      for (std::size_t i = 0; i < n; ++i) {
        state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * grad[i];
        state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
        next[i] -= alpha_t * state.m[i] / (std::sqrt(state.v[i]) + hp.epsilon_hat);
      }
      break;
    }
    case OptimizerKind::RmsProp: {
      for (std::size_t i = 0; i < n; ++i) {
        state.v[i] = hp.rms_decay * state.v[i] +
                     (1.0 - hp.rms_decay) * grad[i] * grad[i];
        next[i] -= hp.learning_rate * grad[i] / (std::sqrt(state.v[i]) + hp.epsilon_hat);
      }
      break;
    }
  }
  return {std::move(next), std::move(state)};
}

}  // namespace statedisc
