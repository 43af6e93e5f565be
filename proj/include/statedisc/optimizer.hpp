#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace statedisc {

enum class OptimizerKind { Adam, Sgd, RmsProp };

std::string optimizer_name(OptimizerKind kind);

struct OptimizerHyperparams {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_hat = 1e-8;  // division guard
  double rms_decay = 0.9;
};

// Value-semantic optimizer state; optimizer_step returns the updated copy.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Adam;
  OptimizerHyperparams hyperparams;
  long long t = 0;
  std::vector<double> m;  // first moment (Adam)
  std::vector<double> v;  // second moment (Adam, RMSProp)
};

OptimizerState make_optimizer_state(OptimizerKind kind,
                                    const OptimizerHyperparams& hyperparams,
                                    std::size_t param_count);

// One update:
//   SGD:     theta -= lr * g
//   Adam:    t += 1; a_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t);
//            m = beta1 m + (1-beta1) g; v = beta2 v + (1-beta2) g^2;
//            theta -= a_t * m / (sqrt(v) + eps_hat)
//   RMSProp: v = rho v + (1-rho) g^2; theta -= lr * g / (sqrt(v) + eps_hat)
std::pair<std::vector<double>, OptimizerState> optimizer_step(
    OptimizerState state, std::span<const double> params,
    std::span<const double> grad);

}  // namespace statedisc
