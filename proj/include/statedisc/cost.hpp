#pragma once

#include <span>

#include "statedisc/metrics.hpp"
#include "statedisc/rng.hpp"

namespace statedisc {

// Penalty weights for the training cost. `scale` multiplies the whole
// cost and defaults to 1; it never changes the argmin.
struct CostConfig {
  double alpha_err = 25.0;
  double alpha_inc = 2.0;
  double scale = 1.0;
};

// Training cost: per-family sample means of (1 - p_suc), p_err and p_inc,
// summed over families WITHOUT prior weights (the ensemble priors enter
// the reported aggregate metrics, not this cost):
//   J1 = scale * sum_i [ mean(1 - p_suc) + alpha_err * mean(p_err)
//                        + alpha_inc * mean(p_inc) ]
double cost_j1(const CircuitParams& params,
               std::span<const FamilySampleSet> ensemble,
               const CostConfig& cost, const OutcomeAssignment& assignment);

// Same cost with every outcome probability replaced by a fresh finite-shot
// estimate (`shots` per input; Psi23 inputs split their shots fairly
// between the two sign branches).
double cost_j1_sampled(const CircuitParams& params,
                       std::span<const FamilySampleSet> ensemble,
                       const CostConfig& cost,
                       const OutcomeAssignment& assignment, long long shots,
                       Rng& rng);

namespace detail {

// Fast paths over raw angles for the training loop.
double cost_from_metrics(std::span<const Metrics> per_family_means,
                         const CostConfig& cost);

double cost_j1_angles(std::span<const double> angles,
                      std::span<const FamilySampleSet> ensemble,
                      const CostConfig& cost,
                      const OutcomeAssignment& assignment);

double cost_j1_angles_sampled(std::span<const double> angles,
                              std::span<const FamilySampleSet> ensemble,
                              const CostConfig& cost,
                              const OutcomeAssignment& assignment,
                              long long shots, Rng& rng);

}  // namespace detail

}  // namespace statedisc
