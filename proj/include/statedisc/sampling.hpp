#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "statedisc/metrics.hpp"
#include "statedisc/rng.hpp"

namespace statedisc {

struct ShotPlan {
  long long shots = 1;
  std::uint64_t seed = 0;
};

// Exact multinomial draw of `shots` outcomes (binomial chain over the
// categories). Counts sum to shots.
std::vector<long long> sample_outcome_counts(const OutcomeDistribution& dist,
                                             long long shots, Rng& rng);
std::vector<long long> sample_outcome_counts(const OutcomeDistribution& dist,
                                             const ShotPlan& plan);

// Shots needed to resolve probabilities to tolerance eps: ceil(1 / eps^4),
// with the quotient snapped to the nearest integer when within 1e-9
// relative so powers of ten come out exact.
long long shots_for_tolerance(double eps);

// Metrics from estimated (counts / shots) outcome probabilities. Class2
// inputs are treated as the even psi2/psi3 mixture at the input's
// parameter: each shot draws a fair sign (binomial split over the group).
Metrics estimated_metrics(const DiscriminatorCircuit& circuit,
                          const LabeledInput& input,
                          const OutcomeAssignment& assignment,
                          const ShotPlan& plan);

namespace detail {

std::array<long long, 4> sample_label_counts(const std::array<double, 4>& probs,
                                             long long shots, Rng& rng);

// Shot-estimated analog of exact_metrics_for_param.
Metrics sampled_metrics_for_param(const TransferBlock& block, FamilyId family,
                                  double param,
                                  const OutcomeAssignment& assignment,
                                  long long shots, Rng& rng);

}  // namespace detail

}  // namespace statedisc
