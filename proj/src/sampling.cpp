#include "statedisc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace statedisc {

namespace {

// Multinomial via a chain of conditional binomials. Exact distribution;
// probabilities are renormalized against the remaining mass so floating
// error cannot push a conditional probability outside [0,1].
void multinomial_chain(std::span<const double> probs, long long shots,
                       Rng& rng, std::span<long long> counts) {
  long long remaining = shots;
  double mass = 1.0;
  std::size_t n = probs.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double p = 0.0;
    if (mass > 0.0) p = std::clamp(probs[k] / mass, 0.0, 1.0);
    long long c = 0;
    if (remaining > 0 && p > 0.0) {
      if (p >= 1.0) {
        c = remaining;
      } else {
        std::binomial_distribution<long long> bin(remaining, p);
        c = bin(rng);
      }
    }
    counts[k] = c;
    remaining -= c;
    mass -= probs[k];
  }
  counts[n - 1] = remaining;
}

Metrics metrics_from_counts(const std::array<long long, 4>& counts,
                            long long shots, Label true_label,
                            const OutcomeAssignment& assignment) {
  Metrics m;
  if (shots <= 0) return m;
  for (int outcome = 0; outcome < 4; ++outcome) {
    double frac = double(counts[std::size_t(outcome)]) / double(shots);
    Label l = assignment.label_of_outcome[std::size_t(outcome)];
    if (l == Label::Inconclusive)
      m.p_inc += frac;
    else if (l == true_label)
      m.p_suc += frac;
    else
      m.p_err += frac;
  }
  return m;
}

}  // namespace

std::vector<long long> sample_outcome_counts(const OutcomeDistribution& dist,
                                             long long shots, Rng& rng) {
  if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
  if (dist.probs.empty()) throw std::invalid_argument("empty distribution");
  std::vector<long long> counts(dist.probs.size(), 0);
  multinomial_chain(dist.probs, shots, rng, counts);
  return counts;
}

std::vector<long long> sample_outcome_counts(const OutcomeDistribution& dist,
                                             const ShotPlan& plan) {
  Rng rng(plan.seed);
  return sample_outcome_counts(dist, plan.shots, rng);
}

long long shots_for_tolerance(double eps) {
  if (!(eps > 0.0)) throw std::domain_error("tolerance must be > 0");
  double q = 1.0 / (eps * eps * eps * eps);
  if (q >= 9.0e18)
    throw std::overflow_error("shot count for tolerance " + std::to_string(eps) +
                              " exceeds the 64-bit range");
  double nearest = std::round(q);
  if (nearest > 0.0 && std::abs(q - nearest) <= 1e-9 * nearest) q = nearest;
  return static_cast<long long>(std::ceil(q));
}

Metrics estimated_metrics(const DiscriminatorCircuit& circuit,
                          const LabeledInput& input,
                          const OutcomeAssignment& assignment,
                          const ShotPlan& plan) {
  if (plan.shots < 1) throw std::invalid_argument("shot count must be >= 1");
  Rng rng(plan.seed);
  detail::TransferBlock block;
  detail::compute_transfer_block(circuit.params().angles, block);
  FamilyId family =
      input.true_label == Label::Class1 ? FamilyId::Psi1 : FamilyId::Psi23;
  return detail::sampled_metrics_for_param(block, family, input.param,
                                           assignment, plan.shots, rng);
}

namespace detail {

std::array<long long, 4> sample_label_counts(const std::array<double, 4>& probs,
                                             long long shots, Rng& rng) {
  std::array<long long, 4> counts{0, 0, 0, 0};
  multinomial_chain(probs, shots, rng, counts);
  return counts;
}

Metrics sampled_metrics_for_param(const TransferBlock& block, FamilyId family,
                                  double param,
                                  const OutcomeAssignment& assignment,
                                  long long shots, Rng& rng) {
  if (family == FamilyId::Psi1) {
    std::array<cplx, 4> amps{std::sqrt(1.0 - param * param), 0.0, param, 0.0};
    auto counts = sample_label_counts(label_probabilities(block, amps), shots, rng);
    return metrics_from_counts(counts, shots, Label::Class1, assignment);
  }
  // Each shot prepares psi2 or psi3 with a fair coin; equivalently the
  // group splits binomially between the branches.
  long long plus_shots = 0;
  if (shots > 0) {
    std::binomial_distribution<long long> bin(shots, 0.5);
    plus_shots = bin(rng);
  }
  double side = std::sqrt(1.0 - param * param);
  std::array<long long, 4> counts{0, 0, 0, 0};
  if (plus_shots > 0) {
    std::array<cplx, 4> plus{0.0, side, param, 0.0};
    auto c = sample_label_counts(label_probabilities(block, plus), plus_shots, rng);
    for (int i = 0; i < 4; ++i) counts[std::size_t(i)] += c[std::size_t(i)];
  }
  if (shots - plus_shots > 0) {
    std::array<cplx, 4> minus{0.0, -side, param, 0.0};
    auto c = sample_label_counts(label_probabilities(block, minus),
                                 shots - plus_shots, rng);
    for (int i = 0; i < 4; ++i) counts[std::size_t(i)] += c[std::size_t(i)];
  }
  return metrics_from_counts(counts, shots, Label::Class2, assignment);
}

}  // namespace detail

}  // namespace statedisc
