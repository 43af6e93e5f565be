#include "statedisc/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace statedisc {

namespace {

Metrics fold(const std::array<double, 4>& probs, Label true_label,
             const OutcomeAssignment& assignment) {
  Metrics m;
  for (int outcome = 0; outcome < 4; ++outcome) {
    Label l = assignment.label_of_outcome[std::size_t(outcome)];
    if (l == Label::Inconclusive)
      m.p_inc += probs[std::size_t(outcome)];
    else if (l == true_label)
      m.p_suc += probs[std::size_t(outcome)];
    else
      m.p_err += probs[std::size_t(outcome)];
  }
  return m;
}

void accumulate(Metrics& acc, const Metrics& m, double w) {
  acc.p_suc += w * m.p_suc;
  acc.p_err += w * m.p_err;
  acc.p_inc += w * m.p_inc;
}

void check_ensemble(std::span<const FamilySampleSet> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("ensemble is empty");
  double prior_sum = 0.0;
  for (const auto& set : ensemble) {
    if (set.params.empty())
      throw std::invalid_argument("family sample set is empty");
    prior_sum += set.spec.prior;
  }
  if (std::abs(prior_sum - 1.0) > 1e-9)
    throw std::invalid_argument("family priors must sum to 1, got " +
                                std::to_string(prior_sum));
}

}  // namespace

std::vector<std::string> validate_assignment(const OutcomeAssignment& assignment,
                                             const std::string& path) {
  std::vector<std::string> out;
  bool has1 = false, has2 = false;
  for (Label l : assignment.label_of_outcome) {
    has1 |= l == Label::Class1;
    has2 |= l == Label::Class2;
  }
  if (!has1) out.push_back(path + ": no outcome is assigned to Class1");
  if (!has2) out.push_back(path + ": no outcome is assigned to Class2");
  return out;
}

Label classify_outcome(int outcome, const OutcomeAssignment& assignment) {
  if (outcome < 0 || outcome >= 4)
    throw std::out_of_range("outcome index " + std::to_string(outcome) +
                            " outside [0,4)");
  return assignment.label_of_outcome[std::size_t(outcome)];
}

Metrics metrics_from_probs(const std::array<double, 4>& outcome_probs,
                           Label true_label,
                           const OutcomeAssignment& assignment) {
  if (true_label == Label::Inconclusive)
    throw std::invalid_argument("true label must be a class label");
  return fold(outcome_probs, true_label, assignment);
}

Metrics per_input_metrics(const DiscriminatorCircuit& circuit,
                          const LabeledInput& input,
                          const OutcomeAssignment& assignment) {
  OutcomeDistribution dist = outcome_probabilities(circuit, input.state);
  std::array<double, 4> probs{dist.probs[0], dist.probs[1], dist.probs[2],
                              dist.probs[3]};
  return fold(probs, input.true_label, assignment);
}

EnsembleMetrics ensemble_metrics(const DiscriminatorCircuit& circuit,
                                 std::span<const FamilySampleSet> ensemble,
                                 const OutcomeAssignment& assignment) {
  detail::TransferBlock block;
  detail::compute_transfer_block(circuit.params().angles, block);
  return detail::ensemble_metrics_block(block, ensemble, assignment);
}

Metrics aggregate_metrics(const DiscriminatorCircuit& circuit,
                          std::span<const FamilySampleSet> ensemble,
                          const OutcomeAssignment& assignment) {
  return ensemble_metrics(circuit, ensemble, assignment).overall;
}

namespace detail {

Metrics exact_metrics_for_param(const TransferBlock& block, FamilyId family,
                                double param,
                                const OutcomeAssignment& assignment) {
  double p = param;
  if (family == FamilyId::Psi1) {
    std::array<cplx, 4> amps{std::sqrt(1.0 - p * p), 0.0, p, 0.0};
    return fold(label_probabilities(block, amps), Label::Class1, assignment);
  }
  // Exact half-half mixture of the two sign branches.
  double side = std::sqrt(1.0 - p * p);
  std::array<cplx, 4> plus{0.0, side, p, 0.0};
  std::array<cplx, 4> minus{0.0, -side, p, 0.0};
  Metrics m;
  accumulate(m, fold(label_probabilities(block, plus), Label::Class2, assignment), 0.5);
  accumulate(m, fold(label_probabilities(block, minus), Label::Class2, assignment), 0.5);
  return m;
}

EnsembleMetrics ensemble_metrics_block(const TransferBlock& block,
                                       std::span<const FamilySampleSet> ensemble,
                                       const OutcomeAssignment& assignment) {
  check_ensemble(ensemble);
  EnsembleMetrics result;
  for (const auto& set : ensemble) {
    Metrics mean;
    for (double param : set.params)
      accumulate(mean,
                 exact_metrics_for_param(block, set.spec.family, param, assignment),
                 1.0 / double(set.params.size()));
    result.per_family.push_back(mean);
    accumulate(result.overall, mean, set.spec.prior);
  }
  return result;
}

}  // namespace detail

}  // namespace statedisc
