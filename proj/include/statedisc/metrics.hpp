#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "statedisc/circuit.hpp"
#include "statedisc/families.hpp"

namespace statedisc {

// Probability partition per input or ensemble: correct assignment, wrong
// class, declared inconclusive. Components sum to 1.
struct Metrics {
  double p_suc = 0.0;
  double p_err = 0.0;
  double p_inc = 0.0;
};

// Maps the four measurement outcomes m00..m11 to decision labels.
// Default: {m00, m10} -> Class1, m01 -> Class2, m11 -> Inconclusive.
struct OutcomeAssignment {
  std::array<Label, 4> label_of_outcome{Label::Class1, Label::Class2,
                                        Label::Class1, Label::Inconclusive};
  static OutcomeAssignment default_assignment() { return {}; }
};

// Each of Class1 and Class2 must be reachable by at least one outcome.
std::vector<std::string> validate_assignment(const OutcomeAssignment& assignment,
                                             const std::string& path);

// Deterministic lookup; outcome outside [0,4) is an error.
Label classify_outcome(int outcome, const OutcomeAssignment& assignment);

// Folds a 4-outcome distribution into Metrics for an input whose correct
// decision is `true_label`.
Metrics metrics_from_probs(const std::array<double, 4>& outcome_probs,
                           Label true_label, const OutcomeAssignment& assignment);

Metrics per_input_metrics(const DiscriminatorCircuit& circuit,
                          const LabeledInput& input,
                          const OutcomeAssignment& assignment);

// Ensemble metrics: per-family sample means plus the prior-weighted
// overall partition. Psi23 samples are evaluated as the exact half-half
// mixture of both sign branches.
struct EnsembleMetrics {
  Metrics overall;
  std::vector<Metrics> per_family;
};

EnsembleMetrics ensemble_metrics(const DiscriminatorCircuit& circuit,
                                 std::span<const FamilySampleSet> ensemble,
                                 const OutcomeAssignment& assignment);

Metrics aggregate_metrics(const DiscriminatorCircuit& circuit,
                          std::span<const FamilySampleSet> ensemble,
                          const OutcomeAssignment& assignment);

namespace detail {

// Fast-path versions over a precomputed transfer block (no gate replay).
Metrics exact_metrics_for_param(const TransferBlock& block, FamilyId family,
                                double param, const OutcomeAssignment& assignment);

EnsembleMetrics ensemble_metrics_block(const TransferBlock& block,
                                       std::span<const FamilySampleSet> ensemble,
                                       const OutcomeAssignment& assignment);

}  // namespace detail

}  // namespace statedisc
