#include "statedisc/cost.hpp"

#include <stdexcept>

#include "statedisc/sampling.hpp"

namespace statedisc {

namespace {

void check_cost(const CostConfig& cost) {
  if (cost.alpha_err < 0.0 || cost.alpha_inc < 0.0)
    throw std::invalid_argument("penalty weights must be nonnegative");
  if (!(cost.scale > 0.0))
    throw std::invalid_argument("cost scale must be positive");
}

void check_sets(std::span<const FamilySampleSet> ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("ensemble is empty");
  for (const auto& set : ensemble)
    if (set.params.empty())
      throw std::invalid_argument("family sample set is empty");
}

template <class MetricsForParam>
double cost_over(std::span<const FamilySampleSet> ensemble,
                 const CostConfig& cost, MetricsForParam&& metrics_for) {
  double total = 0.0;
  for (const auto& set : ensemble) {
    Metrics mean;
    double w = 1.0 / double(set.params.size());
    for (double param : set.params) {
      Metrics m = metrics_for(set.spec.family, param);
      mean.p_suc += w * m.p_suc;
      mean.p_err += w * m.p_err;
      mean.p_inc += w * m.p_inc;
    }
    total += (1.0 - mean.p_suc) + cost.alpha_err * mean.p_err +
             cost.alpha_inc * mean.p_inc;
  }
  return cost.scale * total;
}

}  // namespace

double cost_j1(const CircuitParams& params,
               std::span<const FamilySampleSet> ensemble,
               const CostConfig& cost, const OutcomeAssignment& assignment) {
  return detail::cost_j1_angles(params.angles, ensemble, cost, assignment);
}

double cost_j1_sampled(const CircuitParams& params,
                       std::span<const FamilySampleSet> ensemble,
                       const CostConfig& cost,
                       const OutcomeAssignment& assignment, long long shots,
                       Rng& rng) {
  return detail::cost_j1_angles_sampled(params.angles, ensemble, cost,
                                        assignment, shots, rng);
}

namespace detail {

double cost_from_metrics(std::span<const Metrics> per_family_means,
                         const CostConfig& cost) {
  double total = 0.0;
  for (const auto& mean : per_family_means)
    total += (1.0 - mean.p_suc) + cost.alpha_err * mean.p_err +
             cost.alpha_inc * mean.p_inc;
  return cost.scale * total;
}

double cost_j1_angles(std::span<const double> angles,
                      std::span<const FamilySampleSet> ensemble,
                      const CostConfig& cost,
                      const OutcomeAssignment& assignment) {
  check_cost(cost);
  check_sets(ensemble);
  TransferBlock block;
  compute_transfer_block(angles, block);
  return cost_over(ensemble, cost, [&](FamilyId family, double param) {
    return exact_metrics_for_param(block, family, param, assignment);
  });
}

double cost_j1_angles_sampled(std::span<const double> angles,
                              std::span<const FamilySampleSet> ensemble,
                              const CostConfig& cost,
                              const OutcomeAssignment& assignment,
                              long long shots, Rng& rng) {
  check_cost(cost);
  check_sets(ensemble);
  if (shots < 1) throw std::invalid_argument("shot count must be >= 1");
  TransferBlock block;
  compute_transfer_block(angles, block);
  return cost_over(ensemble, cost, [&](FamilyId family, double param) {
    return sampled_metrics_for_param(block, family, param, assignment, shots, rng);
  });
}

}  // namespace detail

}  // namespace statedisc
