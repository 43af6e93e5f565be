#pragma once

#include <string>
#include <variant>
#include <vector>

#include "statedisc/rng.hpp"
#include "statedisc/simulator.hpp"

namespace statedisc {

// The two input classes: a pure-state family psi1(a) and the even mixture
// of the psi2/psi3 pair at a common amplitude b.
enum class FamilyId { Psi1, Psi23 };

enum class Label { Class1, Class2, Inconclusive };

// The class label a family's inputs should be assigned to.
Label family_label(FamilyId id);

// psi1(a) = sqrt(1-a^2)|00> + a|10> on the two data qubits.
StateVector psi1(double a);

// psi23(sign, b) = sign * sqrt(1-b^2)|01> + b|10>, sign in {+1, -1}.
StateVector psi23(int sign, double b);

// Distributions for the family parameter (a or b), support within [0,1].
struct FixedValue {
  double value = 0.0;
};
struct TruncatedNormalDist {
  double mean = 0.0;
  double stddev = 1.0;
  double lo = 0.0;
  double hi = 1.0;
};
struct UniformDist {
  double lo = 0.0;
  double hi = 1.0;
};
using BaseDistribution = std::variant<FixedValue, TruncatedNormalDist, UniformDist>;

// One level of mixing over the base distributions; nested mixtures are
// rejected at validation.
struct MixtureComponent {
  double weight = 1.0;
  BaseDistribution dist;
};
struct MixtureDist {
  std::vector<MixtureComponent> components;
};

using ParamDistribution =
    std::variant<FixedValue, TruncatedNormalDist, UniformDist, MixtureDist>;

// Draws one parameter value. Truncation is by rejection, so the shape
// inside [lo, hi] is exact.
double sample_param(const ParamDistribution& dist, Rng& rng);

// Returns problems as human-readable messages prefixed with `path`
// (e.g. "families[0].param_distribution"); empty means valid.
std::vector<std::string> validate_distribution(const ParamDistribution& dist,
                                               const std::string& path);

struct StateFamilySpec {
  FamilyId family = FamilyId::Psi1;
  double prior = 0.5;
  ParamDistribution param_distribution = FixedValue{};
};

struct LabeledInput {
  StateVector state;
  Label true_label = Label::Class1;
  double param = 0.0;
  int branch_sign = +1;  // which psi2/psi3 member, meaningful for Psi23
};

// Draws the parameter, and for Psi23 a fair sign, and builds the state.
LabeledInput sample_input(const StateFamilySpec& spec, Rng& rng);

// A family together with its drawn parameter set S_i.
struct FamilySampleSet {
  StateFamilySpec spec;
  std::vector<double> params;
};

}  // namespace statedisc
