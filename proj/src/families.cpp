#include "statedisc/families.hpp"

#include <cmath>
#include <stdexcept>

namespace statedisc {

namespace {

void check_amplitude(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error(std::string(name) + " must be in [0,1], got " +
                            std::to_string(x));
}

double sample_base(const BaseDistribution& dist, Rng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FixedValue>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, TruncatedNormalDist>) {
          // Rejection keeps the normal shape exact inside [lo, hi].
          for (;;) {
            double x = d.mean + d.stddev * normal_double(rng);
            if (x >= d.lo && x <= d.hi) return x;
          }
        } else {
          return uniform_in(rng, d.lo, d.hi);
        }
      },
      dist);
}

void validate_base(const BaseDistribution& dist, const std::string& path,
                   std::vector<std::string>& out) {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FixedValue>) {
          if (!(d.value >= 0.0 && d.value <= 1.0))
            out.push_back(path + ".value: must be in [0,1]");
        } else if constexpr (std::is_same_v<T, TruncatedNormalDist>) {
          if (!(d.stddev > 0.0)) out.push_back(path + ".stddev: must be > 0");
          if (!(d.lo >= 0.0 && d.hi <= 1.0 && d.lo < d.hi))
            out.push_back(path + ": truncation window must satisfy 0 <= lo < hi <= 1");
          if (!(d.mean >= d.lo - 10 * d.stddev && d.mean <= d.hi + 10 * d.stddev))
            out.push_back(path + ".mean: more than 10 standard deviations outside "
                                 "the truncation window; rejection sampling would stall");
        } else {
          if (!(d.lo >= 0.0 && d.hi <= 1.0 && d.lo <= d.hi))
            out.push_back(path + ": must satisfy 0 <= lo <= hi <= 1");
        }
      },
      dist);
}

}  // namespace

Label family_label(FamilyId id) {
  return id == FamilyId::Psi1 ? Label::Class1 : Label::Class2;
}

StateVector psi1(double a) {
  check_amplitude(a, "psi1 amplitude a");
  return StateVector::from_amplitudes(
      {std::sqrt(1.0 - a * a), 0.0, a, 0.0});
}

StateVector psi23(int sign, double b) {
  check_amplitude(b, "psi23 amplitude b");
  if (sign != 1 && sign != -1)
    throw std::domain_error("psi23 sign must be +1 or -1");
  return StateVector::from_amplitudes(
      {0.0, sign * std::sqrt(1.0 - b * b), b, 0.0});
}

double sample_param(const ParamDistribution& dist, Rng& rng) {
  if (const auto* mix = std::get_if<MixtureDist>(&dist)) {
    double total = 0.0;
    for (const auto& c : mix->components) total += c.weight;
    double pick = uniform_double(rng) * total;
    for (const auto& c : mix->components) {
      pick -= c.weight;
      if (pick < 0.0) return sample_base(c.dist, rng);
    }
    return sample_base(mix->components.back().dist, rng);
  }
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, MixtureDist>) {
          return 0.0;  // unreachable, handled above
        } else {
          return sample_base(BaseDistribution{d}, rng);
        }
      },
      dist);
}

std::vector<std::string> validate_distribution(const ParamDistribution& dist,
                                               const std::string& path) {
  std::vector<std::string> out;
  if (const auto* mix = std::get_if<MixtureDist>(&dist)) {
    if (mix->components.empty()) {
      out.push_back(path + ".components: mixture must have at least one component");
      return out;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mix->components.size(); ++i) {
      const auto& c = mix->components[i];
      std::string cpath = path + ".components[" + std::to_string(i) + "]";
      if (!(c.weight > 0.0)) out.push_back(cpath + ".weight: must be > 0");
      total += c.weight;
      validate_base(c.dist, cpath, out);
    }
    if (!(total > 0.0)) out.push_back(path + ".components: weights sum to 0");
    return out;
  }
  std::visit([&](const auto& d) {
    using T = std::decay_t<decltype(d)>;
    if constexpr (!std::is_same_v<T, MixtureDist>)
      validate_base(BaseDistribution{d}, path, out);
  }, dist);
  return out;
}

LabeledInput sample_input(const StateFamilySpec& spec, Rng& rng) {
  double param = sample_param(spec.param_distribution, rng);
  if (spec.family == FamilyId::Psi1)
    return LabeledInput{psi1(param), Label::Class1, param, +1};
  int sign = uniform_double(rng) < 0.5 ? +1 : -1;
  return LabeledInput{psi23(sign, param), Label::Class2, param, sign};
}

}  // namespace statedisc
