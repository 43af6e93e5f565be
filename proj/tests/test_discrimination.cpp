#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "statedisc/metrics.hpp"

using namespace statedisc;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::vector<double> random_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  std::vector<double> a(kParamCount);
  for (auto& x : a) x = u(rng);
  return a;
}

// All measurement outcomes are m11 regardless of the input: block (ii)
// flips ancilla 1 unconditionally, block (iv) ancilla 2.
DiscriminatorCircuit always_inconclusive_circuit() {
  std::vector<double> a(kParamCount, 0.0);
  for (int i = 15; i < 19; ++i) a[i] = kPi;
  for (int i = 38; i < 46; ++i) a[i] = kPi;
  return build_discriminator_circuit({a});
}

}  // namespace

TEST_CASE("psi1 produces the documented amplitudes") {
  auto s = psi1(0.0);
  CHECK(std::abs(s.amp(0) - 1.0) < 1e-15);
  CHECK(std::abs(s.amp(2)) < 1e-15);

  s = psi1(1.0);
  CHECK(std::abs(s.amp(0)) < 1e-15);
  CHECK(std::abs(s.amp(2) - 1.0) < 1e-15);

  s = psi1(0.25);
  CHECK(s.amp(0).real() == doctest::Approx(0.96824583655).epsilon(1e-9));
  CHECK(s.amp(1) == cplx(0.0));
  CHECK(s.amp(2).real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.amp(3) == cplx(0.0));

  for (double a : {0.0, 0.1, 0.33, 0.5, 0.77, 1.0})
    CHECK(psi1(a).norm() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(psi1(-0.01), std::domain_error);
  CHECK_THROWS_AS(psi1(1.01), std::domain_error);
}

TEST_CASE("psi23 produces the documented amplitudes for both signs") {
  auto s = psi23(+1, kInvSqrt2);
  CHECK(s.amp(0) == cplx(0.0));
  CHECK(s.amp(1).real() == doctest::Approx(0.70710678119).epsilon(1e-9));
  CHECK(s.amp(2).real() == doctest::Approx(0.70710678119).epsilon(1e-9));

  s = psi23(-1, kInvSqrt2);
  CHECK(s.amp(1).real() == doctest::Approx(-0.70710678119).epsilon(1e-9));
  CHECK(s.amp(2).real() == doctest::Approx(0.70710678119).epsilon(1e-9));

  // b = 1 is degenerate: both signs give the same state.
  auto plus = psi23(+1, 1.0), minus = psi23(-1, 1.0);
  CHECK(std::abs(minus.amp(2) - 1.0) < 1e-15);
  CHECK(fidelity(plus, minus) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(psi23(+1, -0.5), std::domain_error);
  CHECK_THROWS_AS(psi23(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(psi23(2, 0.5), std::domain_error);
}

TEST_CASE("cross-family fidelity at b = 1/sqrt(2) is a/sqrt(2)") {
  for (double a = 0.0; a <= 1.0; a += 0.05) {
    CHECK(std::abs(fidelity(psi1(a), psi23(+1, kInvSqrt2)) - a * kInvSqrt2) < 1e-12);
    CHECK(std::abs(fidelity(psi1(a), psi23(-1, kInvSqrt2)) - a * kInvSqrt2) < 1e-12);
  }
}

TEST_CASE("family_label maps families to their class labels") {
  CHECK(family_label(FamilyId::Psi1) == Label::Class1);
  CHECK(family_label(FamilyId::Psi23) == Label::Class2);
}

TEST_CASE("sample_input with a fixed parameter is deterministic in the state") {
  Rng rng(17);
  StateFamilySpec spec{FamilyId::Psi1, 1.0 / 3.0, FixedValue{0.25}};
  for (int i = 0; i < 50; ++i) {
    auto input = sample_input(spec, rng);
    CHECK(input.true_label == Label::Class1);
    CHECK(input.param == 0.25);
    CHECK(fidelity(input.state, psi1(0.25)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("truncated normal draws have the right mean and stay in range") {
  Rng rng(99);
  ParamDistribution dist = TruncatedNormalDist{0.25, 0.01, 0.0, 1.0};
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double x = sample_param(dist, rng);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
  }
  CHECK(std::abs(sum / 10000.0 - 0.25) < 0.005);
}

TEST_CASE("psi23 sign draws are a fair coin") {
  Rng rng(7);
  StateFamilySpec spec{FamilyId::Psi23, 2.0 / 3.0, FixedValue{kInvSqrt2}};
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    auto input = sample_input(spec, rng);
    CHECK(input.true_label == Label::Class2);
    if (input.branch_sign == +1) ++plus;
  }
  double freq = plus / 10000.0;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("uniform and mixture draws follow their definitions") {
  Rng rng(123);
  ParamDistribution uni = UniformDist{0.2, 0.6};
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 5000; ++i) {
    double x = sample_param(uni, rng);
    CHECK(x >= 0.2);
    CHECK(x < 0.6);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo < 0.25);
  CHECK(hi > 0.55);

  MixtureDist mix;
  mix.components.push_back({1.0, FixedValue{0.1}});
  mix.components.push_back({1.0, FixedValue{0.9}});
  int low = 0;
  for (int i = 0; i < 10000; ++i) {
    double x = sample_param(ParamDistribution{mix}, rng);
    CHECK((x == 0.1 || x == 0.9));
    if (x == 0.1) ++low;
  }
  CHECK(low > 4700);
  CHECK(low < 5300);
}

TEST_CASE("distribution validation reports problems with field paths") {
  CHECK(validate_distribution(FixedValue{0.5}, "d").empty());
  CHECK(validate_distribution(TruncatedNormalDist{0.25, 0.01, 0.0, 1.0}, "d").empty());
  CHECK(validate_distribution(UniformDist{0.0, 1.0}, "d").empty());

  auto errs = validate_distribution(FixedValue{1.5}, "families[0].dist");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("families[0].dist.value") != std::string::npos);

  errs = validate_distribution(UniformDist{0.8, 0.2}, "d");
  CHECK(errs.size() == 1);

  errs = validate_distribution(TruncatedNormalDist{0.5, -1.0, 0.0, 1.0}, "d");
  CHECK(!errs.empty());

  errs = validate_distribution(MixtureDist{}, "d");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("d.components") != std::string::npos);

  MixtureDist bad;
  bad.components.push_back({-1.0, FixedValue{2.0}});
  errs = validate_distribution(bad, "d");
  CHECK(errs.size() >= 2);  // bad weight and bad value
}

TEST_CASE("classify_outcome follows the default assignment") {
  auto assignment = OutcomeAssignment::default_assignment();
  CHECK(classify_outcome(kOutcomeM00, assignment) == Label::Class1);
  CHECK(classify_outcome(kOutcomeM01, assignment) == Label::Class2);
  CHECK(classify_outcome(kOutcomeM10, assignment) == Label::Class1);
  CHECK(classify_outcome(kOutcomeM11, assignment) == Label::Inconclusive);
  CHECK_THROWS_AS(classify_outcome(-1, assignment), std::out_of_range);
  CHECK_THROWS_AS(classify_outcome(4, assignment), std::out_of_range);
}

TEST_CASE("assignment validation requires both classes to be reachable") {
  CHECK(validate_assignment(OutcomeAssignment::default_assignment(), "a").empty());
  OutcomeAssignment all_one;
  all_one.label_of_outcome = {Label::Class1, Label::Class1, Label::Class1,
                              Label::Class1};
  auto errs = validate_assignment(all_one, "assignment");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("Class2") != std::string::npos);
}

TEST_CASE("per-input metrics partition to 1 and match outcome enumeration") {
  std::mt19937_64 rng(2024);
  auto assignment = OutcomeAssignment::default_assignment();
  for (int rep = 0; rep < 25; ++rep) {
    auto circuit = build_discriminator_circuit({random_angles(rng)});
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LabeledInput input{psi1(u(rng)), Label::Class1, 0.0, +1};
    if (rep % 2) {
      double b = u(rng);
      int sign = rep % 4 == 1 ? +1 : -1;
      input = LabeledInput{psi23(sign, b), Label::Class2, b, sign};
    }
    Metrics m = per_input_metrics(circuit, input, assignment);
    CHECK(m.p_suc + m.p_err + m.p_inc == doctest::Approx(1.0).epsilon(1e-10));

    // independent enumeration of the four outcomes
    auto dist = outcome_probabilities(circuit, input.state);
    double suc = 0, err = 0, inc = 0;
    for (int L = 0; L < 4; ++L) {
      Label l = classify_outcome(L, assignment);
      if (l == Label::Inconclusive)
        inc += dist.probs[std::size_t(L)];
      else if (l == input.true_label)
        suc += dist.probs[std::size_t(L)];
      else
        err += dist.probs[std::size_t(L)];
    }
    CHECK(m.p_suc == doctest::Approx(suc).epsilon(1e-12));
    CHECK(m.p_err == doctest::Approx(err).epsilon(1e-12));
    CHECK(m.p_inc == doctest::Approx(inc).epsilon(1e-12));
  }
}

TEST_CASE("a circuit that always answers inconclusive scores (0, 0, 1)") {
  auto circuit = always_inconclusive_circuit();
  auto assignment = OutcomeAssignment::default_assignment();
  LabeledInput input{psi1(0.4), Label::Class1, 0.4, +1};
  Metrics m = per_input_metrics(circuit, input, assignment);
  CHECK(m.p_suc == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.p_err == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.p_inc == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aggregate metrics are the prior-weighted family means") {
  std::mt19937_64 rng(515);
  auto assignment = OutcomeAssignment::default_assignment();
  auto circuit = build_discriminator_circuit({random_angles(rng)});

  std::vector<FamilySampleSet> ensemble{
      {StateFamilySpec{FamilyId::Psi1, 1.0 / 3.0, FixedValue{}},
       {0.1, 0.25, 0.6}},
      {StateFamilySpec{FamilyId::Psi23, 2.0 / 3.0, FixedValue{}},
       {kInvSqrt2, 0.3}}};

  EnsembleMetrics em = ensemble_metrics(circuit, ensemble, assignment);
  REQUIRE(em.per_family.size() == 2);
  CHECK(em.overall.p_suc ==
        doctest::Approx((em.per_family[0].p_suc + 2.0 * em.per_family[1].p_suc) / 3.0)
            .epsilon(1e-14));
  CHECK(em.overall.p_err ==
        doctest::Approx((em.per_family[0].p_err + 2.0 * em.per_family[1].p_err) / 3.0)
            .epsilon(1e-14));
  CHECK(em.overall.p_suc + em.overall.p_err + em.overall.p_inc ==
        doctest::Approx(1.0).epsilon(1e-9));

  // family means are the arithmetic means of per-input metrics, with
  // Psi23 inputs evaluated as the exact half-half sign mixture
  double mean_suc = 0.0;
  for (double a : ensemble[0].params)
    mean_suc += per_input_metrics(circuit, {psi1(a), Label::Class1, a, +1},
                                  assignment).p_suc / 3.0;
  CHECK(em.per_family[0].p_suc == doctest::Approx(mean_suc).epsilon(1e-12));

  double mean23 = 0.0;
  for (double b : ensemble[1].params) {
    double p = per_input_metrics(circuit, {psi23(+1, b), Label::Class2, b, +1},
                                 assignment).p_suc;
    double q = per_input_metrics(circuit, {psi23(-1, b), Label::Class2, b, -1},
                                 assignment).p_suc;
    mean23 += 0.5 * (p + q) / 2.0;
  }
  CHECK(em.per_family[1].p_suc == doctest::Approx(mean23).epsilon(1e-12));

  // single family with prior 1 and one sample reduces to per-input metrics
  std::vector<FamilySampleSet> single{
      {StateFamilySpec{FamilyId::Psi1, 1.0, FixedValue{}}, {0.25}}};
  Metrics agg = aggregate_metrics(circuit, single, assignment);
  Metrics per = per_input_metrics(circuit, {psi1(0.25), Label::Class1, 0.25, +1},
                                  assignment);
  CHECK(agg.p_suc == doctest::Approx(per.p_suc).epsilon(1e-14));
  CHECK(agg.p_err == doctest::Approx(per.p_err).epsilon(1e-14));
}

TEST_CASE("aggregate metrics validate priors and sample sets") {
  std::mt19937_64 rng(81);
  auto circuit = build_discriminator_circuit({random_angles(rng)});
  auto assignment = OutcomeAssignment::default_assignment();

  std::vector<FamilySampleSet> bad_priors{
      {StateFamilySpec{FamilyId::Psi1, 0.5, FixedValue{}}, {0.2}},
      {StateFamilySpec{FamilyId::Psi23, 0.3, FixedValue{}}, {0.5}}};
  CHECK_THROWS_AS(aggregate_metrics(circuit, bad_priors, assignment),
                  std::invalid_argument);

  std::vector<FamilySampleSet> empty_set{
      {StateFamilySpec{FamilyId::Psi1, 1.0, FixedValue{}}, {}}};
  CHECK_THROWS_AS(aggregate_metrics(circuit, empty_set, assignment),
                  std::invalid_argument);

  CHECK_THROWS_AS(aggregate_metrics(circuit, {}, assignment),
                  std::invalid_argument);
}

TEST_CASE("exact sign mixture equals the expectation of sampled signs") {
  std::mt19937_64 grng(4);
  auto circuit = build_discriminator_circuit({random_angles(grng)});
  auto assignment = OutcomeAssignment::default_assignment();

  std::vector<FamilySampleSet> ensemble{
      {StateFamilySpec{FamilyId::Psi23, 1.0, FixedValue{kInvSqrt2}}, {kInvSqrt2}}};
  Metrics exact = aggregate_metrics(circuit, ensemble, assignment);

  Rng rng(2718);
  StateFamilySpec spec{FamilyId::Psi23, 1.0, FixedValue{kInvSqrt2}};
  Metrics mean;
  int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    auto input = sample_input(spec, rng);
    Metrics m = per_input_metrics(circuit, input, assignment);
    mean.p_suc += m.p_suc / reps;
    mean.p_err += m.p_err / reps;
    mean.p_inc += m.p_inc / reps;
  }
  // Bernoulli spread of the per-sign metric difference: 3 sigma with
  // sigma <= 0.5/sqrt(reps) per component.
  double tol = 3.0 * 0.5 / std::sqrt(double(reps));
  CHECK(std::abs(mean.p_suc - exact.p_suc) < tol);
  CHECK(std::abs(mean.p_err - exact.p_err) < tol);
  CHECK(std::abs(mean.p_inc - exact.p_inc) < tol);
}
