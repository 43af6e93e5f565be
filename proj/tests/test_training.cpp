#include <cmath>
#include <random>

#include "doctest.h"
#include "statedisc/train.hpp"

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

std::vector<FamilySampleSet> standard_ensemble(std::vector<double> a_params,
                                               std::vector<double> b_params) {
  return {{StateFamilySpec{FamilyId::Psi1, 1.0 / 3.0, FixedValue{}},
           std::move(a_params)},
          {StateFamilySpec{FamilyId::Psi23, 2.0 / 3.0, FixedValue{kInvSqrt2}},
           std::move(b_params)}};
}

// 100 evenly spaced points on [0,1], endpoints included.
std::vector<double> linspace01(int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(double(i) / double(n - 1));
  return out;
}

TrainConfig full_range_config(double alpha_err, double alpha_inc,
                              std::uint64_t seed) {
  TrainConfig cfg;
  cfg.cost = CostConfig{alpha_err, alpha_inc, 1.0};
  cfg.train_ensemble = standard_ensemble(
      linspace01(100), std::vector<double>(100, kInvSqrt2));
  cfg.minibatch_size = 50;
  cfg.gradient_step = 1e-3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("cost is zero for a perfect discriminator of orthogonal inputs") {
  // psi1(0) = |00> and psi23(+-1, 1) = |10> are orthogonal. The first
  // two-qubit block at zero angles swaps the data qubits (|10> -> |01>),
  // so flipping ancilla 1 on data value 1 separates them exactly.
  std::vector<double> a(kParamCount, 0.0);
  a[16] = kPi;  // block (ii) slot for data reading |01>
  CircuitParams params{a};

  std::vector<FamilySampleSet> ensemble = standard_ensemble({0.0}, {1.0});
  auto assignment = OutcomeAssignment::default_assignment();
  CHECK(cost_j1(params, ensemble, CostConfig{25.0, 2.0, 1.0}, assignment) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cost of the always-inconclusive circuit is families * (1 + alpha_inc)") {
  std::vector<double> a(kParamCount, 0.0);
  for (int i = 15; i < 19; ++i) a[i] = kPi;
  for (int i = 38; i < 46; ++i) a[i] = kPi;
  CircuitParams params{a};
  std::vector<FamilySampleSet> ensemble =
      standard_ensemble({0.2, 0.5}, {kInvSqrt2});
  auto assignment = OutcomeAssignment::default_assignment();

  CHECK(cost_j1(params, ensemble, CostConfig{25.0, 2.0, 1.0}, assignment) ==
        doctest::Approx(6.0).epsilon(1e-12));
  CHECK(cost_j1(params, ensemble, CostConfig{99.0, 2.0, 1.0}, assignment) ==
        doctest::Approx(6.0).epsilon(1e-12));
  CHECK(cost_j1(params, ensemble, CostConfig{25.0, 2.0, 2.5}, assignment) ==
        doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("cost matches a brute-force recomputation from per-input metrics") {
  std::mt19937_64 rng(42);
  auto assignment = OutcomeAssignment::default_assignment();
  CostConfig cost{25.0, 2.0, 1.0};
  for (int rep = 0; rep < 10; ++rep) {
    CircuitParams params{random_angles(rng)};
    auto circuit = build_discriminator_circuit(params);
    std::vector<FamilySampleSet> ensemble =
        standard_ensemble({0.1, 0.4, 0.9}, {kInvSqrt2, 0.2, 0.6});

    double total = 0.0;
    for (const auto& set : ensemble) {
      Metrics mean;
      for (double p : set.params) {
        Metrics m;
        if (set.spec.family == FamilyId::Psi1) {
          m = per_input_metrics(circuit, {psi1(p), Label::Class1, p, +1},
                                assignment);
        } else {
          Metrics plus = per_input_metrics(
              circuit, {psi23(+1, p), Label::Class2, p, +1}, assignment);
          Metrics minus = per_input_metrics(
              circuit, {psi23(-1, p), Label::Class2, p, -1}, assignment);
          m = Metrics{0.5 * (plus.p_suc + minus.p_suc),
                      0.5 * (plus.p_err + minus.p_err),
                      0.5 * (plus.p_inc + minus.p_inc)};
        }
        mean.p_suc += m.p_suc / double(set.params.size());
        mean.p_err += m.p_err / double(set.params.size());
        mean.p_inc += m.p_inc / double(set.params.size());
      }
      total += (1.0 - mean.p_suc) + cost.alpha_err * mean.p_err +
               cost.alpha_inc * mean.p_inc;
    }
    CHECK(cost_j1(params, ensemble, cost, assignment) ==
          doctest::Approx(total).epsilon(1e-10));
  }
}

TEST_CASE("cost scales linearly in the scale factor") {
  std::mt19937_64 rng(7);
  CircuitParams params{random_angles(rng)};
  auto ensemble = standard_ensemble({0.3, 0.7}, {kInvSqrt2});
  auto assignment = OutcomeAssignment::default_assignment();
  double base = cost_j1(params, ensemble, CostConfig{10.0, 3.0, 1.0}, assignment);
  double scaled = cost_j1(params, ensemble, CostConfig{10.0, 3.0, 4.5}, assignment);
  CHECK(scaled == doctest::Approx(4.5 * base).epsilon(1e-12));
}

TEST_CASE("cost rejects invalid configurations and empty ensembles") {
  std::mt19937_64 rng(3);
  CircuitParams params{random_angles(rng)};
  auto ensemble = standard_ensemble({0.5}, {kInvSqrt2});
  auto assignment = OutcomeAssignment::default_assignment();
  CHECK_THROWS_AS(cost_j1(params, ensemble, CostConfig{-1.0, 2.0, 1.0}, assignment),
                  std::invalid_argument);
  CHECK_THROWS_AS(cost_j1(params, ensemble, CostConfig{1.0, 2.0, 0.0}, assignment),
                  std::invalid_argument);
  CHECK_THROWS_AS(cost_j1(params, {}, CostConfig{}, assignment),
                  std::invalid_argument);
  std::vector<FamilySampleSet> empty_set{
      {StateFamilySpec{FamilyId::Psi1, 1.0, FixedValue{}}, {}}};
  CHECK_THROWS_AS(cost_j1(params, empty_set, CostConfig{}, assignment),
                  std::invalid_argument);
}

TEST_CASE("forward differences: closed forms and evaluation count") {
  int evals = 0;
  auto constant = [&](const std::vector<double>&) {
    ++evals;
    return 3.5;
  };
  auto grad = forward_diff_gradient(constant, {1.0, 2.0, 3.0}, 1e-6);
  CHECK(evals == 4);  // exactly P + 1
  for (double g : grad) CHECK(g == 0.0);

  auto square = [](const std::vector<double>& x) { return x[0] * x[0]; };
  grad = forward_diff_gradient(square, {1.0}, 1e-6);
  CHECK(grad[0] == doctest::Approx(2.000001).epsilon(1e-9));

  CHECK_THROWS_AS(forward_diff_gradient(square, {1.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("forward differences report the offending component on NaN") {
  auto f = [](const std::vector<double>& x) {
    if (x[1] > 10.0) return std::nan("");
    return x[0] + x[1];
  };
  try {
    forward_diff_gradient(f, {0.0, 10.0 - 1e-7}, 1e-6);
    FAIL("expected a numeric error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("component 1") != std::string::npos);
  }

  auto bad_base = [](const std::vector<double>&) { return std::nan(""); };
  CHECK_THROWS_AS(forward_diff_gradient(bad_base, {0.0}, 1e-6),
                  std::runtime_error);
}

TEST_CASE("forward and central differences of the cost agree") {
  std::mt19937_64 rng(1001);
  auto assignment = OutcomeAssignment::default_assignment();
  CostConfig cost{25.0, 2.0, 1.0};
  auto ensemble = standard_ensemble({0.15, 0.5, 0.85}, {kInvSqrt2});
  auto f = [&](const std::vector<double>& x) {
    return cost_j1(CircuitParams{x}, ensemble, cost, assignment);
  };
  for (int rep = 0; rep < 3; ++rep) {
    auto theta = random_angles(rng);
    double eps = 1e-3;
    auto fwd = forward_diff_gradient(f, theta, eps);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      double h = 1e-4;
      auto plus = theta, minus = theta;
      plus[j] += h;
      minus[j] -= h;
      double central = (f(plus) - f(minus)) / (2 * h);
      CHECK(std::abs(fwd[j] - central) < 5e-3);
      CHECK(std::abs(fwd[j] - central) < 10.0 * eps);
    }
  }
}

TEST_CASE("optimizer steps leave parameters unchanged on zero gradient") {
  std::vector<double> params{0.3, -1.2, 7.0};
  std::vector<double> zero{0.0, 0.0, 0.0};
  for (auto kind : {OptimizerKind::Adam, OptimizerKind::Sgd, OptimizerKind::RmsProp}) {
    auto state = make_optimizer_state(kind, OptimizerHyperparams{}, 3);
    auto current = params;
    for (int t = 0; t < 5; ++t) {
      auto [next, next_state] = optimizer_step(std::move(state), current, zero);
      current = next;
      state = std::move(next_state);
    }
    for (std::size_t i = 0; i < 3; ++i) CHECK(current[i] == params[i]);
  }
}

TEST_CASE("Adam first step matches the hand-computed update") {
  auto state = make_optimizer_state(OptimizerKind::Adam, OptimizerHyperparams{}, 1);
  auto [next, after] = optimizer_step(std::move(state), std::vector<double>{0.0},
                                      std::vector<double>{1.0});
  // alpha_1 = 0.001 * sqrt(1 - 0.999) / (1 - 0.9) = 3.16227766e-4
  // m_1 = 0.1, v_1 = 0.001; step = alpha_1 * m_1 / (sqrt(v_1) + 1e-8)
  CHECK(after.t == 1);
  CHECK(after.m[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(after.v[0] == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(next[0] == doctest::Approx(-9.9999968377e-4).epsilon(1e-9));
}

TEST_CASE("SGD step is a plain scaled gradient") {
  OptimizerHyperparams hp;
  hp.learning_rate = 0.1;
  auto state = make_optimizer_state(OptimizerKind::Sgd, hp, 2);
  auto [next, after] = optimizer_step(std::move(state),
                                      std::vector<double>{0.0, 0.0},
                                      std::vector<double>{2.0, -4.0});
  CHECK(next[0] == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(0.4).epsilon(1e-15));
  (void)after;
}

TEST_CASE("RMSProp accumulates squared gradients and stays finite") {
  auto state = make_optimizer_state(OptimizerKind::RmsProp, OptimizerHyperparams{}, 1);
  std::vector<double> params{0.0};
  for (int t = 0; t < 10; ++t) {
    auto [next, after] = optimizer_step(std::move(state), params,
                                        std::vector<double>{1.0});
    params = next;
    state = std::move(after);
    CHECK(state.v[0] > 0.0);
    CHECK(std::isfinite(params[0]));
  }
  CHECK(params[0] < 0.0);
}

TEST_CASE("optimizer_step rejects shape mismatches") {
  auto state = make_optimizer_state(OptimizerKind::Adam, OptimizerHyperparams{}, 2);
  CHECK_THROWS_AS(optimizer_step(std::move(state), std::vector<double>{0.0, 0.0},
                                 std::vector<double>{1.0}),
                  std::invalid_argument);
}

TEST_CASE("full-set minibatch gradient equals the plain gradient") {
  std::mt19937_64 grng(55);
  auto assignment = OutcomeAssignment::default_assignment();
  CostConfig cost{25.0, 2.0, 1.0};
  auto ensemble = standard_ensemble({0.1, 0.5, 0.9}, {kInvSqrt2, 0.4});
  auto theta = random_angles(grng);

  Rng rng(11);
  auto batch_grad = minibatch_gradient(theta, ensemble, cost, assignment,
                                       10, 1e-3, 0, rng);
  auto f = [&](const std::vector<double>& x) {
    return cost_j1(CircuitParams{x}, ensemble, cost, assignment);
  };
  auto full_grad = forward_diff_gradient(f, theta, 1e-3);
  REQUIRE(batch_grad.size() == full_grad.size());
  for (std::size_t j = 0; j < full_grad.size(); ++j)
    CHECK(batch_grad[j] == full_grad[j]);  // bitwise: same evaluation path
}

TEST_CASE("minibatch gradients are reproducible and unbiased") {
  std::mt19937_64 grng(56);
  auto assignment = OutcomeAssignment::default_assignment();
  CostConfig cost{25.0, 2.0, 1.0};

  std::vector<double> a_params, b_params;
  Rng data_rng(77);
  for (int i = 0; i < 100; ++i) {
    a_params.push_back(uniform_double(data_rng));
    b_params.push_back(kInvSqrt2);
  }
  auto ensemble = standard_ensemble(a_params, b_params);
  auto theta = random_angles(grng);

  Rng r1(909), r2(909);
  auto g1 = minibatch_gradient(theta, ensemble, cost, assignment, 50, 1e-3, 0, r1);
  auto g2 = minibatch_gradient(theta, ensemble, cost, assignment, 50, 1e-3, 0, r2);
  for (std::size_t j = 0; j < g1.size(); ++j) CHECK(g1[j] == g2[j]);

  auto f = [&](const std::vector<double>& x) {
    return cost_j1(CircuitParams{x}, ensemble, cost, assignment);
  };
  auto full = forward_diff_gradient(f, theta, 1e-3);

  int reps = 200;
  std::vector<double> mean(full.size(), 0.0), m2(full.size(), 0.0);
  Rng rng(31337);
  for (int r = 0; r < reps; ++r) {
    auto g = minibatch_gradient(theta, ensemble, cost, assignment, 50, 1e-3, 0, rng);
    for (std::size_t j = 0; j < g.size(); ++j) {
      double delta = g[j] - mean[j];
      mean[j] += delta / double(r + 1);
      m2[j] += delta * (g[j] - mean[j]);
    }
  }
  for (std::size_t j = 0; j < full.size(); ++j) {
    double se = std::sqrt(m2[j] / double(reps - 1)) / std::sqrt(double(reps));
    // the 1e-9 floor absorbs forward-difference rounding noise on
    // components whose minibatch gradients are effectively constant
    CHECK(std::abs(mean[j] - full[j]) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("select_minibatch keeps the full set when the batch is large enough") {
  auto ensemble = standard_ensemble({0.1, 0.2}, {0.3, 0.4, 0.5});
  Rng rng(1);
  auto batch = select_minibatch(ensemble, 3, rng);
  REQUIRE(batch.size() == 2);
  CHECK(batch[0].params == ensemble[0].params);
  CHECK(batch[1].params == ensemble[1].params);

  auto sub = select_minibatch(ensemble, 2, rng);
  CHECK(sub[0].params.size() == 2);
  CHECK(sub[1].params.size() == 2);
  for (double p : sub[1].params)
    CHECK((p == 0.3 || p == 0.4 || p == 0.5));
}

TEST_CASE("train with zero iterations returns the random initialization") {
  TrainConfig cfg = full_range_config(25.0, 2.0, 424242);
  cfg.max_iterations = 0;
  TrainResult result = train(cfg);
  CHECK(result.trajectory.empty());
  CHECK(result.error.empty());
  REQUIRE(result.final_params.size() == std::size_t(kParamCount));
  for (double angle : result.final_params) {
    CHECK(angle >= 0.0);
    CHECK(angle < 2 * kPi);
  }
  CHECK(result.final_j1_exact > 0.0);
}

TEST_CASE("train is deterministic in the seed") {
  TrainConfig cfg = full_range_config(25.0, 2.0, 777);
  cfg.max_iterations = 25;
  TrainResult r1 = train(cfg);
  TrainResult r2 = train(cfg);
  CHECK(r1.final_params == r2.final_params);
  REQUIRE(r1.trajectory.size() == r2.trajectory.size());
  for (std::size_t i = 0; i < r1.trajectory.size(); ++i) {
    CHECK(r1.trajectory[i].j1_estimate == r2.trajectory[i].j1_estimate);
    CHECK(r1.trajectory[i].j1_exact == r2.trajectory[i].j1_exact);
  }

  cfg.seed = 778;
  TrainResult r3 = train(cfg);
  CHECK(r1.final_params != r3.final_params);
}

TEST_CASE("train aborts with a numeric error on invalid family parameters") {
  TrainConfig cfg = full_range_config(25.0, 2.0, 5);
  cfg.max_iterations = 10;
  cfg.train_ensemble[0].params[0] = 2.0;  // sqrt(1 - 4) poisons the cost
  TrainResult result = train(cfg);
  CHECK(!result.error.empty());
  CHECK(result.trajectory.size() < 10);
}

TEST_CASE("training reduces the exact cost on a short run") {
  TrainConfig cfg = full_range_config(20.0, 2.0, 20240817);
  cfg.max_iterations = 300;
  TrainResult result = train(cfg);
  REQUIRE(result.error.empty());
  REQUIRE(result.trajectory.size() == 300);
  CHECK(result.final_j1_exact < result.trajectory.front().j1_exact);
  // the trajectory records the training-set metrics partition
  for (const auto& point : result.trajectory) {
    double total = point.train.p_suc + point.train.p_err + point.train.p_inc;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cost moving average falls from iteration 100 to 5000") {
  // Training-progress check on the full-range task: the 500-iteration
  // moving average of the exact cost at the end is below its value at
  // iteration 100 for at least 9 of 10 seeds.
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TrainConfig cfg = full_range_config(20.0, 2.0, seed);
    cfg.max_iterations = 5000;
    TrainResult result = train(cfg);
    REQUIRE(result.error.empty());
    auto ma = [&](int center) {
      int lo = std::max(0, center - 250);
      int hi = std::min<int>(int(result.trajectory.size()), center + 250);
      double sum = 0.0;
      for (int i = lo; i < hi; ++i) sum += result.trajectory[std::size_t(i)].j1_exact;
      return sum / double(hi - lo);
    };
    if (ma(4999) < ma(100)) ++improved;
  }
  CHECK(improved >= 9);
}
