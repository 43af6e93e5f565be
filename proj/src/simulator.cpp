#include "statedisc/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace statedisc {

namespace {

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

void check_qubit(int q, int n, const char* what) {
  if (q < 0 || q >= n)
    throw std::out_of_range(std::string(what) + " qubit " + std::to_string(q) +
                            " out of range for " + std::to_string(n) + " qubits");
}

}  // namespace

Mat2 rx_matrix(double theta) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)};
}

Mat2 ry_matrix(double theta) {
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
}

Mat2 rz_matrix(double theta) {
  return {std::exp(cplx(0, -theta / 2)), cplx(0, 0), cplx(0, 0),
          std::exp(cplx(0, theta / 2))};
}

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

StateVector StateVector::zero_state(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 24)
    throw std::invalid_argument("qubit count must be in [1, 24]");
  std::vector<cplx> amps(std::size_t{1} << num_qubits, cplx(0, 0));
  amps[0] = 1.0;
  return StateVector(std::move(amps), num_qubits);
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amplitudes) {
  if (!is_power_of_two(amplitudes.size()))
    throw std::invalid_argument("amplitude count must be a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < amplitudes.size()) ++n;
  if (n < 1 || n > 24) throw std::invalid_argument("qubit count must be in [1, 24]");
  double nrm = 0.0;
  for (const auto& a : amplitudes) nrm += std::norm(a);
  nrm = std::sqrt(nrm);
  if (std::abs(nrm - 1.0) > 1e-9)
    throw std::invalid_argument("state is not normalized: norm = " + std::to_string(nrm));
  return StateVector(std::move(amplitudes), n);
}

double StateVector::norm() const {
  double nrm = 0.0;
  for (const auto& a : amps_) nrm += std::norm(a);
  return std::sqrt(nrm);
}

namespace detail {

double unitarity_deviation(const Mat2& m) {
  // max-abs entry of M^dag M - I
  cplx g00 = std::conj(m[0]) * m[0] + std::conj(m[2]) * m[2];
  cplx g01 = std::conj(m[0]) * m[1] + std::conj(m[2]) * m[3];
  cplx g10 = std::conj(m[1]) * m[0] + std::conj(m[3]) * m[2];
  cplx g11 = std::conj(m[1]) * m[1] + std::conj(m[3]) * m[3];
  double dev = std::abs(g00 - 1.0);
  dev = std::max(dev, std::abs(g01));
  dev = std::max(dev, std::abs(g10));
  dev = std::max(dev, std::abs(g11 - 1.0));
  return dev;
}

void apply_single_qubit_inplace(std::span<cplx> amps, int n, const Mat2& m, int target) {
  std::size_t step = std::size_t{1} << (n - 1 - target);
  std::size_t block = step << 1;
  for (std::size_t base = 0; base < amps.size(); base += block)
    for (std::size_t i = base; i < base + step; ++i) {
      cplx a0 = amps[i], a1 = amps[i + step];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + step] = m[2] * a0 + m[3] * a1;
    }
}

void apply_cnot_inplace(std::span<cplx> amps, int n, int control, int target) {
  std::size_t cmask = std::size_t{1} << (n - 1 - control);
  std::size_t tmask = std::size_t{1} << (n - 1 - target);
  for (std::size_t i = 0; i < amps.size(); ++i)
    if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
}

void apply_ucry_inplace(std::span<cplx> amps, int n, std::span<const double> angles,
                        std::span<const int> controls, int target) {
  std::size_t tmask = std::size_t{1} << (n - 1 - target);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & tmask) continue;
    std::size_t k = 0;
    for (int c : controls) k = (k << 1) | ((i >> (n - 1 - c)) & 1);
    double half = angles[k] / 2;
    double co = std::cos(half), si = std::sin(half);
    cplx a0 = amps[i], a1 = amps[i | tmask];
    amps[i] = co * a0 - si * a1;
    amps[i | tmask] = si * a0 + co * a1;
  }
}

std::vector<double> clamp_and_normalize(std::vector<double> probs) {
  double total = 0.0;
  for (double& p : probs) {
    if (p < 0) {
      if (p < -1e-12) throw std::invalid_argument("negative probability beyond tolerance");
      p = 0.0;
    }
    total += p;
  }
  if (std::abs(total - 1.0) >= 1e-9)
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
  if (total != 1.0)
    for (double& p : probs) p /= total;
  return probs;
}

}  // namespace detail

StateVector apply_single_qubit_gate(const StateVector& state, const Mat2& matrix,
                                    int target) {
  check_qubit(target, state.num_qubits(), "target");
  if (detail::unitarity_deviation(matrix) > 1e-10)
    throw std::invalid_argument("single-qubit matrix is not unitary");
  StateVector out = state;
  detail::apply_single_qubit_inplace(out.amps_, out.num_qubits_, matrix, target);
  return out;
}

StateVector apply_cnot(const StateVector& state, int control, int target) {
  check_qubit(control, state.num_qubits(), "control");
  check_qubit(target, state.num_qubits(), "target");
  if (control == target) throw std::invalid_argument("cnot control equals target");
  StateVector out = state;
  detail::apply_cnot_inplace(out.amps_, out.num_qubits_, control, target);
  return out;
}

StateVector apply_uniformly_controlled_ry(const StateVector& state,
                                          std::span<const double> angles,
                                          std::span<const int> controls,
                                          int target) {
  int n = state.num_qubits();
  check_qubit(target, n, "target");
  for (int c : controls) {
    check_qubit(c, n, "control");
    if (c == target) throw std::invalid_argument("control equals target");
  }
  for (std::size_t i = 0; i < controls.size(); ++i)
    for (std::size_t j = i + 1; j < controls.size(); ++j)
      if (controls[i] == controls[j])
        throw std::invalid_argument("duplicate control qubit");
  if (angles.size() != (std::size_t{1} << controls.size()))
    throw std::invalid_argument("angle list length must be 2^|controls|");
  StateVector out = state;
  detail::apply_ucry_inplace(out.amps_, out.num_qubits_, angles, controls, target);
  return out;
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
  return std::visit(
      [&](const auto& g) -> StateVector {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, SingleQubitGate>)
          return apply_single_qubit_gate(state, g.matrix, g.target);
        else if constexpr (std::is_same_v<T, CnotGate>)
          return apply_cnot(state, g.control, g.target);
        else
          return apply_uniformly_controlled_ry(state, g.angles, g.controls, g.target);
      },
      gate);
}

OutcomeDistribution measure_marginal(const StateVector& state,
                                     std::span<const int> qubits) {
  int n = state.num_qubits();
  if (qubits.empty()) throw std::invalid_argument("empty measurement set");
  for (int q : qubits) check_qubit(q, n, "measured");
  for (std::size_t i = 0; i < qubits.size(); ++i)
    for (std::size_t j = i + 1; j < qubits.size(); ++j)
      if (qubits[i] == qubits[j]) throw std::invalid_argument("duplicate measured qubit");

  std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    std::size_t k = 0;
    for (int q : qubits) k = (k << 1) | ((i >> (n - 1 - q)) & 1);
    probs[k] += std::norm(amps[i]);
  }
  OutcomeDistribution dist;
  dist.probs = detail::clamp_and_normalize(std::move(probs));
  dist.qubits.assign(qubits.begin(), qubits.end());
  return dist;
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("fidelity of states with different dimension");
  cplx ip(0, 0);
  for (std::size_t i = 0; i < a.dim(); ++i) ip += std::conj(a.amp(i)) * b.amp(i);
  return std::abs(ip);
}

}  // namespace statedisc
