// Statevector simulator for small registers.
//
// Bit convention: qubit 0 is the most significant bit of a basis index, so
// for an n-qubit register the bit of qubit q in index i is (i >> (n-1-q)) & 1.
// All gate operations are pure: they take a state by const reference and
// return the evolved state.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace statedisc {

using cplx = std::complex<double>;

// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Mat2 = std::array<cplx, 4>;

Mat2 rx_matrix(double theta);
Mat2 ry_matrix(double theta);
Mat2 rz_matrix(double theta);
Mat2 mat2_mul(const Mat2& a, const Mat2& b);

class StateVector {
 public:
  // |0...0> on n qubits. n must be in [1, 24].
  static StateVector zero_state(int num_qubits);

  // Takes ownership of the amplitudes. The length must be a power of two
  // and the norm within 1e-9 of 1, else an invalid_argument is thrown.
  static StateVector from_amplitudes(std::vector<cplx> amplitudes);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& amp(std::size_t i) const { return amps_.at(i); }
  double norm() const;

 private:
  StateVector(std::vector<cplx> amps, int n) : amps_(std::move(amps)), num_qubits_(n) {}
  std::vector<cplx> amps_;
  int num_qubits_ = 0;

  friend StateVector apply_single_qubit_gate(const StateVector&, const Mat2&, int);
  friend StateVector apply_cnot(const StateVector&, int, int);
  friend StateVector apply_uniformly_controlled_ry(const StateVector&,
                                                   std::span<const double>,
                                                   std::span<const int>, int);
};

struct SingleQubitGate {
  Mat2 matrix;
  int target = 0;
};

struct CnotGate {
  int control = 0;
  int target = 0;
};

// angles[k] is the Ry rotation applied to `target` when the control register
// reads bitstring k, with the first-listed control the most significant bit
// of k. k = 0 means every control is 0. The angle list length must be
// exactly 2^|controls|.
struct UniformlyControlledRyGate {
  std::vector<double> angles;
  std::vector<int> controls;
  int target = 0;
};

using Gate = std::variant<SingleQubitGate, CnotGate, UniformlyControlledRyGate>;

// The matrix must be unitary within 1e-10 (max-abs deviation of M^dag M
// from identity), else invalid_argument.
StateVector apply_single_qubit_gate(const StateVector& state, const Mat2& matrix,
                                    int target);

// control != target, both in range, else thrown.
StateVector apply_cnot(const StateVector& state, int control, int target);

StateVector apply_uniformly_controlled_ry(const StateVector& state,
                                          std::span<const double> angles,
                                          std::span<const int> controls,
                                          int target);

StateVector apply_gate(const StateVector& state, const Gate& gate);

// Marginal distribution over a measured qubit subset.
// probs is indexed by the outcome bitstring with the first-listed qubit as
// its most significant bit; `qubits` echoes that order.
struct OutcomeDistribution {
  std::vector<double> probs;
  std::vector<int> qubits;
};

// Entries are clamped at zero if within 1e-12 below it; the distribution is
// renormalized when the total deviates from 1 by less than 1e-9 and rejected
// (invalid_argument) otherwise.
OutcomeDistribution measure_marginal(const StateVector& state,
                                     std::span<const int> qubits);

// |<a|b>| for two states of equal dimension.
double fidelity(const StateVector& a, const StateVector& b);

namespace detail {

// In-place stride kernels over a raw amplitude span of 2^n entries. These
// skip argument validation; callers hold the invariants.
void apply_single_qubit_inplace(std::span<cplx> amps, int n, const Mat2& m, int target);
void apply_cnot_inplace(std::span<cplx> amps, int n, int control, int target);
void apply_ucry_inplace(std::span<cplx> amps, int n, std::span<const double> angles,
                        std::span<const int> controls, int target);

double unitarity_deviation(const Mat2& m);

std::vector<double> clamp_and_normalize(std::vector<double> probs);

}  // namespace detail

}  // namespace statedisc
