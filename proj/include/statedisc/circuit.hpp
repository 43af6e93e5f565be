// Fixed 4-qubit discriminator circuit.
//
// Register layout: q0 = ancilla 1, q1 = ancilla 2, q2 q3 = data. The input
// is prepared as |0>|0>(x)|psi> with psi a 2-qubit data state.
//
// Gate blocks, in order:
//   (i)   general two-qubit unitary on the data qubits (15 angles via the
//         canonical three-CNOT template),
//   (ii)  uniformly controlled Ry on ancilla 1 controlled by the data
//         qubits (4 angles); ancilla 1's measurement is deferred to the end,
//   (iii) multiplexed phase block: a uniformly controlled Rz on ancilla 1
//         controlled by the data qubits (4 angles), expressed as
//         Rx(-pi/2) . UC-Ry . Rx(+pi/2) on the ancilla. As an operator this
//         applies a phase pattern to the data register conditioned on
//         ancilla 1,
//   (iv)  second two-qubit unitary on the data qubits (15 angles) followed
//         by a uniformly controlled Ry on ancilla 2 controlled by
//         (ancilla 1, data) (8 angles).
//
// Both ancillas are measured at the end. The outcome label m_{i2 i1} packs
// i1 = ancilla-1 bit, i2 = ancilla-2 bit; label index L = (i2 << 1) | i1.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "statedisc/simulator.hpp"

namespace statedisc {

inline constexpr int kNumQubits = 4;
inline constexpr int kAncilla1 = 0;
inline constexpr int kAncilla2 = 1;
inline constexpr int kData0 = 2;
inline constexpr int kData1 = 3;

// Trainable angle count of the full topology: 15 + 4 + 4 + 15 + 8.
inline constexpr int kParamCount = 46;

// Outcome label indices, L = (i2 << 1) | i1.
inline constexpr int kOutcomeM00 = 0;
inline constexpr int kOutcomeM01 = 1;
inline constexpr int kOutcomeM10 = 2;
inline constexpr int kOutcomeM11 = 3;

struct CircuitParams {
  std::vector<double> angles;  // length kParamCount
};

class DiscriminatorCircuit {
 public:
  const CircuitParams& params() const { return params_; }
  std::span<const Gate> gates() const { return gates_; }

  // Gates [0, first_measurement_cut) precede the deferred measurement of
  // ancilla 1; the rest act after it and condition on it only through
  // diagonal or control dependence.
  std::size_t first_measurement_cut() const { return cut_; }

 private:
  friend DiscriminatorCircuit build_discriminator_circuit(CircuitParams);
  CircuitParams params_;
  std::vector<Gate> gates_;
  std::size_t cut_ = 0;
};

// Throws invalid_argument unless params.angles.size() == kParamCount.
DiscriminatorCircuit build_discriminator_circuit(CircuitParams params);

// Row-major square complex matrix.
struct DenseMatrix {
  std::size_t dim = 0;
  std::vector<cplx> entries;

  explicit DenseMatrix(std::size_t d = 0) : dim(d), entries(d * d, cplx(0, 0)) {}
  cplx& at(std::size_t r, std::size_t c) { return entries[r * dim + c]; }
  const cplx& at(std::size_t r, std::size_t c) const { return entries[r * dim + c]; }
};

// Product of the gate sequence as a dense matrix; empty sequence gives the
// identity.
DenseMatrix unitary_of_gates(std::span<const Gate> gates, int num_qubits);

DenseMatrix circuit_unitary(const DiscriminatorCircuit& circuit);

// Outcome probabilities over the four labels, indexed m00, m01, m10, m11.
// The input must be a normalized 2-qubit data state.
OutcomeDistribution outcome_probabilities(const DiscriminatorCircuit& circuit,
                                          const StateVector& data_state);

// Ordered gate records of the fixed topology: one line per gate with its
// kind, qubits, and parameter indices. Lines starting with '#' or '--' are
// commentary; record lines align one-to-one with gates().
std::string describe_topology();

namespace detail {

// Columns of the circuit unitary restricted to data inputs: col[j] holds
// U |0,0,j>. Enough to evaluate any data state without the full 16x16.
struct TransferBlock {
  std::array<std::array<cplx, 16>, 4> col;
};

void compute_transfer_block(std::span<const double> angles, TransferBlock& out);

// Label-bucketed outcome probabilities of data state psi under the block.
std::array<double, 4> label_probabilities(const TransferBlock& block,
                                          std::span<const cplx> psi);

}  // namespace detail

}  // namespace statedisc
