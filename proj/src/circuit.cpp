#include "statedisc/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace statedisc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The topology is emitted once through a visitor so the gate list, the
// fast evaluation path, and the textual description cannot drift apart.
// Visitor interface:
//   zyz(q, i0, i1, i2)   composed Rz(a[i0]) Ry(a[i1]) Rz(a[i2])
//   rot_rz(q, i), rot_ry(q, i)
//   rx_fixed(q, sign)    fixed Rx(sign * pi/2)
//   cnot(c, t)
//   ucry(target, controls, first, count)
//   measurement_cut()    marks the deferred measurement of ancilla 1
template <class V>
void walk_topology(V&& v) {
  auto two_qubit_block = [&](int qa, int qb, int p) {
    v.zyz(qa, p + 0, p + 1, p + 2);
    v.zyz(qb, p + 3, p + 4, p + 5);
    v.cnot(qb, qa);
    v.rot_rz(qa, p + 6);
    v.rot_ry(qb, p + 7);
    v.cnot(qa, qb);
    v.rot_ry(qb, p + 8);
    v.cnot(qb, qa);
    v.zyz(qa, p + 9, p + 10, p + 11);
    v.zyz(qb, p + 12, p + 13, p + 14);
  };

  two_qubit_block(kData0, kData1, 0);
  v.ucry(kAncilla1, std::vector<int>{kData0, kData1}, 15, 4);
  v.measurement_cut();
  v.rx_fixed(kAncilla1, -1);
  v.ucry(kAncilla1, std::vector<int>{kData0, kData1}, 19, 4);
  v.rx_fixed(kAncilla1, +1);
  two_qubit_block(kData0, kData1, 23);
  v.ucry(kAncilla2, std::vector<int>{kAncilla1, kData0, kData1}, 38, 8);
}

struct GateListBuilder {
  std::span<const double> a;
  std::vector<Gate> gates;
  std::size_t cut = 0;

  void zyz(int q, int i0, int i1, int i2) {
    Mat2 m = mat2_mul(rz_matrix(a[i0]), mat2_mul(ry_matrix(a[i1]), rz_matrix(a[i2])));
    gates.push_back(SingleQubitGate{m, q});
  }
  void rot_rz(int q, int i) { gates.push_back(SingleQubitGate{rz_matrix(a[i]), q}); }
  void rot_ry(int q, int i) { gates.push_back(SingleQubitGate{ry_matrix(a[i]), q}); }
  void rx_fixed(int q, int sign) {
    gates.push_back(SingleQubitGate{rx_matrix(sign * kPi / 2), q});
  }
  void cnot(int c, int t) { gates.push_back(CnotGate{c, t}); }
  void ucry(int target, std::vector<int> controls, int first, int count) {
    std::vector<double> angles(a.begin() + first, a.begin() + first + count);
    gates.push_back(UniformlyControlledRyGate{std::move(angles), std::move(controls), target});
  }
  void measurement_cut() { cut = gates.size(); }
};

struct Describer {
  std::string out;
  int idx = 0;

  void record(const std::string& kind, const std::string& qubits,
              const std::string& params, const std::string& note) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%02d %-6s %-11s %-11s %s\n", idx++,
                  kind.c_str(), qubits.c_str(), params.c_str(), note.c_str());
    out += buf;
  }
  void zyz(int q, int i0, int i1, int i2) {
    record("single", "q" + std::to_string(q),
           "p" + std::to_string(i0) + ",p" + std::to_string(i1) + ",p" + std::to_string(i2),
           "zyz");
  }
  void rot_rz(int q, int i) {
    record("single", "q" + std::to_string(q), "p" + std::to_string(i), "rz");
  }
  void rot_ry(int q, int i) {
    record("single", "q" + std::to_string(q), "p" + std::to_string(i), "ry");
  }
  void rx_fixed(int q, int sign) {
    record("single", "q" + std::to_string(q), "-",
           sign < 0 ? "rx(-pi/2)" : "rx(+pi/2)");
  }
  void cnot(int c, int t) {
    record("cnot", "q" + std::to_string(c) + "->q" + std::to_string(t), "-", "-");
  }
  void ucry(int target, std::vector<int> controls, int first, int count) {
    std::string qs = "q" + std::to_string(target) + "|";
    for (std::size_t i = 0; i < controls.size(); ++i) {
      if (i) qs += ",";
      qs += "q" + std::to_string(controls[i]);
    }
    record("ucry", qs,
           "p" + std::to_string(first) + "..p" + std::to_string(first + count - 1), "-");
  }
  void measurement_cut() { out += "-- deferred measurement of q0 (ancilla 1)\n"; }
};

struct BlockApplier {
  std::span<const double> a;
  detail::TransferBlock& block;

  void apply1(const Mat2& m, int q) {
    for (auto& col : block.col)
      detail::apply_single_qubit_inplace(col, kNumQubits, m, q);
  }
  void zyz(int q, int i0, int i1, int i2) {
    apply1(mat2_mul(rz_matrix(a[i0]), mat2_mul(ry_matrix(a[i1]), rz_matrix(a[i2]))), q);
  }
  void rot_rz(int q, int i) { apply1(rz_matrix(a[i]), q); }
  void rot_ry(int q, int i) { apply1(ry_matrix(a[i]), q); }
  void rx_fixed(int q, int sign) { apply1(rx_matrix(sign * kPi / 2), q); }
  void cnot(int c, int t) {
    for (auto& col : block.col) detail::apply_cnot_inplace(col, kNumQubits, c, t);
  }
  void ucry(int target, std::vector<int> controls, int first, int count) {
    for (auto& col : block.col)
      detail::apply_ucry_inplace(col, kNumQubits,
                                 std::span<const double>(a.data() + first, count),
                                 controls, target);
  }
  void measurement_cut() {}
};

}  // namespace

DiscriminatorCircuit build_discriminator_circuit(CircuitParams params) {
  if (params.angles.size() != static_cast<std::size_t>(kParamCount))
    throw std::invalid_argument("expected " + std::to_string(kParamCount) +
                                " angles, got " + std::to_string(params.angles.size()));
  GateListBuilder builder{params.angles, {}, 0};
  walk_topology(builder);
  DiscriminatorCircuit circuit;
  circuit.params_ = std::move(params);
  circuit.gates_ = std::move(builder.gates);
  circuit.cut_ = builder.cut;
  return circuit;
}

DenseMatrix unitary_of_gates(std::span<const Gate> gates, int num_qubits) {
  std::size_t d = std::size_t{1} << num_qubits;
  DenseMatrix u(d);
  std::vector<cplx> col(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(col.begin(), col.end(), cplx(0, 0));
    col[j] = 1.0;
    StateVector s = StateVector::from_amplitudes(col);
    for (const Gate& g : gates) s = apply_gate(s, g);
    for (std::size_t i = 0; i < d; ++i) u.at(i, j) = s.amp(i);
  }
  return u;
}

DenseMatrix circuit_unitary(const DiscriminatorCircuit& circuit) {
  return unitary_of_gates(circuit.gates(), kNumQubits);
}

OutcomeDistribution outcome_probabilities(const DiscriminatorCircuit& circuit,
                                          const StateVector& data_state) {
  if (data_state.num_qubits() != 2)
    throw std::invalid_argument("data state must have exactly 2 qubits");
  if (std::abs(data_state.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("data state is not normalized");
  std::vector<cplx> amps(16, cplx(0, 0));
  for (std::size_t j = 0; j < 4; ++j) amps[j] = data_state.amp(j);
  StateVector s = StateVector::from_amplitudes(std::move(amps));
  for (const Gate& g : circuit.gates()) s = apply_gate(s, g);
  // Ordered marginal (q1, q0) indexes outcomes as (i2 << 1) | i1, which is
  // exactly the m_{i2 i1} label order.
  std::vector<int> qubits{kAncilla2, kAncilla1};
  return measure_marginal(s, qubits);
}

std::string describe_topology() {
  Describer d;
  d.out = "# 4 qubits: q0 = ancilla 1, q1 = ancilla 2, q2 q3 = data\n";
  d.out += "# columns: record  kind  qubits  params  note\n";
  walk_topology(d);
  d.out += "-- measure q0, q1; outcome label m_{i2 i1} with i1 = q0, i2 = q1\n";
  return d.out;
}

namespace detail {

void compute_transfer_block(std::span<const double> angles, TransferBlock& out) {
  for (std::size_t j = 0; j < 4; ++j) {
    out.col[j].fill(cplx(0, 0));
    out.col[j][j] = 1.0;  // |0,0,j>: ancilla bits are the high bits
  }
  BlockApplier applier{angles, out};
  walk_topology(applier);
}

std::array<double, 4> label_probabilities(const TransferBlock& block,
                                          std::span<const cplx> psi) {
  std::array<double, 4> probs{0, 0, 0, 0};
  for (std::size_t i = 0; i < 16; ++i) {
    cplx amp = block.col[0][i] * psi[0] + block.col[1][i] * psi[1] +
               block.col[2][i] * psi[2] + block.col[3][i] * psi[3];
    std::size_t i1 = (i >> 3) & 1, i2 = (i >> 2) & 1;
    probs[(i2 << 1) | i1] += std::norm(amp);
  }
  return probs;
}

}  // namespace detail

}  // namespace statedisc
