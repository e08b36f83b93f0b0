/**
 * @file statevector.hpp
 * @brief Dense statevector simulation: gate application, measurement
 *        collapse, and probability queries.
 *
 * Basis ordering: qubit 0 is the least significant bit of the basis index.
 */

#pragma once

#include "qdbg/flatten.hpp"
#include "qdbg/gates.hpp"
#include "qdbg/source.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qdbg {

/// Deterministic counter-based random source for measurement outcomes.
/// Identical seeds produce identical outcome sequences on every platform.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  /// splitmix64 of (seed, counter); uniform in [0, 1).
  double uniform() {
    std::uint64_t z = seed + (++counter) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) %
           n;
  }
};

struct SimLimits {
  int max_qubits = 24;
};

class Statevector {
public:
  Statevector() : Statevector(0) {}

  explicit Statevector(int num_qubits)
      : num_qubits_(num_qubits),
        amplitudes_(std::size_t{1} << num_qubits, 0.0) {
    amplitudes_[0] = 1.0;
  }

  [[nodiscard]] int num_qubits() const { return num_qubits_; }
  [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
  [[nodiscard]] const std::vector<std::complex<double>>& amplitudes() const {
    return amplitudes_;
  }
  [[nodiscard]] std::complex<double> amplitude(std::size_t basis) const {
    return amplitudes_[basis];
  }
  std::vector<std::complex<double>>& mutable_amplitudes() {
    return amplitudes_;
  }

  [[nodiscard]] double norm() const {
    double sum = 0.0;
    for (const auto& amp : amplitudes_) {
      sum += std::norm(amp);
    }
    return std::sqrt(sum);
  }

  /// P(qubit = 1) summed over all basis states.
  [[nodiscard]] double probability_one(int qubit) const {
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
      if ((i & bit) != 0) {
        p += std::norm(amplitudes_[i]);
      }
    }
    return p;
  }

  void apply_unitary(Op op, double angle, std::span<const int> targets,
                     std::span<const int> controls) {
    std::size_t control_mask = 0;
    for (const int c : controls) {
      control_mask |= std::size_t{1} << c;
    }
    if (op == Op::Swap) {
      apply_swap(targets[0], targets[1], control_mask);
      return;
    }
    apply_single(gate_matrix(op, angle), targets[0], control_mask);
  }

  /// Collapses the qubit per the Born rule and returns the outcome bit.
  int measure(int qubit, RngState& rng) {
    const double p1 = probability_one(qubit);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    const double p = outcome == 1 ? p1 : 1.0 - p1;
    if (!(p > 1e-300) || !std::isfinite(p)) {
      throw NumericalError("measurement collapse onto a zero-probability branch");
    }
    const double scale = 1.0 / std::sqrt(p);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
      const bool is_one = (i & bit) != 0;
      if (is_one == (outcome == 1)) {
        amplitudes_[i] *= scale;
      } else {
        amplitudes_[i] = 0.0;
      }
    }
    return outcome;
  }

  /// Measures, then flips back to |0> if the outcome was 1.
  void reset(int qubit, RngState& rng) {
    if (measure(qubit, rng) == 1) {
      const int target[] = {qubit};
      apply_unitary(Op::X, 0.0, target, {});
    }
  }

private:
  void apply_single(const std::array<std::complex<double>, 4>& u, int target,
                    std::size_t control_mask) {
    const std::size_t bit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
      if ((i & bit) != 0 || (i & control_mask) != control_mask) {
        continue;
      }
      const std::size_t j = i | bit;
      const std::complex<double> a0 = amplitudes_[i];
      const std::complex<double> a1 = amplitudes_[j];
      amplitudes_[i] = u[0] * a0 + u[1] * a1;
      amplitudes_[j] = u[2] * a0 + u[3] * a1;
    }
  }

  void apply_swap(int a, int b, std::size_t control_mask) {
    const std::size_t bit_a = std::size_t{1} << a;
    const std::size_t bit_b = std::size_t{1} << b;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
      if ((i & bit_a) == 0 || (i & bit_b) != 0 ||
          (i & control_mask) != control_mask) {
        continue;
      }
      std::swap(amplitudes_[i], amplitudes_[(i ^ bit_a) | bit_b]);
    }
  }

  int num_qubits_;
  std::vector<std::complex<double>> amplitudes_;
};

/// All-zeros initial state. Throws ResourceLimitError above the ceiling.
inline Statevector init_state(int num_qubits, const SimLimits& limits = {}) {
  if (num_qubits > limits.max_qubits) {
    throw ResourceLimitError(
        "program needs " + std::to_string(num_qubits) +
        " qubits but the simulator ceiling is " +
        std::to_string(limits.max_qubits) + " (raise with --max-qubits)");
  }
  return Statevector(num_qubits);
}

inline double probability_one(const Statevector& state, int qubit) {
  return state.probability_one(qubit);
}

/// Applies one flattened instruction. Measurement outcomes are written into
/// classical_bits; barrier is the identity.
inline void apply_instruction(Statevector& state, const FlatInstruction& instr,
                              RngState& rng, std::vector<int>& classical_bits) {
  switch (instr.op) {
  case Op::Measure: {
    const int outcome = state.measure(instr.targets[0], rng);
    classical_bits[instr.classical_targets[0]] = outcome;
    return;
  }
  case Op::Reset:
    state.reset(instr.targets[0], rng);
    return;
  case Op::Barrier:
    return;
  default:
    state.apply_unitary(instr.op, instr.angle, instr.targets, instr.controls);
  }
}

} // namespace qdbg
