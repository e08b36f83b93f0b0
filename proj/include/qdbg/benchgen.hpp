/**
 * @file benchgen.hpp
 * @brief Deterministic generators for the benchmark-style corpus programs
 *        (Deutsch-Jozsa and seeded random circuits).
 */

#pragma once

#include "qdbg/flatten.hpp"
#include "qdbg/parser.hpp"
#include "qdbg/printer.hpp"
#include "qdbg/runner.hpp"
#include "qdbg/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace qdbg {

/// Deutsch-Jozsa on `data_qubits` data qubits plus one ancilla. The balanced
/// oracle touches qubits 0..data_qubits-4 through the ancilla; the last three
/// qubits never enter the oracle, so the final equality assertion over them
/// has a small cone of influence.
inline std::string deutsch_jozsa_source(int data_qubits = 16) {
  std::ostringstream out;
  out << "qreg q[" << data_qubits << "];\n";
  out << "qreg anc[1];\n";
  out << "creg c[" << data_qubits << "];\n";
  out << "x anc;\n";
  out << "h anc;\n";
  for (int i = 0; i < data_qubits; ++i) {
    out << "h q[" << i << "];\n";
  }
  out << "barrier q, anc;\n";
  for (int i = 0; i < data_qubits - 3; ++i) {
    out << "cx q[" << i << "], anc;\n";
  }
  out << "barrier q, anc;\n";
  for (int i = 0; i < data_qubits; ++i) {
    out << "h q[" << i << "];\n";
  }
  out << "assert-eq 0.999, q[" << (data_qubits - 3) << "], q["
      << (data_qubits - 2) << "], q[" << (data_qubits - 1)
      << "] { 1, 0, 0, 0, 0, 0, 0, 0 }\n";
  for (int i = 0; i < data_qubits; ++i) {
    out << "measure q[" << i << "] -> c[" << i << "];\n";
  }
  return out.str();
}

namespace detail {

/// Dominant eigenvector of a small density matrix by power iteration.
/// Deterministic and independent of any LAPACK backend.
inline std::vector<std::complex<double>>
dominant_eigenvector(const Eigen::MatrixXcd& rho) {
  const auto dim = rho.rows();
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(dim, 1.0);
  v(0) += 0.5; // break symmetric starting points
  v.normalize();
  for (int iter = 0; iter < 500; ++iter) {
    v = rho * v;
    const double norm = v.norm();
    if (norm < 1e-12) {
      v = Eigen::VectorXcd::Unit(dim, 0);
      break;
    }
    v /= norm;
  }
  // Fix the global phase: make the largest component real positive.
  Eigen::Index max_row = 0;
  v.cwiseAbs().maxCoeff(&max_row);
  const std::complex<double> phase = v(max_row) / std::abs(v(max_row));
  v /= phase;
  std::vector<std::complex<double>> result(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    result[static_cast<std::size_t>(i)] = v(i);
  }
  return result;
}

} // namespace detail

/// Seeded random circuit in the style of benchmark-library random programs.
/// Three phases: a preparation phase where each qubit comes alive (h or x)
/// and is usually consumed by a controlled gate on the next line, a middle
/// phase mixing reset/re-prepare blocks into random gates, and a dense
/// scrambling tail. Controls always sit on qubits whose one-probability is
/// away from zero, so the unmutated program never trips the control-value
/// analysis. Ends with an equality assertion over qubits 0..2 whose
/// reference is the dominant eigenvector of the baseline's reduced state
/// (threshold just below the baseline similarity, so the baseline passes),
/// followed by measurements.
inline std::string random_circuit_source(int num_qubits, int num_gates,
                                         std::uint64_t seed) {
  RngState rng{seed, 0};
  std::ostringstream body;

  int emitted = 0;
  const auto emit = [&](const std::string& text) {
    body << text << "\n";
    ++emitted;
  };
  const auto qubit = [&](int exclude = -1) {
    int q = static_cast<int>(rng.uniform_index(num_qubits));
    if (q == exclude) {
      q = (q + 1) % num_qubits;
    }
    return q;
  };

  // Preparation: each qubit comes alive; preparations of the later qubits
  // feed a controlled gate onto one of the eventually asserted qubits on the
  // very next line, so a dropped preparation leaves that control dead and is
  // visible right where it happened.
  const auto asserted_qubit = [&]() {
    return static_cast<int>(rng.uniform_index(3));
  };
  for (int q = 0; q < num_qubits; ++q) {
    emit((rng.uniform() < 0.3 ? "x q[" : "h q[") + std::to_string(q) + "];");
    if (q < 3) {
      // Kick the asserted qubits off the X eigenstates so controlled gates
      // onto them genuinely change the state.
      emit("t q[" + std::to_string(q) + "];");
    } else {
      emit("cx q[" + std::to_string(q) + "], q[" + std::to_string(asserted_qubit()) +
           "];");
    }
  }

  // Middle: reset/re-prepare blocks between random filler gates. The
  // re-preparing h is the fragile step: without it the next control is dead.
  // Asserted qubits are never reset, so injected differences survive into
  // the final marginal.
  const int middle_end = num_gates / 2;
  while (emitted < middle_end) {
    const double roll = rng.uniform();
    if (roll < 0.5) {
      const int k = 3 + static_cast<int>(rng.uniform_index(num_qubits - 3));
      emit("reset q[" + std::to_string(k) + "];");
      emit("h q[" + std::to_string(k) + "];");
      emit("cx q[" + std::to_string(k) + "], q[" +
           std::to_string(asserted_qubit()) + "];");
    } else if (roll < 0.62) {
      const int k = 3 + static_cast<int>(rng.uniform_index(num_qubits - 3));
      emit("reset q[" + std::to_string(k) + "];");
      emit("cx q[" + std::to_string(asserted_qubit()) + "], q[" +
           std::to_string(k) + "];");
      emit("h q[" + std::to_string(k) + "];");
    } else if (roll < 0.72) {
      const int a = qubit();
      emit("cz q[" + std::to_string(a) + "], q[" + std::to_string(qubit(a)) +
           "];");
    } else if (roll < 0.82) {
      const int a = qubit();
      emit("cx q[" + std::to_string(a) + "], q[" + std::to_string(qubit(a)) +
           "];");
    } else if (roll < 0.9) {
      emit("t q[" + std::to_string(qubit()) + "];");
    } else {
      emit("s q[" + std::to_string(qubit()) + "];");
    }
  }

  // Scrambling: dense random gates over the whole register, no resets.
  while (emitted < num_gates) {
    const double roll = rng.uniform();
    const int a = qubit();
    if (roll < 0.35) {
      emit("cx q[" + std::to_string(qubit(a)) + "], q[" + std::to_string(a) +
           "];");
    } else if (roll < 0.45) {
      const int b = qubit(a);
      int c = static_cast<int>(rng.uniform_index(num_qubits));
      while (c == a || c == b) {
        c = (c + 1) % num_qubits;
      }
      emit("ccx q[" + std::to_string(a) + "], q[" + std::to_string(b) +
           "], q[" + std::to_string(c) + "];");
    } else if (roll < 0.6) {
      emit("h q[" + std::to_string(a) + "];");
    } else if (roll < 0.75) {
      emit("t q[" + std::to_string(a) + "];");
    } else if (roll < 0.85) {
      emit("s q[" + std::to_string(a) + "];");
    } else {
      emit("x q[" + std::to_string(a) + "];");
    }
  }

  std::ostringstream out;
  out << "qreg q[" << num_qubits << "];\n";
  out << "creg c[" << num_qubits << "];\n";
  out << body.str();

  // Reference for the final assertion: simulate the gate part and take the
  // dominant eigenvector of the 3-qubit marginal.
  const Program partial = parse(out.str());
  const FlatProgram flat = flatten(partial);
  SimLimits limits;
  limits.max_qubits = std::max(24, num_qubits);
  const ExecutionTrace trace = run(flat, 0, limits);
  const int asserted[] = {0, 1, 2};
  const ReducedDensityMatrix rdm =
      reduced_density_matrix(trace.final_state, asserted);
  const std::vector<std::complex<double>> reference =
      detail::dominant_eigenvector(rdm.matrix);
  Eigen::VectorXcd phi(static_cast<Eigen::Index>(reference.size()));
  for (std::size_t i = 0; i < reference.size(); ++i) {
    phi(static_cast<Eigen::Index>(i)) = reference[i];
  }
  const double baseline_similarity =
      std::sqrt(fidelity_with_pure(rdm, phi));
  const double threshold =
      std::max(0.0, std::floor((baseline_similarity - 0.005) * 1e4) / 1e4);

  char threshold_text[32];
  std::snprintf(threshold_text, sizeof(threshold_text), "%.4f", threshold);
  out << "assert-eq " << threshold_text << ", q[0], q[1], q[2] { ";
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << detail::format_amplitude(reference[i]);
  }
  out << " }\n";
  for (int i = 0; i < num_qubits; ++i) {
    out << "measure q[" << i << "] -> c[" << i << "];\n";
  }
  return out.str();
}

} // namespace qdbg
