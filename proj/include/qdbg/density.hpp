/**
 * @file density.hpp
 * @brief Reduced density matrices of statevector subsystems and the
 *        fidelity/separability primitives built on them.
 */

#pragma once

#include "qdbg/statevector.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdbg {

inline constexpr int kMaxSubsystemQubits = 12;

/// Subsystem state obtained by tracing out all other qubits.
/// Row/column bit j of the matrix corresponds to qubits[j] (qubits[0] is the
/// least significant bit, matching the statevector convention).
struct ReducedDensityMatrix {
  std::vector<int> qubits;
  Eigen::MatrixXcd matrix;

  [[nodiscard]] int dim() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

/// Spreads the low bits of `value` onto the given bit positions.
inline std::size_t scatter_bits(std::size_t value,
                                std::span<const int> positions) {
  std::size_t result = 0;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if ((value >> j) & 1U) {
      result |= std::size_t{1} << positions[j];
    }
  }
  return result;
}

/// Extracts the bits at the given positions of `value`, packed low-first.
inline std::size_t gather_bits(std::size_t value,
                               std::span<const int> positions) {
  std::size_t result = 0;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if ((value >> positions[j]) & 1U) {
      result |= std::size_t{1} << j;
    }
  }
  return result;
}

} // namespace detail

/// Partial trace of |psi><psi| over the complement of `qubits`.
inline ReducedDensityMatrix
reduced_density_matrix(const Statevector& state, std::span<const int> qubits) {
  const int k = static_cast<int>(qubits.size());
  if (k > kMaxSubsystemQubits) {
    throw ResourceLimitError("subsystem of " + std::to_string(k) +
                             " qubits exceeds the reduced-density limit of " +
                             std::to_string(kMaxSubsystemQubits));
  }
  std::vector<int> keep(qubits.begin(), qubits.end());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = i + 1; j < keep.size(); ++j) {
      if (keep[i] == keep[j]) {
        throw std::invalid_argument("subsystem qubits must be distinct");
      }
    }
  }
  std::vector<int> env;
  for (int q = 0; q < state.num_qubits(); ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      env.push_back(q);
    }
  }
  const std::size_t dim = std::size_t{1} << k;
  ReducedDensityMatrix rdm;
  rdm.qubits = keep;
  rdm.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(dim));
  const auto& amps = state.amplitudes();
  const std::size_t env_dim = std::size_t{1} << env.size();
  std::vector<std::size_t> base_index(dim);
  for (std::size_t e = 0; e < env_dim; ++e) {
    const std::size_t env_bits = detail::scatter_bits(e, env);
    for (std::size_t r = 0; r < dim; ++r) {
      base_index[r] = env_bits | detail::scatter_bits(r, keep);
    }
    for (std::size_t r = 0; r < dim; ++r) {
      const std::complex<double> ar = amps[base_index[r]];
      if (ar == std::complex<double>{}) {
        continue;
      }
      for (std::size_t c = 0; c < dim; ++c) {
        rdm.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +=
            ar * std::conj(amps[base_index[c]]);
      }
    }
  }
  return rdm;
}

/// Marginal probabilities of the subsystem: the diagonal of the reduced
/// density matrix, computed in a single pass over the full state.
inline std::vector<double> marginal_probabilities(const Statevector& state,
                                                  std::span<const int> qubits) {
  const int k = static_cast<int>(qubits.size());
  if (k > kMaxSubsystemQubits) {
    throw ResourceLimitError("subsystem of " + std::to_string(k) +
                             " qubits exceeds the reduced-density limit of " +
                             std::to_string(kMaxSubsystemQubits));
  }
  std::vector<double> probs(std::size_t{1} << k, 0.0);
  const auto& amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p != 0.0) {
      probs[detail::gather_bits(i, qubits)] += p;
    }
  }
  return probs;
}

/// <phi|rho|phi>, clamped into [0, 1]. The reference must be normalized and
/// of matching dimension.
inline double fidelity_with_pure(const ReducedDensityMatrix& rdm,
                                 const Eigen::VectorXcd& reference) {
  if (reference.size() != rdm.matrix.rows()) {
    throw std::invalid_argument(
        "reference dimension " + std::to_string(reference.size()) +
        " does not match subsystem dimension " +
        std::to_string(rdm.matrix.rows()));
  }
  const std::complex<double> value =
      (reference.adjoint() * rdm.matrix * reference)(0, 0);
  return std::clamp(value.real(), 0.0, 1.0);
}

struct ProductTest {
  bool product = false;
  double deviation = 0.0; // max-entry |rho_S - rho_A (x) rho_B|
};

namespace detail {

/// Partial trace within an RDM, keeping the given bit positions.
inline Eigen::MatrixXcd trace_down(const Eigen::MatrixXcd& rho,
                                   std::span<const int> keep_positions,
                                   std::span<const int> drop_positions) {
  const std::size_t keep_dim = std::size_t{1} << keep_positions.size();
  const std::size_t drop_dim = std::size_t{1} << drop_positions.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(keep_dim));
  for (std::size_t r = 0; r < keep_dim; ++r) {
    for (std::size_t c = 0; c < keep_dim; ++c) {
      std::complex<double> sum = 0.0;
      for (std::size_t e = 0; e < drop_dim; ++e) {
        const std::size_t full_r =
            scatter_bits(r, keep_positions) | scatter_bits(e, drop_positions);
        const std::size_t full_c =
            scatter_bits(c, keep_positions) | scatter_bits(e, drop_positions);
        sum += rho(static_cast<Eigen::Index>(full_r),
                   static_cast<Eigen::Index>(full_c));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  }
  return out;
}

} // namespace detail

/// Tests whether rho_S factorizes as rho_A (x) rho_B across the given cut.
/// cut_a holds BIT POSITIONS within the subsystem (indices into rdm.qubits),
/// and must be a non-empty strict subset.
inline ProductTest is_product_across(const ReducedDensityMatrix& rdm,
                                     std::span<const int> cut_a,
                                     double tolerance = 1e-6) {
  const int k = static_cast<int>(rdm.qubits.size());
  if (cut_a.empty() || static_cast<int>(cut_a.size()) >= k) {
    throw std::invalid_argument(
        "cut must split the subsystem into two non-empty parts");
  }
  std::vector<int> a(cut_a.begin(), cut_a.end());
  std::vector<int> b;
  for (int p = 0; p < k; ++p) {
    if (std::find(a.begin(), a.end(), p) == a.end()) {
      b.push_back(p);
    }
  }
  const Eigen::MatrixXcd rho_a = detail::trace_down(rdm.matrix, a, b);
  const Eigen::MatrixXcd rho_b = detail::trace_down(rdm.matrix, b, a);
  const std::size_t dim = std::size_t{1} << k;
  double deviation = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t ra = detail::gather_bits(r, a);
    const std::size_t rb = detail::gather_bits(r, b);
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t ca = detail::gather_bits(c, a);
      const std::size_t cb = detail::gather_bits(c, b);
      const std::complex<double> expected =
          rho_a(static_cast<Eigen::Index>(ra), static_cast<Eigen::Index>(ca)) *
          rho_b(static_cast<Eigen::Index>(rb), static_cast<Eigen::Index>(cb));
      deviation = std::max(
          deviation, std::abs(rdm.matrix(static_cast<Eigen::Index>(r),
                                         static_cast<Eigen::Index>(c)) -
                              expected));
    }
  }
  return {deviation < tolerance, deviation};
}

} // namespace qdbg
