/**
 * @file gates.hpp
 * @brief Builtin gate table: arity, control counts, matrices, and the
 *        diagonal/basis-changing classification used by diagnosis.
 */

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace qdbg {

/// Base operation of a flattened instruction. Controlled variants (cx, ccz,
/// ...) are represented as the base op plus an explicit control list.
enum class Op {
  X,
  Y,
  Z,
  H,
  S,
  Sdg,
  T,
  Tdg,
  Rx,
  Ry,
  Rz,
  Swap,
  Measure,
  Reset,
  Barrier,
};

struct GateInfo {
  std::string_view name;
  Op base = Op::X;
  int num_controls = 0;
  int num_targets = 1;
  bool takes_angle = false;
};

/// All builtin gate spellings. measure/reset/barrier are separate statement
/// forms and do not appear here.
inline constexpr std::array<GateInfo, 18> kGateTable{{
    {"x", Op::X, 0, 1, false},
    {"y", Op::Y, 0, 1, false},
    {"z", Op::Z, 0, 1, false},
    {"h", Op::H, 0, 1, false},
    {"s", Op::S, 0, 1, false},
    {"sdg", Op::Sdg, 0, 1, false},
    {"t", Op::T, 0, 1, false},
    {"tdg", Op::Tdg, 0, 1, false},
    {"rx", Op::Rx, 0, 1, true},
    {"ry", Op::Ry, 0, 1, true},
    {"rz", Op::Rz, 0, 1, true},
    {"swap", Op::Swap, 0, 2, false},
    {"cx", Op::X, 1, 1, false},
    {"cz", Op::Z, 1, 1, false},
    {"ccx", Op::X, 2, 1, false},
    {"ccz", Op::Z, 2, 1, false},
    {"cccx", Op::X, 3, 1, false},
    {"cccz", Op::Z, 3, 1, false},
}};

inline const GateInfo* find_gate_info(std::string_view name) {
  for (const auto& info : kGateTable) {
    if (info.name == name) {
      return &info;
    }
  }
  return nullptr;
}

/// True when the base operation is diagonal in the computational basis
/// (never moves amplitude between basis states).
inline bool is_diagonal(Op op) {
  switch (op) {
  case Op::Z:
  case Op::S:
  case Op::Sdg:
  case Op::T:
  case Op::Tdg:
  case Op::Rz:
  case Op::Barrier:
    return true;
  default:
    return false;
  }
}

inline bool is_unitary_gate(Op op) {
  return op != Op::Measure && op != Op::Reset && op != Op::Barrier;
}

/// 2x2 matrix of a single-qubit base op, row-major.
inline std::array<std::complex<double>, 4> gate_matrix(Op op, double angle) {
  using namespace std::complex_literals;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  switch (op) {
  case Op::X:
    return {0.0, 1.0, 1.0, 0.0};
  case Op::Y:
    return {0.0, -1.0i, 1.0i, 0.0};
  case Op::Z:
    return {1.0, 0.0, 0.0, -1.0};
  case Op::H:
    return {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
  case Op::S:
    return {1.0, 0.0, 0.0, 1.0i};
  case Op::Sdg:
    return {1.0, 0.0, 0.0, -1.0i};
  case Op::T:
    return {1.0, 0.0, 0.0, std::exp(1.0i * (std::numbers::pi / 4.0))};
  case Op::Tdg:
    return {1.0, 0.0, 0.0, std::exp(-1.0i * (std::numbers::pi / 4.0))};
  case Op::Rx: {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    return {c, -1.0i * s, -1.0i * s, c};
  }
  case Op::Ry: {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    return {c, -s, s, c};
  }
  case Op::Rz: {
    return {std::exp(-1.0i * (angle / 2.0)), 0.0, 0.0,
            std::exp(1.0i * (angle / 2.0))};
  }
  default:
    return {1.0, 0.0, 0.0, 1.0};
  }
}

} // namespace qdbg
