/**
 * @file ast.hpp
 * @brief Parsed program representation: statements, gate definitions,
 *        assertions.
 */

#pragma once

#include "qdbg/source.hpp"

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qdbg {

enum class AssertionKind { Entanglement, Superposition, Equality };

inline const char* to_string(AssertionKind kind) {
  switch (kind) {
  case AssertionKind::Entanglement:
    return "entanglement";
  case AssertionKind::Superposition:
    return "superposition";
  case AssertionKind::Equality:
    return "equality";
  }
  return "?";
}

/// A fully resolved assertion over concrete qubit indices.
/// threshold/reference are only meaningful for Equality.
struct Assertion {
  AssertionKind kind = AssertionKind::Superposition;
  std::vector<int> qubits;
  double threshold = 0.0;
  std::vector<std::complex<double>> reference;
  SourceSpan span;
};

/// A register reference in source: `q` (whole register) or `q[3]`.
struct Operand {
  std::string reg;
  std::optional<int> index;
  SourceSpan span;

  [[nodiscard]] std::string text() const {
    return index ? reg + "[" + std::to_string(*index) + "]" : reg;
  }
};

struct RegDecl {
  bool classical = false;
  std::string name;
  int width = 0;
};

/// Application of a builtin gate (possibly broadcast over registers).
struct GateApply {
  std::string op;
  std::optional<double> angle;
  std::vector<Operand> operands;
};

/// Invocation of a user-defined gate with single-qubit actuals.
struct GateCall {
  std::string gate;
  std::vector<Operand> operands;
};

struct MeasureStmt {
  Operand src;
  Operand dst;
};

struct ResetStmt {
  Operand target;
};

struct BarrierStmt {
  std::vector<Operand> operands;
};

/// Assertion statement before operand resolution.
struct AssertStmt {
  AssertionKind kind = AssertionKind::Superposition;
  double threshold = 0.0;
  std::vector<std::complex<double>> reference;
  std::vector<Operand> operands;
};

using StatementNode = std::variant<RegDecl, GateApply, GateCall, MeasureStmt,
                                   ResetStmt, BarrierStmt, AssertStmt>;

struct Statement {
  StatementNode node;
  SourceSpan span;
};

/// A custom gate definition. Bodies may contain builtin applications,
/// calls to previously defined gates, barriers, and assertions.
struct GateDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<Statement> body;
  SourceSpan span; // signature line
};

struct Program {
  std::vector<GateDef> gate_defs;
  std::vector<Statement> statements;

  [[nodiscard]] const GateDef* find_gate(const std::string& name) const {
    for (const auto& def : gate_defs) {
      if (def.name == name) {
        return &def;
      }
    }
    return nullptr;
  }
};

/// Layout of one declared register inside the flat qubit/clbit index space.
struct RegisterInfo {
  int offset = 0;
  int width = 0;
  SourceSpan span;
};

using RegisterTable = std::map<std::string, RegisterInfo>;

} // namespace qdbg
