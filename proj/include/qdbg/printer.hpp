/**
 * @file printer.hpp
 * @brief Canonical pretty-printer for parsed programs. Printing then
 *        re-parsing yields a structurally identical Program.
 */

#pragma once

#include "qdbg/ast.hpp"

#include <cstdio>
#include <sstream>
#include <string>
#include <variant>

namespace qdbg {

namespace detail {

inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline std::string format_amplitude(const std::complex<double>& amp) {
  if (amp.imag() == 0.0) {
    return format_double(amp.real());
  }
  if (amp.real() == 0.0) {
    return format_double(amp.imag()) + "i";
  }
  std::string result = format_double(amp.real());
  if (amp.imag() >= 0.0) {
    result += "+" + format_double(amp.imag()) + "i";
  } else {
    result += "-" + format_double(-amp.imag()) + "i";
  }
  return result;
}

inline std::string operand_list(const std::vector<Operand>& operands) {
  std::string result;
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (i > 0) {
      result += ", ";
    }
    result += operands[i].text();
  }
  return result;
}

inline void print_statement(std::ostringstream& out, const Statement& stmt,
                            const std::string& indent) {
  out << indent;
  if (const auto* decl = std::get_if<RegDecl>(&stmt.node)) {
    out << (decl->classical ? "creg " : "qreg ") << decl->name << "["
        << decl->width << "];\n";
  } else if (const auto* apply = std::get_if<GateApply>(&stmt.node)) {
    out << apply->op;
    if (apply->angle) {
      out << "(" << format_double(*apply->angle) << ")";
    }
    out << " " << operand_list(apply->operands) << ";\n";
  } else if (const auto* call = std::get_if<GateCall>(&stmt.node)) {
    out << call->gate << " " << operand_list(call->operands) << ";\n";
  } else if (const auto* measure = std::get_if<MeasureStmt>(&stmt.node)) {
    out << "measure " << measure->src.text() << " -> " << measure->dst.text()
        << ";\n";
  } else if (const auto* reset = std::get_if<ResetStmt>(&stmt.node)) {
    out << "reset " << reset->target.text() << ";\n";
  } else if (const auto* barrier = std::get_if<BarrierStmt>(&stmt.node)) {
    out << "barrier " << operand_list(barrier->operands) << ";\n";
  } else if (const auto* assert_stmt = std::get_if<AssertStmt>(&stmt.node)) {
    switch (assert_stmt->kind) {
    case AssertionKind::Entanglement:
      out << "assert-ent " << operand_list(assert_stmt->operands) << ";\n";
      break;
    case AssertionKind::Superposition:
      out << "assert-sup " << operand_list(assert_stmt->operands) << ";\n";
      break;
    case AssertionKind::Equality:
      out << "assert-eq " << format_double(assert_stmt->threshold) << ", "
          << operand_list(assert_stmt->operands) << " { ";
      for (std::size_t i = 0; i < assert_stmt->reference.size(); ++i) {
        if (i > 0) {
          out << ", ";
        }
        out << format_amplitude(assert_stmt->reference[i]);
      }
      out << " }\n";
      break;
    }
  }
}

} // namespace detail

inline std::string print_program(const Program& program) {
  std::ostringstream out;
  for (const auto& def : program.gate_defs) {
    out << "gate " << def.name << " ";
    for (std::size_t i = 0; i < def.params.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      out << def.params[i];
    }
    out << " {\n";
    for (const auto& stmt : def.body) {
      detail::print_statement(out, stmt, "    ");
    }
    out << "}\n";
  }
  for (const auto& stmt : program.statements) {
    detail::print_statement(out, stmt, "");
  }
  return out.str();
}

} // namespace qdbg
