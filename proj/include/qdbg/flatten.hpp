/**
 * @file flatten.hpp
 * @brief Linearization of a Program: gate-call inlining, register broadcast
 *        expansion, and per-instruction source call stacks.
 */

#pragma once

#include "qdbg/ast.hpp"
#include "qdbg/gates.hpp"
#include "qdbg/parser.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qdbg {

/// One executable instruction of the flattened stream.
/// call_stack holds spans innermost first: the gate-body (or top-level) line,
/// then call-site lines outward. def_spans holds the signature spans of the
/// enclosing gate definitions, innermost first (empty at top level).
struct FlatInstruction {
  Op op = Op::X;
  std::string op_name;
  std::vector<int> targets;
  std::vector<int> controls;
  std::vector<int> classical_targets;
  double angle = 0.0;
  std::vector<SourceSpan> call_stack;
  std::vector<SourceSpan> def_spans;
  std::size_t origin_index = 0;

  [[nodiscard]] const SourceSpan& innermost() const { return call_stack.front(); }
  [[nodiscard]] std::vector<int> qubits() const {
    std::vector<int> all = controls;
    all.insert(all.end(), targets.begin(), targets.end());
    return all;
  }
};

/// An assertion instance in the flattened stream. occurrence counts instances
/// of the same source assertion (1-based, in execution order): an assertion
/// inside a gate body called twice yields occurrences 1 and 2.
struct FlatAssertion {
  Assertion assertion;
  std::vector<SourceSpan> call_stack;
  std::vector<SourceSpan> def_spans;
  std::size_t origin_index = 0;
  int occurrence = 1;

  [[nodiscard]] const SourceSpan& innermost() const { return call_stack.front(); }
  [[nodiscard]] const SourceSpan& outermost() const { return call_stack.back(); }
};

using FlatItem = std::variant<FlatInstruction, FlatAssertion>;

struct FlatProgram {
  int num_qubits = 0;
  int num_clbits = 0;
  std::vector<FlatItem> items;
  RegisterTable qregs;
  RegisterTable cregs;

  [[nodiscard]] std::size_t instruction_count() const {
    std::size_t count = 0;
    for (const auto& item : items) {
      if (std::holds_alternative<FlatInstruction>(item)) {
        ++count;
      }
    }
    return count;
  }

  /// Human-readable name of a flat qubit index, e.g. "q[2]" or "flag".
  [[nodiscard]] std::string qubit_name(int qubit) const {
    for (const auto& [name, info] : qregs) {
      if (qubit >= info.offset && qubit < info.offset + info.width) {
        if (info.width == 1) {
          return name;
        }
        return name + "[" + std::to_string(qubit - info.offset) + "]";
      }
    }
    return "q?" + std::to_string(qubit);
  }
};

namespace detail {

class Flattener {
public:
  explicit Flattener(const Program& program) : program_(program) {}

  FlatProgram run() {
    for (const auto& stmt : program_.statements) {
      if (const auto* decl = std::get_if<RegDecl>(&stmt.node)) {
        RegisterTable& table = decl->classical ? out_.cregs : out_.qregs;
        int& total = decl->classical ? out_.num_clbits : out_.num_qubits;
        table.emplace(decl->name, RegisterInfo{total, decl->width, stmt.span});
        total += decl->width;
      }
    }
    for (const auto& stmt : program_.statements) {
      flatten_statement(stmt, nullptr);
    }
    return std::move(out_);
  }

private:
  using Bindings = std::map<std::string, int>;

  void flatten_statement(const Statement& stmt, const Bindings* bindings) {
    if (std::holds_alternative<RegDecl>(stmt.node)) {
      return;
    }
    if (const auto* apply = std::get_if<GateApply>(&stmt.node)) {
      emit_gate(*apply, stmt.span, bindings);
    } else if (const auto* call = std::get_if<GateCall>(&stmt.node)) {
      inline_call(*call, stmt.span, bindings);
    } else if (const auto* measure = std::get_if<MeasureStmt>(&stmt.node)) {
      emit_measure(*measure, stmt.span);
    } else if (const auto* reset = std::get_if<ResetStmt>(&stmt.node)) {
      emit_reset(*reset, stmt.span);
    } else if (const auto* barrier = std::get_if<BarrierStmt>(&stmt.node)) {
      emit_barrier(*barrier, stmt.span, bindings);
    } else if (const auto* assert_stmt = std::get_if<AssertStmt>(&stmt.node)) {
      emit_assertion(*assert_stmt, stmt.span, bindings);
    }
  }

  [[nodiscard]] std::vector<SourceSpan> make_call_stack(
      const SourceSpan& span) const {
    std::vector<SourceSpan> stack;
    stack.push_back(span);
    stack.insert(stack.end(), call_sites_.rbegin(), call_sites_.rend());
    return stack;
  }

  [[nodiscard]] std::vector<SourceSpan> make_def_spans() const {
    return {def_stack_.rbegin(), def_stack_.rend()};
  }

  int resolve_bound(const Operand& op, const Bindings* bindings) const {
    if (bindings != nullptr) {
      return bindings->at(op.reg);
    }
    const auto& info = out_.qregs.at(op.reg);
    return op.index ? info.offset + *op.index : info.offset;
  }

  void emit_gate(const GateApply& apply, const SourceSpan& span,
                 const Bindings* bindings) {
    const GateInfo* info = find_gate_info(apply.op);
    const int lanes =
        bindings != nullptr
            ? 1
            : broadcast_width(apply.operands, out_.qregs, span);
    for (int lane = 0; lane < lanes; ++lane) {
      FlatInstruction instr;
      instr.op = info->base;
      instr.op_name = apply.op;
      instr.angle = apply.angle.value_or(0.0);
      for (std::size_t i = 0; i < apply.operands.size(); ++i) {
        const int qubit =
            bindings != nullptr
                ? bindings->at(apply.operands[i].reg)
                : resolve_lane(apply.operands[i], out_.qregs, lane);
        if (static_cast<int>(i) < info->num_controls) {
          instr.controls.push_back(qubit);
        } else {
          instr.targets.push_back(qubit);
        }
      }
      emit(std::move(instr), span);
    }
  }

  void emit_measure(const MeasureStmt& measure, const SourceSpan& span) {
    const auto& qinfo = out_.qregs.at(measure.src.reg);
    const auto& cinfo = out_.cregs.at(measure.dst.reg);
    const int width = measure.src.index ? 1 : qinfo.width;
    for (int lane = 0; lane < width; ++lane) {
      FlatInstruction instr;
      instr.op = Op::Measure;
      instr.op_name = "measure";
      instr.targets.push_back(measure.src.index ? qinfo.offset + *measure.src.index
                                                : qinfo.offset + lane);
      instr.classical_targets.push_back(
          measure.dst.index ? cinfo.offset + *measure.dst.index
                            : cinfo.offset + lane);
      emit(std::move(instr), span);
    }
  }

  void emit_reset(const ResetStmt& reset, const SourceSpan& span) {
    const auto& info = out_.qregs.at(reset.target.reg);
    const int width = reset.target.index ? 1 : info.width;
    for (int lane = 0; lane < width; ++lane) {
      FlatInstruction instr;
      instr.op = Op::Reset;
      instr.op_name = "reset";
      instr.targets.push_back(reset.target.index ? info.offset + *reset.target.index
                                                 : info.offset + lane);
      emit(std::move(instr), span);
    }
  }

  void emit_barrier(const BarrierStmt& barrier, const SourceSpan& span,
                    const Bindings* bindings) {
    FlatInstruction instr;
    instr.op = Op::Barrier;
    instr.op_name = "barrier";
    for (const auto& op : barrier.operands) {
      if (bindings != nullptr) {
        instr.targets.push_back(bindings->at(op.reg));
      } else {
        const auto& info = out_.qregs.at(op.reg);
        if (op.index) {
          instr.targets.push_back(info.offset + *op.index);
        } else {
          for (int i = 0; i < info.width; ++i) {
            instr.targets.push_back(info.offset + i);
          }
        }
      }
    }
    emit(std::move(instr), span);
  }

  void emit_assertion(const AssertStmt& stmt, const SourceSpan& span,
                      const Bindings* bindings) {
    Assertion assertion;
    if (bindings != nullptr) {
      assertion.kind = stmt.kind;
      assertion.threshold = stmt.threshold;
      assertion.reference = stmt.reference;
      assertion.span = span;
      for (const auto& op : stmt.operands) {
        assertion.qubits.push_back(bindings->at(op.reg));
      }
    } else {
      assertion = Parser::resolve_assertion_statement(stmt, span, out_.qregs);
    }
    FlatAssertion flat;
    flat.assertion = std::move(assertion);
    flat.call_stack = make_call_stack(span);
    flat.def_spans = make_def_spans();
    flat.origin_index = out_.items.size();
    flat.occurrence = ++occurrences_[span_key(span)];
    out_.items.emplace_back(std::move(flat));
  }

  void inline_call(const GateCall& call, const SourceSpan& span,
                   const Bindings* bindings) {
    const GateDef* def = program_.find_gate(call.gate);
    Bindings bound;
    for (std::size_t i = 0; i < def->params.size(); ++i) {
      bound[def->params[i]] = resolve_bound(call.operands[i], bindings);
    }
    call_sites_.push_back(span);
    def_stack_.push_back(def->span);
    for (const auto& body_stmt : def->body) {
      flatten_statement(body_stmt, &bound);
    }
    def_stack_.pop_back();
    call_sites_.pop_back();
  }

  void emit(FlatInstruction instr, const SourceSpan& span) {
    instr.call_stack = make_call_stack(span);
    instr.def_spans = make_def_spans();
    instr.origin_index = out_.items.size();
    out_.items.emplace_back(std::move(instr));
  }

  const Program& program_;
  FlatProgram out_;
  std::vector<SourceSpan> call_sites_; // outermost first while descending
  std::vector<SourceSpan> def_stack_;
  std::map<SpanKey, int> occurrences_;
};

} // namespace detail

/// Inlines every custom gate call and expands register broadcasts.
/// The input must have passed parse validation; flattening itself cannot fail.
inline FlatProgram flatten(const Program& program) {
  return detail::Flattener(program).run();
}

} // namespace qdbg
