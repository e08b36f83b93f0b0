/**
 * @file parser.hpp
 * @brief Recursive-descent parser and validator for the assertion-extended
 *        OpenQASM subset.
 *
 * Validation happens during the parse: declare-before-use, unique names,
 * arity and operand checks, recursion rejection, and assertion well-formedness
 * (reference length, normalization, threshold range). A Program returned by
 * parse() is always safe to flatten.
 */

#pragma once

#include "qdbg/ast.hpp"
#include "qdbg/gates.hpp"
#include "qdbg/lexer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qdbg {

namespace detail {

/// Number of broadcast lanes for a builtin application: 1 when all operands
/// are single qubits, otherwise the common width of all unindexed registers.
inline int broadcast_width(const std::vector<Operand>& operands,
                           const RegisterTable& regs, const SourceSpan& span) {
  int width = 1;
  for (const auto& op : operands) {
    if (op.index) {
      continue;
    }
    const auto it = regs.find(op.reg);
    if (it == regs.end()) {
      continue; // caller reports undeclared operands
    }
    const int w = it->second.width;
    if (w == 1) {
      continue;
    }
    if (width != 1 && width != w) {
      throw ParseError("mismatched register widths in broadcast", span);
    }
    width = w;
  }
  return width;
}

inline int resolve_lane(const Operand& op, const RegisterTable& regs,
                        int lane) {
  const auto& info = regs.at(op.reg);
  if (op.index) {
    return info.offset + *op.index;
  }
  return info.width == 1 ? info.offset : info.offset + lane;
}

} // namespace detail

class Parser {
public:
  /// Parses and validates a whole program.
  static Program parse(std::string_view source, int file_id = 0) {
    Parser parser(Lexer(source, file_id).tokenize());
    return parser.parse_program();
  }

  /// Parses a single assertion statement against an existing register table
  /// (or a formal-parameter table with width-1 entries) and resolves its
  /// operands to concrete qubits.
  static Assertion parse_assertion(std::string_view statement_text,
                                   const RegisterTable& qregs,
                                   int file_id = 0) {
    Parser parser(Lexer(statement_text, file_id).tokenize());
    parser.qregs_ = qregs;
    const Token& first = parser.peek();
    if (first.kind != TokenKind::Identifier ||
        (first.text != "assert-ent" && first.text != "assert-sup" &&
         first.text != "assert-eq")) {
      throw ParseError("expected an assertion statement", first.span);
    }
    Statement stmt = parser.parse_assert_statement(nullptr);
    parser.expect_end();
    return parser.resolve_assertion(std::get<AssertStmt>(stmt.node),
                                    stmt.span);
  }

  /// Resolves an already parsed assertion statement against a table.
  static Assertion resolve_assertion_statement(const AssertStmt& stmt,
                                               const SourceSpan& span,
                                               const RegisterTable& qregs) {
    Parser parser({});
    parser.qregs_ = qregs;
    return parser.resolve_assertion(stmt, span);
  }

private:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program parse_program() {
    while (peek().kind != TokenKind::End) {
      parse_top_level();
    }
    return std::move(program_);
  }

  // --- token helpers -------------------------------------------------------

  [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
    const std::size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[idx];
  }

  const Token& advance() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  const Token& expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, peek().span);
    }
    return advance();
  }

  void expect_end() {
    if (peek().kind != TokenKind::End) {
      throw ParseError("unexpected trailing input", peek().span);
    }
  }

  bool accept(TokenKind kind) {
    if (peek().kind == kind) {
      advance();
      return true;
    }
    return false;
  }

  [[nodiscard]] SourceSpan statement_span(const SourceSpan& start) const {
    SourceSpan span = start;
    if (pos_ > 0) {
      const SourceSpan& end = tokens_[pos_ - 1].span;
      if (end.line == start.line) {
        span.column_end = end.column_end;
      }
    }
    return span;
  }

  // --- declarations and top-level statements -------------------------------

  void parse_top_level() {
    const Token& tok = peek();
    if (tok.kind != TokenKind::Identifier) {
      throw ParseError("expected a statement", tok.span);
    }
    const std::string& word = tok.text;
    if (word == "OPENQASM") {
      advance();
      expect(TokenKind::Number, "version number");
      expect(TokenKind::Semicolon, "';'");
      return;
    }
    if (word == "include") {
      advance();
      expect(TokenKind::String, "file name string");
      expect(TokenKind::Semicolon, "';'");
      return;
    }
    if (word == "qreg" || word == "creg") {
      parse_reg_decl(word == "creg");
      return;
    }
    if (word == "gate") {
      parse_gate_def();
      return;
    }
    program_.statements.push_back(parse_statement(nullptr));
  }

  void parse_reg_decl(bool classical) {
    const SourceSpan start = peek().span;
    advance();
    const Token& name = expect(TokenKind::Identifier, "register name");
    check_fresh_name(name.text, name.span);
    expect(TokenKind::LBracket, "'['");
    const Token& width = expect(TokenKind::Number, "register width");
    expect(TokenKind::RBracket, "']'");
    expect(TokenKind::Semicolon, "';'");
    const int w = static_cast<int>(width.value);
    if (w < 1 || width.value != w) {
      throw ParseError("register width must be a positive integer", width.span);
    }
    const SourceSpan span = statement_span(start);
    RegisterTable& table = classical ? cregs_ : qregs_;
    int offset = 0;
    for (const auto& [_, info] : table) {
      offset += info.width;
    }
    table.emplace(name.text, RegisterInfo{offset, w, span});
    program_.statements.push_back(
        Statement{RegDecl{classical, name.text, w}, span});
  }

  void parse_gate_def() {
    const SourceSpan start = peek().span;
    advance();
    const Token& name = expect(TokenKind::Identifier, "gate name");
    check_fresh_name(name.text, name.span);
    if (find_gate_info(name.text) != nullptr) {
      throw ParseError("cannot redefine builtin gate '" + name.text + "'",
                       name.span);
    }
    GateDef def;
    def.name = name.text;
    while (peek().kind == TokenKind::Identifier) {
      const Token& param = advance();
      if (std::find(def.params.begin(), def.params.end(), param.text) !=
          def.params.end()) {
        throw ParseError("duplicate gate parameter '" + param.text + "'",
                         param.span);
      }
      def.params.push_back(param.text);
      if (!accept(TokenKind::Comma)) {
        break;
      }
    }
    if (def.params.empty()) {
      throw ParseError("gate definition needs at least one parameter",
                       peek().span);
    }
    def.span = statement_span(start);
    expect(TokenKind::LBrace, "'{'");
    while (!accept(TokenKind::RBrace)) {
      if (peek().kind == TokenKind::End) {
        throw ParseError("unterminated gate definition", def.span);
      }
      def.body.push_back(parse_statement(&def));
    }
    program_.gate_defs.push_back(std::move(def));
  }

  // --- statements (shared between top level and gate bodies) ---------------

  Statement parse_statement(const GateDef* enclosing) {
    const Token& tok = peek();
    if (tok.kind != TokenKind::Identifier) {
      throw ParseError("expected a statement", tok.span);
    }
    const std::string& word = tok.text;
    if (word == "assert-ent" || word == "assert-sup" || word == "assert-eq") {
      return parse_assert_statement(enclosing);
    }
    if (word == "barrier") {
      return parse_barrier(enclosing);
    }
    if (word == "measure" || word == "reset") {
      if (enclosing != nullptr) {
        throw ParseError("'" + word + "' is not allowed inside a gate definition",
                         tok.span);
      }
      return word == "measure" ? parse_measure() : parse_reset();
    }
    if (word == "qreg" || word == "creg" || word == "gate") {
      throw ParseError("'" + word + "' is not allowed here", tok.span);
    }
    if (const GateInfo* info = find_gate_info(word)) {
      return parse_gate_apply(*info, enclosing);
    }
    if (enclosing != nullptr && word == enclosing->name) {
      throw ParseError("recursive gate definition '" + word + "'", tok.span);
    }
    if (const GateDef* callee = program_.find_gate(word)) {
      return parse_gate_call(*callee, enclosing);
    }
    throw ParseError("undeclared gate or unknown statement '" + word + "'",
                     tok.span);
  }

  Statement parse_gate_apply(const GateInfo& info, const GateDef* enclosing) {
    const SourceSpan start = peek().span;
    advance();
    GateApply apply;
    apply.op = std::string(info.name);
    if (info.takes_angle) {
      expect(TokenKind::LParen, "'('");
      apply.angle = parse_angle();
      expect(TokenKind::RParen, "')'");
    } else if (peek().kind == TokenKind::LParen) {
      throw ParseError("gate '" + apply.op + "' takes no angle", peek().span);
    }
    apply.operands = parse_operand_list(enclosing);
    expect(TokenKind::Semicolon, "';'");
    const SourceSpan span = statement_span(start);
    const int arity = info.num_controls + info.num_targets;
    if (static_cast<int>(apply.operands.size()) != arity) {
      throw ParseError("gate '" + apply.op + "' expects " +
                           std::to_string(arity) + " operands, got " +
                           std::to_string(apply.operands.size()),
                       span);
    }
    if (enclosing == nullptr) {
      validate_broadcast_distinct(apply.operands, span);
    } else {
      validate_distinct_formals(apply.operands);
    }
    return Statement{std::move(apply), span};
  }

  Statement parse_gate_call(const GateDef& callee, const GateDef* enclosing) {
    const SourceSpan start = peek().span;
    advance();
    GateCall call;
    call.gate = callee.name;
    call.operands = parse_operand_list(enclosing);
    expect(TokenKind::Semicolon, "';'");
    const SourceSpan span = statement_span(start);
    if (call.operands.size() != callee.params.size()) {
      throw ParseError("gate '" + call.gate + "' expects " +
                           std::to_string(callee.params.size()) +
                           " operands, got " +
                           std::to_string(call.operands.size()),
                       span);
    }
    if (enclosing == nullptr) {
      // Call operands must name exactly one qubit each.
      std::set<int> seen;
      for (const auto& op : call.operands) {
        const int qubit = resolve_single_qubit(op);
        if (!seen.insert(qubit).second) {
          throw ParseError("duplicate qubit operand '" + op.text() + "'",
                           op.span);
        }
      }
    } else {
      validate_distinct_formals(call.operands);
    }
    return Statement{std::move(call), span};
  }

  Statement parse_measure() {
    const SourceSpan start = peek().span;
    advance();
    Operand src = parse_operand(nullptr);
    expect(TokenKind::Arrow, "'->'");
    Operand dst = parse_operand(nullptr);
    expect(TokenKind::Semicolon, "';'");
    const SourceSpan span = statement_span(start);
    const int src_width = operand_width(src, qregs_, "quantum register");
    const int dst_width = operand_width(dst, cregs_, "classical register");
    if (src_width != dst_width) {
      throw ParseError("measure operand widths differ", span);
    }
    return Statement{MeasureStmt{std::move(src), std::move(dst)}, span};
  }

  Statement parse_reset() {
    const SourceSpan start = peek().span;
    advance();
    Operand target = parse_operand(nullptr);
    expect(TokenKind::Semicolon, "';'");
    const SourceSpan span = statement_span(start);
    operand_width(target, qregs_, "quantum register");
    return Statement{ResetStmt{std::move(target)}, span};
  }

  Statement parse_barrier(const GateDef* enclosing) {
    const SourceSpan start = peek().span;
    advance();
    BarrierStmt barrier;
    barrier.operands = parse_operand_list(enclosing);
    expect(TokenKind::Semicolon, "';'");
    const SourceSpan span = statement_span(start);
    if (enclosing == nullptr) {
      for (const auto& op : barrier.operands) {
        operand_width(op, qregs_, "quantum register");
      }
    }
    return Statement{std::move(barrier), span};
  }

  Statement parse_assert_statement(const GateDef* enclosing) {
    const SourceSpan start = peek().span;
    const std::string keyword = advance().text;
    AssertStmt stmt;
    if (keyword == "assert-ent") {
      stmt.kind = AssertionKind::Entanglement;
    } else if (keyword == "assert-sup") {
      stmt.kind = AssertionKind::Superposition;
    } else {
      stmt.kind = AssertionKind::Equality;
      stmt.threshold = parse_signed_number();
      if (stmt.threshold < 0.0 || stmt.threshold > 1.0) {
        throw ParseError("similarity threshold must be in [0, 1]", start);
      }
      expect(TokenKind::Comma, "','");
    }
    stmt.operands = parse_operand_list(enclosing);
    if (stmt.kind == AssertionKind::Equality) {
      expect(TokenKind::LBrace, "'{'");
      do {
        stmt.reference.push_back(parse_amplitude());
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBrace, "'}'");
      accept(TokenKind::Semicolon); // Listing-style assert-eq has no ';'
    } else {
      expect(TokenKind::Semicolon, "';'");
    }
    const SourceSpan span = statement_span(start);
    if (enclosing != nullptr) {
      validate_distinct_formals(stmt.operands);
      validate_assertion_shape(stmt, static_cast<int>(stmt.operands.size()),
                               span);
    } else {
      // Resolving validates operand declarations, duplicates, and shape.
      resolve_assertion(stmt, span);
    }
    return Statement{std::move(stmt), span};
  }

  // --- operands, angles, amplitudes ----------------------------------------

  std::vector<Operand> parse_operand_list(const GateDef* enclosing) {
    std::vector<Operand> operands;
    do {
      operands.push_back(parse_operand(enclosing));
    } while (accept(TokenKind::Comma));
    return operands;
  }

  Operand parse_operand(const GateDef* enclosing) {
    const Token& name = expect(TokenKind::Identifier, "operand");
    Operand op;
    op.reg = name.text;
    op.span = name.span;
    if (peek().kind == TokenKind::LBracket) {
      if (enclosing != nullptr) {
        throw ParseError("cannot index a gate parameter", peek().span);
      }
      advance();
      const Token& idx = expect(TokenKind::Number, "index");
      expect(TokenKind::RBracket, "']'");
      const int i = static_cast<int>(idx.value);
      if (i < 0 || idx.value != i) {
        throw ParseError("register index must be a non-negative integer",
                         idx.span);
      }
      op.index = i;
      op.span.column_end = tokens_[pos_ - 1].span.column_end;
    }
    if (enclosing != nullptr) {
      const auto& params = enclosing->params;
      if (std::find(params.begin(), params.end(), op.reg) == params.end()) {
        throw ParseError("'" + op.reg + "' is not a parameter of gate '" +
                             enclosing->name + "'",
                         op.span);
      }
    }
    return op;
  }

  double parse_angle() {
    double value = parse_angle_term();
    while (peek().kind == TokenKind::Star || peek().kind == TokenKind::Slash) {
      const bool mul = advance().kind == TokenKind::Star;
      const double rhs = parse_angle_term();
      value = mul ? value * rhs : value / rhs;
    }
    return value;
  }

  double parse_angle_term() {
    if (accept(TokenKind::Minus)) {
      return -parse_angle_term();
    }
    if (peek().kind == TokenKind::Identifier && peek().text == "pi") {
      advance();
      return std::numbers::pi;
    }
    const Token& num = expect(TokenKind::Number, "angle");
    if (num.imaginary) {
      throw ParseError("angle must be real", num.span);
    }
    return num.value;
  }

  double parse_signed_number() {
    const bool negative = accept(TokenKind::Minus);
    const Token& num = expect(TokenKind::Number, "number");
    if (num.imaginary) {
      throw ParseError("expected a real number", num.span);
    }
    return negative ? -num.value : num.value;
  }

  std::complex<double> parse_amplitude() {
    double sign = accept(TokenKind::Minus) ? -1.0 : 1.0;
    const Token& first = expect(TokenKind::Number, "amplitude");
    if (first.imaginary) {
      return {0.0, sign * first.value};
    }
    const double real = sign * first.value;
    if (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      // Only consume when an imaginary part follows.
      if (peek(1).kind == TokenKind::Number && peek(1).imaginary) {
        const double imag_sign =
            advance().kind == TokenKind::Plus ? 1.0 : -1.0;
        const Token& imag = advance();
        return {real, imag_sign * imag.value};
      }
    }
    return {real, 0.0};
  }

  // --- validation helpers ---------------------------------------------------

  void check_fresh_name(const std::string& name, const SourceSpan& span) {
    if (qregs_.count(name) != 0 || cregs_.count(name) != 0 ||
        program_.find_gate(name) != nullptr) {
      throw ParseError("duplicate declaration of '" + name + "'", span);
    }
  }

  int operand_width(const Operand& op, const RegisterTable& table,
                    const char* expected) {
    const auto it = table.find(op.reg);
    if (it == table.end()) {
      throw ParseError("undeclared " + std::string(expected) + " '" + op.reg +
                           "'",
                       op.span);
    }
    if (op.index) {
      if (*op.index >= it->second.width) {
        throw ParseError("index " + std::to_string(*op.index) +
                             " out of bounds for '" + op.reg + "' of width " +
                             std::to_string(it->second.width),
                         op.span);
      }
      return 1;
    }
    return it->second.width;
  }

  int resolve_single_qubit(const Operand& op) {
    const int width = operand_width(op, qregs_, "quantum register");
    if (width != 1) {
      throw ParseError("operand '" + op.reg + "' must name a single qubit",
                       op.span);
    }
    const auto& info = qregs_.at(op.reg);
    return op.index ? info.offset + *op.index : info.offset;
  }

  void validate_broadcast_distinct(const std::vector<Operand>& operands,
                                   const SourceSpan& span) {
    for (const auto& op : operands) {
      operand_width(op, qregs_, "quantum register");
    }
    if (operands.size() < 2) {
      return;
    }
    const int width = detail::broadcast_width(operands, qregs_, span);
    for (int lane = 0; lane < width; ++lane) {
      std::set<int> seen;
      for (const auto& op : operands) {
        if (!seen.insert(detail::resolve_lane(op, qregs_, lane)).second) {
          throw ParseError("gate operands overlap on qubit '" + op.text() + "'",
                           op.span);
        }
      }
    }
  }

  void validate_distinct_formals(const std::vector<Operand>& operands) {
    std::set<std::string> seen;
    for (const auto& op : operands) {
      if (!seen.insert(op.reg).second) {
        throw ParseError("duplicate operand '" + op.reg + "'", op.span);
      }
    }
  }

  void validate_assertion_shape(const AssertStmt& stmt, int num_qubits,
                                const SourceSpan& span) {
    if (stmt.kind == AssertionKind::Entanglement && num_qubits < 2) {
      throw ParseError("entanglement assertion needs at least 2 qubits", span);
    }
    if (stmt.kind != AssertionKind::Equality) {
      return;
    }
    const std::size_t expected = std::size_t{1} << num_qubits;
    if (stmt.reference.size() != expected) {
      throw ParseError("reference vector has " +
                           std::to_string(stmt.reference.size()) +
                           " amplitudes but " + std::to_string(num_qubits) +
                           " qubits require " + std::to_string(expected),
                       span);
    }
    double norm = 0.0;
    for (const auto& amp : stmt.reference) {
      norm += std::norm(amp);
    }
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) {
      throw ParseError("reference vector is not normalized", span);
    }
  }

  Assertion resolve_assertion(const AssertStmt& stmt, const SourceSpan& span) {
    Assertion assertion;
    assertion.kind = stmt.kind;
    assertion.threshold = stmt.threshold;
    assertion.reference = stmt.reference;
    assertion.span = span;
    std::set<int> seen;
    for (const auto& op : stmt.operands) {
      const int width = operand_width(op, qregs_, "quantum register");
      const auto& info = qregs_.at(op.reg);
      const int base = op.index ? info.offset + *op.index : info.offset;
      for (int i = 0; i < width; ++i) {
        const int qubit = base + i;
        if (!seen.insert(qubit).second) {
          throw ParseError("duplicate qubit in assertion operands", op.span);
        }
        assertion.qubits.push_back(qubit);
      }
    }
    validate_assertion_shape(stmt, static_cast<int>(assertion.qubits.size()),
                             span);
    return assertion;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Program program_;
  RegisterTable qregs_;
  RegisterTable cregs_;
};

inline Program parse(std::string_view source, int file_id = 0) {
  return Parser::parse(source, file_id);
}

inline Assertion parse_assertion(std::string_view statement_text,
                                 const RegisterTable& qregs) {
  return Parser::parse_assertion(statement_text, qregs);
}

} // namespace qdbg
