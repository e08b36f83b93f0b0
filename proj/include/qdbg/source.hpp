/**
 * @file source.hpp
 * @brief Source locations and error types shared by all stages.
 */

#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <tuple>

namespace qdbg {

/// Location of a token or statement in the input text.
/// Lines and columns are 1-based; column_end is inclusive.
struct SourceSpan {
  int line = 1;
  int column_start = 1;
  int column_end = 1;
  int file_id = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
  friend auto operator<=>(const SourceSpan&, const SourceSpan&) = default;
};

/// Identity of a source statement: enough to recognize the same statement
/// across flattened copies (file, line, start column).
using SpanKey = std::tuple<int, int, int>;

inline SpanKey span_key(const SourceSpan& span) {
  return {span.file_id, span.line, span.column_start};
}

/// Lexical, syntactic, or validation failure. Carries the offending span.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, SourceSpan span)
      : std::runtime_error(std::move(message)), span_(span) {}

  [[nodiscard]] const SourceSpan& span() const { return span_; }

private:
  SourceSpan span_;
};

/// Requested simulation exceeds the configured resource ceiling.
class ResourceLimitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Simulation produced a non-finite amplitude or an impossible collapse.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace qdbg
