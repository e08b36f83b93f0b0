/**
 * @file report.hpp
 * @brief Machine- and human-readable reports of a debugging run.
 *
 * The JSON schema is fixed: top-level keys `version`, `program`, `assertions`,
 * `diagnostics`, `summary` with stable field order, so identical runs render
 * byte-identically.
 */

#pragma once

#include "qdbg/diagnosis.hpp"
#include "qdbg/runner.hpp"
#include "qdbg/version.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qdbg {

enum class ColorMode { Auto, Always, Never };

struct RunConfig {
  std::string input_path;
  std::uint64_t seed = 0;
  std::string format = "text"; // text | json
  int max_qubits = 24;
  ColorMode color = ColorMode::Auto;
};

struct ReportAssertion {
  int line = 0;
  std::string kind;
  int occurrence = 1;
  bool passed = false;
  nlohmann::ordered_json metrics;

  friend bool operator==(const ReportAssertion&,
                         const ReportAssertion&) = default;
};

struct ReportRelated {
  int line = 0;
  std::string note;

  friend bool operator==(const ReportRelated&, const ReportRelated&) = default;
};

struct ReportDiagnostic {
  std::string kind;
  int line = 0;
  int col_start = 0;
  int col_end = 0;
  std::string message;
  std::vector<ReportRelated> related;

  friend bool operator==(const ReportDiagnostic&,
                         const ReportDiagnostic&) = default;
};

struct DiagnosticsReport {
  std::string version;
  std::string path;
  int lines = 0;
  int qubits = 0;
  std::vector<ReportAssertion> assertions;
  std::vector<ReportDiagnostic> diagnostics;
  int checked = 0;
  int failed = 0;
  int exit_code = 0;

  friend bool operator==(const DiagnosticsReport&,
                         const DiagnosticsReport&) = default;
};

namespace detail {

inline nlohmann::ordered_json metrics_json(const AssertionOutcome& outcome) {
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  if (const auto* sup = std::get_if<SuperpositionEvidence>(&outcome.metrics)) {
    metrics["basis_states"] = sup->basis_states;
    if (!outcome.passed) {
      metrics["dominant"] = sup->dominant;
    }
  } else if (const auto* ent =
                 std::get_if<EntanglementEvidence>(&outcome.metrics)) {
    auto cuts = nlohmann::ordered_json::array();
    for (const auto& cut : ent->product_cuts) {
      cuts.push_back({{"qubit", cut.qubit}, {"deviation", cut.deviation}});
    }
    metrics["product_cuts"] = std::move(cuts);
  } else if (const auto* eq = std::get_if<EqualityEvidence>(&outcome.metrics)) {
    metrics["fidelity"] = eq->fidelity;
    metrics["similarity"] = eq->similarity;
  }
  return metrics;
}

inline std::string format_metric(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

} // namespace detail

inline DiagnosticsReport build_report(const std::string& path, int source_lines,
                                      const FlatProgram& flat,
                                      const ExecutionTrace& trace,
                                      const std::vector<Diagnostic>& diagnostics) {
  DiagnosticsReport report;
  report.version = kVersion;
  report.path = path;
  report.lines = source_lines;
  report.qubits = flat.num_qubits;
  for (const auto& outcome : trace.outcomes) {
    ReportAssertion entry;
    entry.line = outcome.line();
    entry.kind = to_string(outcome.assertion.kind);
    entry.occurrence = outcome.occurrence;
    entry.passed = outcome.passed;
    entry.metrics = detail::metrics_json(outcome);
    report.assertions.push_back(std::move(entry));
  }
  for (const auto& diag : diagnostics) {
    ReportDiagnostic entry;
    entry.kind = to_string(diag.kind);
    entry.line = diag.primary_span.line;
    entry.col_start = diag.primary_span.column_start;
    entry.col_end = diag.primary_span.column_end;
    entry.message = diag.message;
    for (const auto& related : diag.related_spans) {
      entry.related.push_back({related.span.line, related.note});
    }
    report.diagnostics.push_back(std::move(entry));
  }
  report.checked = static_cast<int>(trace.outcomes.size());
  report.failed = static_cast<int>(trace.failed_count());
  report.exit_code = report.failed > 0 ? 1 : 0;
  return report;
}

inline std::string render_json(const DiagnosticsReport& report) {
  nlohmann::ordered_json doc;
  doc["version"] = report.version;
  doc["program"] = {{"path", report.path},
                    {"lines", report.lines},
                    {"qubits", report.qubits}};
  auto assertions = nlohmann::ordered_json::array();
  for (const auto& entry : report.assertions) {
    assertions.push_back({{"line", entry.line},
                          {"kind", entry.kind},
                          {"occurrence", entry.occurrence},
                          {"passed", entry.passed},
                          {"metrics", entry.metrics}});
  }
  doc["assertions"] = std::move(assertions);
  auto diagnostics = nlohmann::ordered_json::array();
  for (const auto& entry : report.diagnostics) {
    auto related = nlohmann::ordered_json::array();
    for (const auto& rel : entry.related) {
      related.push_back({{"line", rel.line}, {"note", rel.note}});
    }
    diagnostics.push_back({{"kind", entry.kind},
                           {"line", entry.line},
                           {"col_start", entry.col_start},
                           {"col_end", entry.col_end},
                           {"message", entry.message},
                           {"related", std::move(related)}});
  }
  doc["diagnostics"] = std::move(diagnostics);
  doc["summary"] = {{"checked", report.checked},
                    {"failed", report.failed},
                    {"exit_code", report.exit_code}};
  return doc.dump(2) + "\n";
}

inline DiagnosticsReport parse_report(const std::string& text) {
  const auto doc = nlohmann::ordered_json::parse(text);
  DiagnosticsReport report;
  report.version = doc.at("version").get<std::string>();
  report.path = doc.at("program").at("path").get<std::string>();
  report.lines = doc.at("program").at("lines").get<int>();
  report.qubits = doc.at("program").at("qubits").get<int>();
  for (const auto& entry : doc.at("assertions")) {
    ReportAssertion assertion;
    assertion.line = entry.at("line").get<int>();
    assertion.kind = entry.at("kind").get<std::string>();
    assertion.occurrence = entry.at("occurrence").get<int>();
    assertion.passed = entry.at("passed").get<bool>();
    assertion.metrics = entry.at("metrics");
    report.assertions.push_back(std::move(assertion));
  }
  for (const auto& entry : doc.at("diagnostics")) {
    ReportDiagnostic diag;
    diag.kind = entry.at("kind").get<std::string>();
    diag.line = entry.at("line").get<int>();
    diag.col_start = entry.at("col_start").get<int>();
    diag.col_end = entry.at("col_end").get<int>();
    diag.message = entry.at("message").get<std::string>();
    for (const auto& rel : entry.at("related")) {
      diag.related.push_back(
          {rel.at("line").get<int>(), rel.at("note").get<std::string>()});
    }
    report.diagnostics.push_back(std::move(diag));
  }
  report.checked = doc.at("summary").at("checked").get<int>();
  report.failed = doc.at("summary").at("failed").get<int>();
  report.exit_code = doc.at("summary").at("exit_code").get<int>();
  return report;
}

inline std::string render_text(const DiagnosticsReport& report,
                               bool color = false) {
  const char* red = color ? "\x1b[31m" : "";
  const char* green = color ? "\x1b[32m" : "";
  const char* bold = color ? "\x1b[1m" : "";
  const char* off = color ? "\x1b[0m" : "";
  std::ostringstream out;
  out << bold << report.path << off << ": " << report.qubits << " qubits, "
      << report.checked << " assertions checked, " << report.failed
      << " failed\n";
  if (!report.assertions.empty()) {
    out << "\nassertions:\n";
  }
  for (const auto& entry : report.assertions) {
    if (entry.passed) {
      out << "  " << green << "[pass]" << off;
    } else {
      out << "  " << red << "[FAIL]" << off;
    }
    const char* keyword = entry.kind == "equality"
                              ? "assert-eq"
                              : (entry.kind == "entanglement" ? "assert-ent"
                                                              : "assert-sup");
    out << " Line " << entry.line << "  " << keyword << " #"
        << entry.occurrence;
    if (entry.kind == "equality") {
      out << "  (similarity "
          << detail::format_metric(entry.metrics.at("similarity").get<double>())
          << ", fidelity "
          << detail::format_metric(entry.metrics.at("fidelity").get<double>())
          << ")";
    } else if (!entry.passed && entry.kind == "superposition") {
      out << "  (dominant basis state |"
          << entry.metrics.at("dominant").get<std::string>() << ">)";
    }
    out << "\n";
  }
  if (!report.diagnostics.empty()) {
    out << "\ndiagnostics:\n";
  }
  for (const auto& entry : report.diagnostics) {
    out << "  Line " << entry.line << ": " << bold << "[" << entry.kind << "]"
        << off << " " << entry.message << "\n";
    for (const auto& rel : entry.related) {
      out << "      note: Line " << rel.line << ": " << rel.note << "\n";
    }
  }
  out << "\nsummary: " << report.checked << " checked, " << report.failed
      << " failed, exit code " << report.exit_code << "\n";
  return out.str();
}

} // namespace qdbg
