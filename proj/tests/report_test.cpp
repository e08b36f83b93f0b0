#include "qdbg/diagnosis.hpp"
#include "qdbg/flatten.hpp"
#include "qdbg/parser.hpp"
#include "qdbg/report.hpp"
#include "qdbg/runner.hpp"

#include "support/corpus.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <string>

using namespace qdbg;

namespace {

DiagnosticsReport report_for(const std::string& name, std::uint64_t seed = 0) {
  const std::string source = corpus::load(name);
  const FlatProgram flat = flatten(parse(source));
  const ExecutionTrace trace = run(flat, seed);
  const auto diagnostics = diagnose(flat, trace);
  const int lines =
      static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  return build_report(name, lines, flat, trace, diagnostics);
}

} // namespace

TEST(Report, JsonRoundTripsToEqualStructure) {
  const DiagnosticsReport report = report_for("grover_buggy.qasm");
  const std::string text = render_json(report);
  const DiagnosticsReport parsed = parse_report(text);
  EXPECT_EQ(parsed, report);
  EXPECT_EQ(render_json(parsed), text);
}

TEST(Report, FixedTopLevelSchema) {
  const DiagnosticsReport report = report_for("grover_buggy.qasm");
  const auto doc = nlohmann::ordered_json::parse(render_json(report));
  std::vector<std::string> keys;
  for (const auto& [key, _] : doc.items()) {
    keys.push_back(key);
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"version", "program", "assertions",
                                            "diagnostics", "summary"}));
  EXPECT_EQ(doc["program"]["qubits"], 4);
  EXPECT_EQ(doc["program"]["lines"], 27);
  EXPECT_EQ(doc["summary"]["checked"], 6);
  EXPECT_EQ(doc["summary"]["failed"], 4);
  EXPECT_EQ(doc["summary"]["exit_code"], 1);
}

TEST(Report, EmptyDiagnosticsSerializeAsEmptyArray) {
  const DiagnosticsReport report = report_for("grover_fixed.qasm");
  EXPECT_EQ(report.exit_code, 0);
  const auto doc = nlohmann::ordered_json::parse(render_json(report));
  EXPECT_TRUE(doc["diagnostics"].is_array());
  EXPECT_TRUE(doc["diagnostics"].empty());
}

TEST(Report, ByteStableAcrossIdenticalRuns) {
  const std::string a = render_json(report_for("grover_buggy.qasm", 5));
  const std::string b = render_json(report_for("grover_buggy.qasm", 5));
  EXPECT_EQ(a, b);
}

TEST(Report, TextContainsPaperPhrasing) {
  const DiagnosticsReport report = report_for("grover_buggy.qasm");
  const std::string text = render_text(report, false);
  EXPECT_NE(text.find("Line 3"), std::string::npos);
  EXPECT_NE(text.find("before Line 19"), std::string::npos);
  // Failed assert-eq renders its similarity metric.
  EXPECT_NE(text.find("similarity 0.2500"), std::string::npos);
}

TEST(Report, TextAndJsonAgreeOnDiagnostics) {
  const DiagnosticsReport report = report_for("grover_buggy.qasm");
  const std::string text = render_text(report, false);
  const auto doc = nlohmann::ordered_json::parse(render_json(report));
  EXPECT_EQ(doc["diagnostics"].size(), report.diagnostics.size());
  for (const auto& diag : report.diagnostics) {
    EXPECT_NE(text.find(diag.message), std::string::npos) << diag.message;
  }
}

TEST(Report, ColorCodesOnlyWhenEnabled) {
  const DiagnosticsReport report = report_for("grover_buggy.qasm");
  EXPECT_EQ(render_text(report, false).find('\x1b'), std::string::npos);
  EXPECT_NE(render_text(report, true).find('\x1b'), std::string::npos);
}
