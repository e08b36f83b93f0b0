// Acceptance suite: every release criterion as one test, each printing a
// pass/fail line. Criteria 1, 2, 6, and 10 drive the installed CLI binary;
// the rest exercise the library directly.

#include "qdbg/benchgen.hpp"
#include "qdbg/diagnosis.hpp"
#include "qdbg/flatten.hpp"
#include "qdbg/mutation.hpp"
#include "qdbg/parser.hpp"
#include "qdbg/report.hpp"
#include "qdbg/runner.hpp"

#include "support/corpus.hpp"
#include "support/oracle.hpp"
#include "support/randprog.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace qdbg;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command =
      std::string(QDBG_BIN_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) {
    return {};
  }
  CliResult result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.output.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, bool passed, const std::string& detail) {
  std::printf("[criterion %2d] %s  %s\n", criterion,
              passed ? "PASS" : "FAIL", detail.c_str());
}

const nlohmann::ordered_json* find_assertion(const nlohmann::ordered_json& doc,
                                             int line, int occurrence) {
  for (const auto& entry : doc.at("assertions")) {
    if (entry.at("line") == line && entry.at("occurrence") == occurrence) {
      return &entry;
    }
  }
  return nullptr;
}

} // namespace

TEST(Acceptance, Criterion1BuggyGroverFails) {
  const Stopwatch timer;
  const CliResult result =
      run_cli("run " + corpus::path("grover_buggy.qasm") + " --format json");
  const double elapsed = timer.seconds();

  EXPECT_EQ(result.exit_code, 1);
  const auto doc = nlohmann::ordered_json::parse(result.output);
  const auto* sup1 = find_assertion(doc, 2, 1);
  const auto* ent1 = find_assertion(doc, 4, 1);
  const auto* eq21 = find_assertion(doc, 21, 1);
  const auto* eq25 = find_assertion(doc, 25, 1);
  ASSERT_NE(sup1, nullptr);
  ASSERT_NE(ent1, nullptr);
  ASSERT_NE(eq21, nullptr);
  ASSERT_NE(eq25, nullptr);
  EXPECT_FALSE(sup1->at("passed").get<bool>());
  EXPECT_FALSE(ent1->at("passed").get<bool>());
  EXPECT_FALSE(eq21->at("passed").get<bool>());
  EXPECT_FALSE(eq25->at("passed").get<bool>());
  EXPECT_LT(elapsed, 1.0);
  report(1, !testing::Test::HasFailure(),
         "buggy Grover exits 1; assert-sup(2), assert-ent(4), assert-eq(21), "
         "assert-eq(25) fail");
}

TEST(Acceptance, Criterion2CorrectedGroverPasses) {
  const Stopwatch timer;
  const CliResult result =
      run_cli("run " + corpus::path("grover_fixed.qasm") + " --format json");
  const double elapsed = timer.seconds();

  EXPECT_EQ(result.exit_code, 0);
  const auto doc = nlohmann::ordered_json::parse(result.output);
  const auto* eq21 = find_assertion(doc, 21, 1);
  const auto* eq25 = find_assertion(doc, 25, 1);
  ASSERT_NE(eq21, nullptr);
  ASSERT_NE(eq25, nullptr);
  EXPECT_TRUE(eq21->at("passed").get<bool>());
  EXPECT_TRUE(eq25->at("passed").get<bool>());

  const double fidelity = eq25->at("metrics").at("fidelity").get<double>();
  EXPECT_NEAR(fidelity, 0.9453, 0.002);

  // Independent brute-force matrix-product oracle on the gate prefix.
  std::string source = corpus::load("grover_fixed.qasm");
  source = source.substr(0, source.find("measure"));
  const FlatProgram flat = flatten(parse(source));
  const oracle::Vector psi = oracle::final_state(flat);
  double oracle_fidelity = 0.0;
  for (int flag_bit = 0; flag_bit <= 1; ++flag_bit) {
    oracle_fidelity += std::norm(psi(static_cast<Eigen::Index>(7 | (flag_bit << 3))));
  }
  EXPECT_NEAR(fidelity, oracle_fidelity, 1e-9);
  EXPECT_NEAR(oracle_fidelity, oracle::grover_probability(3, 2), 1e-12);
  EXPECT_LT(elapsed, 1.0);
  report(2, !testing::Test::HasFailure(),
         "corrected Grover exits 0; fidelity at the final assert-eq = " +
             std::to_string(fidelity) + " (0.9453 +- 0.002, oracle-checked)");
}

TEST(Acceptance, Criterion3ConeLineSetsExact) {
  const FlatProgram flat = flatten(parse(corpus::load("grover_buggy.qasm")));
  std::size_t line2_origin = 0;
  std::size_t line21_origin = 0;
  for (const auto& item : flat.items) {
    if (const auto* assertion = std::get_if<FlatAssertion>(&item)) {
      if (assertion->innermost().line == 2 && assertion->occurrence == 1) {
        line2_origin = assertion->origin_index;
      }
      if (assertion->innermost().line == 21) {
        line21_origin = assertion->origin_index;
      }
    }
  }
  const ConeOfInfluence cone2 = cone_of_influence(flat, line2_origin);
  EXPECT_EQ(cone2.source_lines, (std::set<int>{1, 2, 15, 19}));

  const ConeOfInfluence cone21 = cone_of_influence(flat, line21_origin);
  const std::set<int> all_instruction_lines{1, 2,  3,  4,  7,  8,  9, 10,
                                            11, 12, 15, 17, 19, 20, 21};
  EXPECT_EQ(cone21.source_lines, all_instruction_lines);
  report(3, !testing::Test::HasFailure(),
         "cone(line 2) = {1,15,19}+own; cone(line 21) = instruction lines "
         "1..20+own (set equality)");
}

TEST(Acceptance, Criterion4InteractionAnalysisExact) {
  const FlatProgram flat = flatten(parse(corpus::load("grover_buggy.qasm")));
  const ExecutionTrace trace = run(flat, 0);
  const auto diagnostics = diagnose(flat, trace);

  bool missing_interaction_q0 = false;
  bool control_hypothesis_line3 = false;
  for (const auto& diag : diagnostics) {
    if (diag.kind == DiagnosticKind::MissingInteraction &&
        diag.primary_span.line == 4 && diag.qubits == std::vector<int>{0}) {
      missing_interaction_q0 = true;
    }
    if (diag.kind == DiagnosticKind::MissingControlHypothesis &&
        diag.primary_span.line == 3) {
      control_hypothesis_line3 = true;
    }
  }
  EXPECT_TRUE(missing_interaction_q0);
  EXPECT_TRUE(control_hypothesis_line3);
  report(4, !testing::Test::HasFailure(),
         "line-4 failure reports q0 disconnected + missing-control hypothesis "
         "at line 3");
}

TEST(Acceptance, Criterion5ControlValueAnalysisExact) {
  const FlatProgram flat = flatten(parse(corpus::load("grover_buggy.qasm")));
  const ExecutionTrace trace = run(flat, 0);
  const auto& eq21 = trace.outcomes[2];
  const auto& eq25 = trace.outcomes[5];
  ASSERT_EQ(eq21.line(), 21);
  ASSERT_EQ(eq25.line(), 25);

  const ConeOfInfluence cone21 = cone_of_influence(flat, eq21.origin_index);
  const auto at21 = analyze_control_values(trace.marks, cone21, eq21, flat);
  bool zero_at_3 = false;
  for (const auto& diag : at21) {
    zero_at_3 = zero_at_3 || (diag.kind == DiagnosticKind::ControlAlwaysZero &&
                              diag.primary_span.line == 3);
  }
  EXPECT_TRUE(zero_at_3);

  const ConeOfInfluence cone25 = cone_of_influence(flat, eq25.origin_index);
  const auto at25 = analyze_control_values(trace.marks, cone25, eq25, flat);
  EXPECT_TRUE(at25.empty());
  report(5, !testing::Test::HasFailure(),
         "ccz(line 3) marked at first call, reported for line-21 failure, "
         "cleared before line-25 failure");
}

TEST(Acceptance, Criterion6DeutschJozsaConeAndStar) {
  const Stopwatch timer;
  const std::string source = corpus::load("dj_17.qasm");
  const int total_lines =
      static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  const FlatProgram flat = flatten(parse(source));
  ASSERT_EQ(flat.num_qubits, 17);

  std::size_t origin = 0;
  int assertion_line = 0;
  for (const auto& item : flat.items) {
    if (const auto* assertion = std::get_if<FlatAssertion>(&item)) {
      origin = assertion->origin_index;
      assertion_line = assertion->innermost().line;
      ASSERT_EQ(assertion->assertion.qubits.size(), 3U);
    }
  }
  const ConeOfInfluence cone = cone_of_influence(flat, origin);
  const double coverage =
      static_cast<double>(cone.source_lines.size()) / total_lines;
  EXPECT_LE(coverage, 0.15);

  // Star topology halfway through: every edge touches the ancilla.
  const CliResult dot =
      run_cli("graph " + corpus::path("dj_17.qasm") + " --at-fraction 0.5");
  EXPECT_EQ(dot.exit_code, 0);
  const std::size_t count = flat.instruction_count();
  const InteractionGraph graph =
      interaction_graph_prefix(flat, (count + 1) / 2);
  const int ancilla = 16;
  ASSERT_GE(graph.edges.size(), 2U);
  for (const auto& [edge, _] : graph.edges) {
    EXPECT_TRUE(edge.first == ancilla || edge.second == ancilla);
  }
  EXPECT_NE(dot.output.find("q16"), std::string::npos);
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 5.0);
  std::ostringstream detail;
  detail << "dj-17 cone covers " << cone.source_lines.size() << "/"
         << total_lines << " lines (" << coverage * 100.0
         << "% <= 15%) at line " << assertion_line
         << "; half-time interaction graph is a star on the ancilla";
  report(6, !testing::Test::HasFailure(), detail.str());
}

TEST(Acceptance, Criterion7RandomCircuitConeIsLarge) {
  const Stopwatch timer;
  const std::string source = corpus::load("random_12.qasm");
  const int total_lines =
      static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  const FlatProgram flat = flatten(parse(source));
  ASSERT_EQ(flat.num_qubits, 12);
  ASSERT_GE(flat.instruction_count(), 350U);

  std::size_t origin = 0;
  for (const auto& item : flat.items) {
    if (const auto* assertion = std::get_if<FlatAssertion>(&item)) {
      origin = assertion->origin_index;
      ASSERT_EQ(assertion->assertion.qubits.size(), 3U);
    }
  }
  const ConeOfInfluence cone = cone_of_influence(flat, origin);
  const double coverage =
      static_cast<double>(cone.source_lines.size()) / total_lines;
  EXPECT_GE(coverage, 0.80);
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 10.0);
  std::ostringstream detail;
  detail << "random-12 cone covers " << cone.source_lines.size() << "/"
         << total_lines << " lines (" << coverage * 100.0 << "% >= 80%)";
  report(7, !testing::Test::HasFailure(), detail.str());
}

TEST(Acceptance, Criterion8MutationTrendOrderings) {
  const Stopwatch timer;
  const Program program = parse(corpus::load("random_12.qasm"));
  const ExperimentReport experiment = run_experiment(program, 100, 0, 200);
  EXPECT_TRUE(experiment.baseline_passed);
  EXPECT_GT(experiment.remove.rate(), experiment.flip.rate());
  EXPECT_GT(experiment.early.rate(), experiment.late.rate());
  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 300.0);
  std::ostringstream detail;
  detail << "removal rate " << experiment.remove.rate() * 100.0
         << "% > flip rate " << experiment.flip.rate() * 100.0
         << "%; early rate " << experiment.early.rate() * 100.0
         << "% > late rate " << experiment.late.rate() * 100.0 << "% ("
         << experiment.detected << "/" << experiment.trials << " detected)";
  report(8, !testing::Test::HasFailure(), detail.str());
}

TEST(Acceptance, Criterion9PropertySuites) {
  const Stopwatch timer;

  // Simulator properties: norm preservation and brute-force matrix oracle
  // equivalence over 200 random programs of up to 6 qubits and 50 gates.
  RngState rng{20250811, 0};
  for (int trial = 0; trial < 200; ++trial) {
    randprog::Config config;
    config.num_qubits = 2 + static_cast<int>(rng.uniform_index(5));
    config.num_gates = 10 + static_cast<int>(rng.uniform_index(41));
    const std::string source = randprog::unitary_program(config, rng);
    const FlatProgram flat = flatten(parse(source));
    const ExecutionTrace trace = run(flat, 0);
    ASSERT_NEAR(trace.final_state.norm(), 1.0, 1e-10) << source;
    const oracle::Vector expected = oracle::final_state(flat);
    for (std::size_t i = 0; i < trace.final_state.size(); ++i) {
      ASSERT_NEAR(std::abs(trace.final_state.amplitude(i) -
                           expected(static_cast<Eigen::Index>(i))),
                  0.0, 1e-9)
          << source;
    }
  }

  // Cone soundness over 100 random programs: deleting everything outside the
  // cone leaves the asserted marginal unchanged.
  for (int trial = 0; trial < 100; ++trial) {
    randprog::Config config;
    config.num_qubits = 4 + static_cast<int>(rng.uniform_index(3));
    config.num_gates = 25;
    const std::string body = randprog::unitary_program(config, rng);
    const std::vector<int> asserted =
        randprog::random_subset(config.num_qubits, 2, rng);
    const std::string source = body + "assert-sup q[" +
                               std::to_string(asserted[0]) + "], q[" +
                               std::to_string(asserted[1]) + "];\n";
    const FlatProgram flat = flatten(parse(source));
    std::size_t origin = 0;
    for (const auto& item : flat.items) {
      if (std::holds_alternative<FlatAssertion>(item)) {
        origin = std::get<FlatAssertion>(item).origin_index;
      }
    }
    const ConeOfInfluence cone = cone_of_influence(flat, origin);
    std::vector<std::string> lines;
    std::istringstream stream(source);
    for (std::string line; std::getline(stream, line);) {
      lines.push_back(line);
    }
    std::string reduced;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const int line_no = static_cast<int>(i) + 1;
      if (line_no == 1 || cone.source_lines.count(line_no) != 0) {
        reduced += lines[i] + "\n";
      }
    }
    const Statevector full_state = run(flat, 0).final_state;
    const Statevector reduced_state =
        run(flatten(parse(reduced)), 0).final_state;
    const ReducedDensityMatrix rho_full =
        reduced_density_matrix(full_state, asserted);
    const ReducedDensityMatrix rho_reduced =
        reduced_density_matrix(reduced_state, asserted);
    ASSERT_NEAR((rho_full.matrix - rho_reduced.matrix).cwiseAbs().maxCoeff(),
                0.0, 1e-9)
        << source;
  }

  // Interaction connectivity against the union-find oracle over 100 random
  // programs.
  for (int trial = 0; trial < 100; ++trial) {
    randprog::Config config;
    config.num_qubits = 4 + static_cast<int>(rng.uniform_index(4));
    config.num_gates = 18;
    const FlatProgram flat =
        flatten(parse(randprog::unitary_program(config, rng)));
    std::set<std::size_t> window;
    for (std::size_t i = 0; i < flat.items.size(); ++i) {
      window.insert(i);
    }
    const InteractionGraph graph = interaction_graph(flat, window);
    oracle::UnionFind uf = oracle::connectivity(flat, window);
    const auto roots = graph.components();
    for (int a = 0; a < flat.num_qubits; ++a) {
      for (int b = a + 1; b < flat.num_qubits; ++b) {
        const bool graph_connected = roots.count(a) != 0 &&
                                     roots.count(b) != 0 &&
                                     roots.at(a) == roots.at(b);
        ASSERT_EQ(graph_connected, uf.connected(a, b));
      }
    }
  }

  const double elapsed = timer.seconds();
  EXPECT_LT(elapsed, 120.0);
  std::ostringstream detail;
  detail << "200 oracle-equivalence + norm programs, 100 cone-soundness "
            "programs, 100 connectivity programs in "
         << elapsed << " s";
  report(9, !testing::Test::HasFailure(), detail.str());
}

TEST(Acceptance, Criterion10DeterministicJsonOutput) {
  for (const char* name :
       {"grover_buggy.qasm", "grover_fixed.qasm", "grover_listing1.qasm",
        "bell.qasm", "dj_17.qasm", "random_12.qasm"}) {
    const std::string args = "run " + corpus::path(name) + " --format json";
    const CliResult first = run_cli(args);
    const CliResult second = run_cli(args);
    EXPECT_FALSE(first.output.empty()) << name;
    EXPECT_EQ(first.output, second.output) << name;
    EXPECT_EQ(first.exit_code, second.exit_code) << name;
  }
  report(10, !testing::Test::HasFailure(),
         "two consecutive `run --format json` invocations are byte-identical "
         "on every corpus file");
}
