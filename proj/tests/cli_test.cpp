// End-to-end checks of the command-line surface via the built binary.

#include "support/corpus.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <string>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string command =
      env + " " + std::string(QDBG_BIN_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
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

} // namespace

TEST(Cli, ExitCodesAreTotal) {
  EXPECT_EQ(run_cli("run " + corpus::path("grover_fixed.qasm")).exit_code, 0);
  EXPECT_EQ(run_cli("run " + corpus::path("grover_buggy.qasm")).exit_code, 1);
  EXPECT_EQ(run_cli("run /no/such/file.qasm").exit_code, 2);
  // Resource ceiling: 4 qubits with a 3-qubit cap.
  EXPECT_EQ(
      run_cli("run " + corpus::path("grover_fixed.qasm") + " --max-qubits 3")
          .exit_code,
      3);
}

TEST(Cli, ParseErrorRendersCaret) {
  const std::string bad = "/tmp/qdbg_cli_test_bad.qasm";
  {
    std::ofstream out(bad);
    out << "qreg q[2];\nh q[5];\n";
  }
  const CliResult result = run_cli("run " + bad);
  EXPECT_EQ(result.exit_code, 2);
  EXPECT_NE(result.output.find("--> " + bad + ":2"), std::string::npos);
  EXPECT_NE(result.output.find('^'), std::string::npos);
}

TEST(Cli, MaxQubitsEnvMirrorsFlag) {
  EXPECT_EQ(run_cli("run " + corpus::path("grover_fixed.qasm"),
                    "QDBG_MAX_QUBITS=3")
                .exit_code,
            3);
  // The explicit flag wins over the environment.
  EXPECT_EQ(run_cli("run " + corpus::path("grover_fixed.qasm") +
                        " --max-qubits 24",
                    "QDBG_MAX_QUBITS=3")
                .exit_code,
            0);
}

TEST(Cli, SliceMarksConeLines) {
  const CliResult result =
      run_cli("slice " + corpus::path("grover_buggy.qasm") + " --line 2");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.output.find("+    1 |"), std::string::npos);
  EXPECT_NE(result.output.find("+   15 |"), std::string::npos);
  EXPECT_NE(result.output.find("+   19 |"), std::string::npos);
  EXPECT_NE(result.output.find(".    3 |"), std::string::npos);
}

TEST(Cli, SliceOnNonAssertionLineNamesAlternatives) {
  const CliResult result =
      run_cli("slice " + corpus::path("grover_buggy.qasm") + " --line 3");
  EXPECT_EQ(result.exit_code, 2);
  EXPECT_NE(result.output.find("no assertion on line 3"), std::string::npos);
  EXPECT_NE(result.output.find("2 4 21 25"), std::string::npos);
}

TEST(Cli, GraphFractionValidation) {
  EXPECT_EQ(run_cli("graph " + corpus::path("grover_listing1.qasm") +
                    " --at-fraction 0")
                .exit_code,
            2);
  EXPECT_EQ(run_cli("graph " + corpus::path("grover_listing1.qasm") +
                    " --at-fraction 1.5")
                .exit_code,
            2);
}

TEST(Cli, GraphListing1IsConnected) {
  const CliResult result =
      run_cli("graph " + corpus::path("grover_listing1.qasm"));
  EXPECT_EQ(result.exit_code, 0);
  // Hand-enumerated pairs: both ccz gates connect q0..q2 and flag (q3).
  for (const char* edge : {"q1 -- q2", "q1 -- q3", "q2 -- q3", "q0 -- q1",
                           "q0 -- q2"}) {
    EXPECT_NE(result.output.find(edge), std::string::npos) << edge;
  }
}

TEST(Cli, GraphTinyFractionKeepsOneGate) {
  const std::string tiny = "/tmp/qdbg_cli_test_tiny.qasm";
  {
    std::ofstream out(tiny);
    out << "qreg q[3];\ncx q[0], q[1];\ncx q[1], q[2];\n";
  }
  const CliResult result = run_cli("graph " + tiny + " --at-fraction 0.01");
  EXPECT_EQ(result.exit_code, 0);
  EXPECT_NE(result.output.find("q0 -- q1"), std::string::npos);
  EXPECT_EQ(result.output.find("q1 -- q2"), std::string::npos);
}

TEST(Cli, MutateWritesCsv) {
  const std::string csv = "/tmp/qdbg_cli_test_trials.csv";
  std::remove(csv.c_str());
  const CliResult result =
      run_cli("mutate " + corpus::path("grover_fixed.qasm") +
              " --trials 10 --seed 1 --csv " + csv);
  EXPECT_EQ(result.exit_code, 0);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "site_line,kind,detected,diagnostic_lines");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
  }
  EXPECT_EQ(rows, 10);
}

TEST(Cli, MutateRejectsFailingBaseline) {
  const CliResult strict = run_cli("mutate " +
                                   corpus::path("grover_buggy.qasm") +
                                   " --trials 5");
  EXPECT_EQ(strict.exit_code, 2);
  const CliResult waived =
      run_cli("mutate " + corpus::path("grover_buggy.qasm") +
              " --trials 5 --allow-failing-baseline");
  EXPECT_EQ(waived.exit_code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
  EXPECT_EQ(run_cli("run").exit_code, 2);
  EXPECT_EQ(run_cli("run x.qasm --format yaml").exit_code, 2);
}
