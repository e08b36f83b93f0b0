/**
 * @file qdbg.cpp
 * @brief Command-line driver: run programs with assertion checking and
 *        diagnosis, print backward slices, export interaction graphs, and
 *        drive mutation experiments.
 */

#include "qdbg/benchgen.hpp"
#include "qdbg/diagnosis.hpp"
#include "qdbg/flatten.hpp"
#include "qdbg/mutation.hpp"
#include "qdbg/parser.hpp"
#include "qdbg/report.hpp"
#include "qdbg/runner.hpp"
#include "qdbg/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertionsFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitResourceError = 3;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (const char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    lines.push_back(current);
  }
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool use_color(qdbg::ColorMode mode) {
  switch (mode) {
  case qdbg::ColorMode::Always:
    return true;
  case qdbg::ColorMode::Never:
    return false;
  case qdbg::ColorMode::Auto:
    return isatty(fileno(stdout)) != 0;
  }
  return false;
}

void print_parse_error(const qdbg::ParseError& error, const std::string& path,
                       const std::vector<std::string>& lines) {
  const auto& span = error.span();
  std::cerr << "error: " << error.what() << "\n";
  std::cerr << "  --> " << path << ":" << span.line << ":" << span.column_start
            << "\n";
  if (span.line >= 1 && span.line <= static_cast<int>(lines.size())) {
    const std::string& text = lines[static_cast<std::size_t>(span.line - 1)];
    char label[16];
    std::snprintf(label, sizeof(label), "%4d", span.line);
    std::cerr << "     |\n";
    std::cerr << label << " | " << text << "\n";
    std::cerr << "     | ";
    for (int i = 1; i < span.column_start; ++i) {
      std::cerr << ' ';
    }
    const int width = std::max(1, span.column_end - span.column_start + 1);
    for (int i = 0; i < width; ++i) {
      std::cerr << '^';
    }
    std::cerr << "\n";
  }
}

int effective_max_qubits(int flag_value, bool flag_given) {
  if (flag_given) {
    return flag_value;
  }
  if (const char* env = std::getenv("QDBG_MAX_QUBITS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) {
      return parsed;
    }
  }
  return flag_value;
}

struct LoadedProgram {
  std::string source;
  std::vector<std::string> lines;
  qdbg::Program program;
  qdbg::FlatProgram flat;
};

LoadedProgram load(const std::string& path) {
  LoadedProgram loaded;
  loaded.source = read_file(path);
  loaded.lines = split_lines(loaded.source);
  loaded.program = qdbg::parse(loaded.source);
  loaded.flat = qdbg::flatten(loaded.program);
  return loaded;
}

int cmd_run(const qdbg::RunConfig& config) {
  LoadedProgram loaded;
  try {
    loaded = load(config.input_path);
  } catch (const qdbg::ParseError& error) {
    print_parse_error(error, config.input_path,
                      split_lines(read_file(config.input_path)));
    return kExitInputError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }

  try {
    qdbg::SimLimits limits{config.max_qubits};
    const qdbg::ExecutionTrace trace =
        qdbg::run(loaded.flat, config.seed, limits);
    const std::vector<qdbg::Diagnostic> diagnostics =
        qdbg::diagnose(loaded.flat, trace);
    const qdbg::DiagnosticsReport report = qdbg::build_report(
        config.input_path, static_cast<int>(loaded.lines.size()), loaded.flat,
        trace, diagnostics);
    if (config.format == "json") {
      std::cout << qdbg::render_json(report);
    } else {
      std::cout << qdbg::render_text(report, use_color(config.color));
    }
    return report.exit_code;
  } catch (const qdbg::ResourceLimitError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitResourceError;
  } catch (const qdbg::NumericalError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitResourceError;
  }
}

int cmd_slice(const std::string& path, int line, bool as_json) {
  LoadedProgram loaded;
  try {
    loaded = load(path);
  } catch (const qdbg::ParseError& error) {
    print_parse_error(error, path, split_lines(read_file(path)));
    return kExitInputError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }

  std::optional<std::size_t> origin;
  std::set<int> assertion_lines;
  for (const auto& item : loaded.flat.items) {
    if (const auto* assertion = std::get_if<qdbg::FlatAssertion>(&item)) {
      assertion_lines.insert(assertion->innermost().line);
      if (assertion->innermost().line == line && !origin) {
        origin = assertion->origin_index;
      }
    }
  }
  if (!origin) {
    std::cerr << "error: no assertion on line " << line << "\n";
    if (!assertion_lines.empty()) {
      std::cerr << "assertions are on lines:";
      for (const int l : assertion_lines) {
        std::cerr << " " << l;
      }
      std::cerr << "\n";
    }
    return kExitInputError;
  }

  const qdbg::ConeOfInfluence cone =
      qdbg::cone_of_influence(loaded.flat, *origin);
  if (as_json) {
    nlohmann::ordered_json doc;
    doc["assertion_line"] = line;
    doc["lines"] = cone.source_lines;
    std::cout << doc.dump(2) << "\n";
    return kExitPass;
  }
  for (std::size_t i = 0; i < loaded.lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const char prefix = cone.source_lines.count(line_no) != 0 ? '+' : '.';
    std::printf("%c %4d | %s\n", prefix, line_no, loaded.lines[i].c_str());
  }
  return kExitPass;
}

int cmd_graph(const std::string& path, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    std::cerr << "error: --at-fraction must be in (0, 1]\n";
    return kExitInputError;
  }
  LoadedProgram loaded;
  try {
    loaded = load(path);
  } catch (const qdbg::ParseError& error) {
    print_parse_error(error, path, split_lines(read_file(path)));
    return kExitInputError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }
  const std::size_t total = loaded.flat.instruction_count();
  const auto count = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(total)));
  std::cout << qdbg::to_dot(qdbg::interaction_graph_prefix(loaded.flat, count));
  return kExitPass;
}

int cmd_mutate(const std::string& path, int trials, std::uint64_t seed,
               int line_threshold, bool as_json, const std::string& csv_path,
               bool waive_baseline) {
  LoadedProgram loaded;
  try {
    loaded = load(path);
  } catch (const qdbg::ParseError& error) {
    print_parse_error(error, path, split_lines(read_file(path)));
    return kExitInputError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  }
  if (line_threshold <= 0) {
    line_threshold = static_cast<int>(loaded.lines.size()) / 2;
  }

  qdbg::ExperimentReport report;
  try {
    report = qdbg::run_experiment(loaded.program, trials, seed, line_threshold,
                                  waive_baseline);
  } catch (const qdbg::BaselineError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInputError;
  } catch (const qdbg::ResourceLimitError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitResourceError;
  }

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    csv << qdbg::to_csv(report);
  }

  if (as_json) {
    nlohmann::ordered_json doc;
    doc["trials"] = report.trials;
    doc["detected"] = report.detected;
    doc["rates"] = {{"flip", report.flip.rate()},
                    {"remove", report.remove.rate()}};
    doc["buckets"] = {
        {"threshold", report.line_threshold},
        {"early",
         {{"trials", report.early.trials}, {"detected", report.early.detected}}},
        {"late",
         {{"trials", report.late.trials}, {"detected", report.late.detected}}}};
    auto records = nlohmann::ordered_json::array();
    for (const auto& record : report.records) {
      records.push_back({{"line", record.spec.source_line},
                         {"kind", qdbg::to_string(record.spec.kind)},
                         {"detected", record.detected},
                         {"diagnostic_lines", record.diagnostic_lines}});
    }
    doc["records"] = std::move(records);
    std::cout << doc.dump(2) << "\n";
    return kExitPass;
  }

  std::printf("mutation experiment: %d trials, seed %llu\n", report.trials,
              static_cast<unsigned long long>(seed));
  std::printf("baseline: %s\n",
              report.baseline_passed ? "all assertions pass"
                                     : "FAILING (waived)");
  std::printf("detected: %d/%d (%.1f%%)\n", report.detected, report.trials,
              100.0 * report.detection_rate());
  std::printf("  flip:    %d/%d (%.1f%%)\n", report.flip.detected,
              report.flip.trials, 100.0 * report.flip.rate());
  std::printf("  remove:  %d/%d (%.1f%%)\n", report.remove.detected,
              report.remove.trials, 100.0 * report.remove.rate());
  std::printf("  early (line <= %d): %d/%d (%.1f%%)\n", report.line_threshold,
              report.early.detected, report.early.trials,
              100.0 * report.early.rate());
  std::printf("  late  (line  > %d): %d/%d (%.1f%%)\n", report.line_threshold,
              report.late.detected, report.late.trials,
              100.0 * report.late.rate());
  return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdbg: assertion-based debugger for quantum programs"};
  app.set_version_flag("--version", qdbg::kVersion);
  app.require_subcommand(1);

  // run
  qdbg::RunConfig config;
  std::string color_name = "auto";
  auto* run_cmd =
      app.add_subcommand("run", "simulate, check assertions, diagnose");
  run_cmd->add_option("file", config.input_path, "input program")->required();
  run_cmd->add_option("--seed", config.seed, "measurement seed (default 0)");
  run_cmd->add_option("--format", config.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  auto* max_qubits_opt = run_cmd->add_option("--max-qubits", config.max_qubits,
                                             "simulator qubit ceiling");
  run_cmd->add_option("--color", color_name, "auto, always, or never")
      ->check(CLI::IsMember({"auto", "always", "never"}));

  // slice
  std::string slice_path;
  int slice_line = 0;
  bool slice_json = false;
  auto* slice_cmd =
      app.add_subcommand("slice", "print the cone of influence of an assertion");
  slice_cmd->add_option("file", slice_path, "input program")->required();
  slice_cmd->add_option("--line", slice_line, "assertion line")->required();
  slice_cmd->add_flag("--json", slice_json, "emit the line set as JSON");

  // graph
  std::string graph_path;
  double fraction = 1.0;
  auto* graph_cmd =
      app.add_subcommand("graph", "export the interaction graph as DOT");
  graph_cmd->add_option("file", graph_path, "input program")->required();
  graph_cmd->add_option("--at-fraction", fraction,
                        "build over the first fraction of instructions");

  // mutate
  std::string mutate_path;
  int trials = 100;
  std::uint64_t mutate_seed = 0;
  int line_threshold = 0;
  bool mutate_json = false;
  std::string csv_path;
  bool waive_baseline = false;
  auto* mutate_cmd =
      app.add_subcommand("mutate", "run a fault-injection experiment");
  mutate_cmd->add_option("file", mutate_path, "input program")->required();
  mutate_cmd->add_option("--trials", trials, "number of trials (default 100)");
  mutate_cmd->add_option("--seed", mutate_seed, "experiment seed (default 0)");
  mutate_cmd->add_option("--line-threshold", line_threshold,
                         "early/late bucket boundary (default: mid-file)");
  mutate_cmd->add_flag("--json", mutate_json, "emit a JSON report");
  mutate_cmd->add_option("--csv", csv_path, "write per-trial rows to a file");
  mutate_cmd->add_flag("--allow-failing-baseline", waive_baseline,
                       "proceed even when the unmutated program fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitPass : kExitInputError;
  }

  if (run_cmd->parsed()) {
    config.max_qubits =
        effective_max_qubits(config.max_qubits, max_qubits_opt->count() > 0);
    if (color_name == "always") {
      config.color = qdbg::ColorMode::Always;
    } else if (color_name == "never") {
      config.color = qdbg::ColorMode::Never;
    }
    return cmd_run(config);
  }
  if (slice_cmd->parsed()) {
    return cmd_slice(slice_path, slice_line, slice_json);
  }
  if (graph_cmd->parsed()) {
    return cmd_graph(graph_path, fraction);
  }
  return cmd_mutate(mutate_path, trials, mutate_seed, line_threshold,
                    mutate_json, csv_path, waive_baseline);
}
