/**
 * @file mutation.hpp
 * @brief Fault-injection experiments: flip control/target or remove a single
 *        instruction, run the diagnosis pipeline, and measure how often it
 *        points at the mutated line.
 */

#pragma once

#include "qdbg/diagnosis.hpp"
#include "qdbg/flatten.hpp"
#include "qdbg/printer.hpp"
#include "qdbg/runner.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qdbg {

enum class MutationKind { FlipControlTarget, RemoveInstruction };

inline const char* to_string(MutationKind kind) {
  return kind == MutationKind::FlipControlTarget ? "flip" : "remove";
}

/// One candidate fault-injection site. Mutations act on the unflattened
/// program, so a site inside a gate body mutates the definition once, not
/// per call; `site` is the first flattened instance, `key` the source
/// statement identity.
struct MutationSpec {
  std::size_t site = 0;
  MutationKind kind = MutationKind::FlipControlTarget;
  int source_line = 0;
  SpanKey key;
};

class BaselineError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One FlipControlTarget spec per controlled source instruction and one
/// RemoveInstruction spec per instruction (assertions and declarations are
/// not sites). Deterministic order: flips first, then removals, each by
/// first flattened occurrence.
inline std::vector<MutationSpec> enumerate_sites(const FlatProgram& flat) {
  std::vector<MutationSpec> flips;
  std::vector<MutationSpec> removals;
  std::set<SpanKey> seen_flip;
  std::set<SpanKey> seen_remove;
  for (const auto& item : flat.items) {
    const auto* instr = std::get_if<FlatInstruction>(&item);
    if (instr == nullptr) {
      continue;
    }
    const SpanKey key = span_key(instr->innermost());
    if (!instr->controls.empty() && seen_flip.insert(key).second) {
      flips.push_back({instr->origin_index, MutationKind::FlipControlTarget,
                       instr->innermost().line, key});
    }
    if (seen_remove.insert(key).second) {
      removals.push_back({instr->origin_index, MutationKind::RemoveInstruction,
                          instr->innermost().line, key});
    }
  }
  flips.insert(flips.end(), removals.begin(), removals.end());
  return flips;
}

namespace detail {

inline bool mutate_statement_list(std::vector<Statement>& statements,
                                  const MutationSpec& spec) {
  for (std::size_t i = 0; i < statements.size(); ++i) {
    if (span_key(statements[i].span) != spec.key) {
      continue;
    }
    if (spec.kind == MutationKind::RemoveInstruction) {
      statements.erase(statements.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
    auto& apply = std::get<GateApply>(statements[i].node);
    std::swap(apply.operands.front(), apply.operands.back());
    return true;
  }
  return false;
}

} // namespace detail

/// Applies one mutation to a copy of the program. FlipControlTarget swaps the
/// first control operand with the target.
inline Program apply_mutation(const Program& program,
                              const MutationSpec& spec) {
  Program mutant = program;
  if (detail::mutate_statement_list(mutant.statements, spec)) {
    return mutant;
  }
  for (auto& def : mutant.gate_defs) {
    if (detail::mutate_statement_list(def.body, spec)) {
      return mutant;
    }
  }
  throw std::invalid_argument("mutation site not found at line " +
                              std::to_string(spec.source_line));
}

struct TrialRecord {
  MutationSpec spec;
  bool detected = false;
  std::vector<int> diagnostic_lines;
};

struct BucketStats {
  int trials = 0;
  int detected = 0;

  [[nodiscard]] double rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(detected) / trials;
  }
};

struct ExperimentReport {
  int trials = 0;
  int detected = 0;
  BucketStats flip;
  BucketStats remove;
  BucketStats early; // mutation line <= threshold
  BucketStats late;
  int line_threshold = 0;
  bool baseline_passed = false;
  std::vector<TrialRecord> records;

  [[nodiscard]] double detection_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(detected) / trials;
  }
};

namespace detail {

/// Detection rule: some diagnostic's primary or related line names the
/// mutated line exactly, or (removals only) a MissingGateHypothesis points
/// within one line of the removed instruction. ConeReport entries are
/// descriptive, not locators, and never count.
inline bool trial_detected(const std::vector<Diagnostic>& diagnostics,
                           const MutationSpec& spec,
                           std::vector<int>& lines_out) {
  bool detected = false;
  std::set<int> lines;
  for (const auto& diag : diagnostics) {
    if (diag.kind == DiagnosticKind::ConeReport) {
      continue;
    }
    lines.insert(diag.primary_span.line);
    if (diag.primary_span.line == spec.source_line) {
      detected = true;
    }
    for (const auto& related : diag.related_spans) {
      lines.insert(related.span.line);
      if (related.span.line == spec.source_line) {
        detected = true;
      }
    }
    if (spec.kind == MutationKind::RemoveInstruction &&
        diag.kind == DiagnosticKind::MissingGateHypothesis &&
        std::abs(diag.primary_span.line - spec.source_line) <= 1) {
      detected = true;
    }
  }
  lines_out.assign(lines.begin(), lines.end());
  return detected;
}

} // namespace detail

/// Runs N seeded-uniform mutation trials. The unmutated program must pass all
/// its assertions unless `waive_baseline` is set.
inline ExperimentReport run_experiment(const Program& program, int trials,
                                       std::uint64_t seed, int line_threshold,
                                       bool waive_baseline = false,
                                       const SimLimits& limits = {}) {
  const FlatProgram flat = flatten(program);
  ExperimentReport report;
  report.trials = trials;
  report.line_threshold = line_threshold;

  const ExecutionTrace baseline = run(flat, seed, limits);
  report.baseline_passed = baseline.failed_count() == 0;
  if (!report.baseline_passed && !waive_baseline) {
    throw BaselineError("unmutated program fails " +
                        std::to_string(baseline.failed_count()) +
                        " of its assertions; fix the program or waive the "
                        "baseline check");
  }

  const std::vector<MutationSpec> sites = enumerate_sites(flat);
  if (sites.empty()) {
    throw std::invalid_argument("program has no mutation sites");
  }

  RngState rng{seed, 0};
  for (int t = 0; t < trials; ++t) {
    const MutationSpec& spec = sites[rng.uniform_index(sites.size())];
    TrialRecord record;
    record.spec = spec;
    try {
      const Program mutant = apply_mutation(program, spec);
      const FlatProgram mutant_flat = flatten(mutant);
      const ExecutionTrace trace = run(mutant_flat, seed, limits);
      const std::vector<Diagnostic> diagnostics = diagnose(mutant_flat, trace);
      record.detected =
          detail::trial_detected(diagnostics, spec, record.diagnostic_lines);
    } catch (const NumericalError&) {
      record.detected = false;
    }
    BucketStats& kind_bucket =
        spec.kind == MutationKind::FlipControlTarget ? report.flip
                                                     : report.remove;
    BucketStats& pos_bucket =
        spec.source_line <= line_threshold ? report.early : report.late;
    ++kind_bucket.trials;
    ++pos_bucket.trials;
    if (record.detected) {
      ++report.detected;
      ++kind_bucket.detected;
      ++pos_bucket.detected;
    }
    report.records.push_back(std::move(record));
  }
  return report;
}

/// CSV export: one row per trial.
inline std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "site_line,kind,detected,diagnostic_lines\n";
  for (const auto& record : report.records) {
    out << record.spec.source_line << "," << to_string(record.spec.kind) << ","
        << (record.detected ? 1 : 0) << ",";
    for (std::size_t i = 0; i < record.diagnostic_lines.size(); ++i) {
      if (i > 0) {
        out << " ";
      }
      out << record.diagnostic_lines[i];
    }
    out << "\n";
  }
  return out.str();
}

} // namespace qdbg
