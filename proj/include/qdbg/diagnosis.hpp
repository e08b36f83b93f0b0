/**
 * @file diagnosis.hpp
 * @brief Error-cause analyses run after failed assertions: cone of influence
 *        (backward slice), interaction graphs, and control-value reporting.
 */

#pragma once

#include "qdbg/flatten.hpp"
#include "qdbg/runner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qdbg {

/// Backward slice of one failed assertion occurrence.
/// instruction_indices holds the origin indices of included FlatInstructions;
/// source_lines additionally covers call-site lines, enclosing gate-signature
/// lines, declaration lines of registers holding relevant qubits, and the
/// assertion's own lines.
struct ConeOfInfluence {
  std::size_t assertion_origin = 0;
  int assertion_occurrence = 1;
  std::set<std::size_t> instruction_indices;
  std::set<int> source_lines;
  std::set<int> relevant_qubits; // every qubit relevant at some scan point
};

struct InteractionGraph {
  std::set<int> nodes;
  // key (a, b) with a < b; value: earliest contributing instruction.
  std::map<std::pair<int, int>, std::size_t> edges;

  [[nodiscard]] std::map<int, int> components() const {
    std::map<int, int> parent;
    for (const int n : nodes) {
      parent[n] = n;
    }
    const auto find = [&parent](int x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (const auto& [edge, _] : edges) {
      const int ra = find(edge.first);
      const int rb = find(edge.second);
      if (ra != rb) {
        parent[rb] = ra;
      }
    }
    std::map<int, int> roots;
    for (const int n : nodes) {
      roots[n] = find(n);
    }
    return roots;
  }
};

enum class DiagnosticKind {
  MissingInteraction,
  MissingControlHypothesis,
  ControlAlwaysZero,
  MissingGateHypothesis,
  ConeReport,
};

inline const char* to_string(DiagnosticKind kind) {
  switch (kind) {
  case DiagnosticKind::MissingInteraction:
    return "MissingInteraction";
  case DiagnosticKind::MissingControlHypothesis:
    return "MissingControlHypothesis";
  case DiagnosticKind::ControlAlwaysZero:
    return "ControlAlwaysZero";
  case DiagnosticKind::MissingGateHypothesis:
    return "MissingGateHypothesis";
  case DiagnosticKind::ConeReport:
    return "ConeReport";
  }
  return "?";
}

struct RelatedSpan {
  SourceSpan span;
  std::string note;
};

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::ConeReport;
  SourceSpan primary_span;
  std::vector<RelatedSpan> related_spans;
  std::string message;
  std::size_t assertion_origin = 0; // the failed occurrence this came from
  int assertion_line = 0;
  std::vector<int> qubits; // kind-specific (disconnected / zero controls)
};

namespace detail {

inline void add_item_lines(std::set<int>& lines,
                           const std::vector<SourceSpan>& call_stack,
                           const std::vector<SourceSpan>& def_spans) {
  for (const auto& span : call_stack) {
    lines.insert(span.line);
  }
  for (const auto& span : def_spans) {
    lines.insert(span.line);
  }
}

} // namespace detail

/// Backward data-flow pass from an assertion occurrence. Relevance starts at
/// the asserted qubits; an instruction is included iff it acts on a relevant
/// qubit, and inclusion makes all its qubits relevant. A reset is included
/// and then removes its qubit from the relevant set. Earlier assertion
/// records contribute their source lines but never extend relevance (they
/// only read the state). Barriers never join the cone.
inline ConeOfInfluence cone_of_influence(const FlatProgram& flat,
                                         std::size_t assertion_origin) {
  const auto& failed = std::get<FlatAssertion>(flat.items.at(assertion_origin));
  ConeOfInfluence cone;
  cone.assertion_origin = assertion_origin;
  cone.assertion_occurrence = failed.occurrence;
  std::set<int> relevant(failed.assertion.qubits.begin(),
                         failed.assertion.qubits.end());
  std::set<int> touched = relevant;
  detail::add_item_lines(cone.source_lines, failed.call_stack,
                         failed.def_spans);

  for (std::size_t i = assertion_origin; i-- > 0;) {
    const FlatItem& item = flat.items[i];
    if (const auto* prior = std::get_if<FlatAssertion>(&item)) {
      const bool touches = std::any_of(
          prior->assertion.qubits.begin(), prior->assertion.qubits.end(),
          [&relevant](int q) { return relevant.count(q) != 0; });
      if (touches) {
        detail::add_item_lines(cone.source_lines, prior->call_stack,
                               prior->def_spans);
      }
      continue;
    }
    const auto& instr = std::get<FlatInstruction>(item);
    if (instr.op == Op::Barrier) {
      continue;
    }
    const std::vector<int> qubits = instr.qubits();
    const bool touches =
        std::any_of(qubits.begin(), qubits.end(),
                    [&relevant](int q) { return relevant.count(q) != 0; });
    if (!touches) {
      continue;
    }
    cone.instruction_indices.insert(i);
    detail::add_item_lines(cone.source_lines, instr.call_stack,
                           instr.def_spans);
    if (instr.op == Op::Reset) {
      relevant.erase(instr.targets[0]);
    } else {
      relevant.insert(qubits.begin(), qubits.end());
      touched.insert(qubits.begin(), qubits.end());
    }
  }

  for (const auto& [_, info] : flat.qregs) {
    for (const int q : touched) {
      if (q >= info.offset && q < info.offset + info.width) {
        cone.source_lines.insert(info.span.line);
        break;
      }
    }
  }
  cone.relevant_qubits = std::move(touched);
  return cone;
}

/// Interaction graph over a set of flattened instructions: every multi-qubit
/// unitary gate connects all pairs of its qubits (controls included).
/// Barriers are transparent.
inline InteractionGraph
interaction_graph(const FlatProgram& flat,
                  const std::set<std::size_t>& instruction_indices) {
  InteractionGraph graph;
  for (const std::size_t index : instruction_indices) {
    const auto& instr = std::get<FlatInstruction>(flat.items.at(index));
    if (instr.op == Op::Barrier) {
      continue;
    }
    const std::vector<int> qubits = instr.qubits();
    graph.nodes.insert(qubits.begin(), qubits.end());
    if (!is_unitary_gate(instr.op) || qubits.size() < 2) {
      continue;
    }
    for (std::size_t a = 0; a < qubits.size(); ++a) {
      for (std::size_t b = a + 1; b < qubits.size(); ++b) {
        const auto key = std::minmax(qubits[a], qubits[b]);
        graph.edges.try_emplace({key.first, key.second}, index);
      }
    }
  }
  return graph;
}

/// Interaction graph over the first `count` flattened instructions
/// (assertion records do not count).
inline InteractionGraph interaction_graph_prefix(const FlatProgram& flat,
                                                 std::size_t count) {
  std::set<std::size_t> indices;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < flat.items.size() && seen < count; ++i) {
    if (std::holds_alternative<FlatInstruction>(flat.items[i])) {
      indices.insert(i);
      ++seen;
    }
  }
  return interaction_graph(flat, indices);
}

/// DOT rendering: one undirected edge per line, nodes labeled q<i>.
inline std::string to_dot(const InteractionGraph& graph) {
  std::ostringstream out;
  out << "graph interactions {\n";
  for (const int node : graph.nodes) {
    out << "  q" << node << ";\n";
  }
  for (const auto& [edge, _] : graph.edges) {
    out << "  q" << edge.first << " -- q" << edge.second << ";\n";
  }
  out << "}\n";
  return out.str();
}

namespace detail {

inline std::string join_qubit_names(const FlatProgram& flat,
                                    const std::vector<int>& qubits) {
  std::string result;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (i > 0) {
      result += ", ";
    }
    result += flat.qubit_name(qubits[i]);
  }
  return result;
}

} // namespace detail

/// For a failed entanglement assertion: reports asserted qubits that are
/// disconnected from the rest on the interaction graph, and points at the
/// latest gate in the cone that touches only part of the asserted set.
inline std::vector<Diagnostic>
analyze_interactions(const InteractionGraph& graph,
                     const AssertionOutcome& outcome,
                     const ConeOfInfluence& cone, const FlatProgram& flat) {
  std::vector<Diagnostic> diagnostics;
  const std::vector<int>& asserted = outcome.assertion.qubits;
  const std::map<int, int> roots = graph.components();
  const auto root_of = [&roots](int q) {
    const auto it = roots.find(q);
    return it == roots.end() ? ~q : it->second; // untouched qubit: own root
  };

  // Group asserted qubits by connected component; the largest group (ties:
  // the one containing the smallest qubit) is taken as the main group.
  std::map<int, std::vector<int>> groups;
  for (const int q : asserted) {
    groups[root_of(q)].push_back(q);
  }
  if (groups.size() < 2) {
    return diagnostics; // all asserted qubits interact: inconclusive
  }
  const auto main_group = std::max_element(
      groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        return a.second.size() < b.second.size() ||
               (a.second.size() == b.second.size() &&
                a.second.front() > b.second.front());
      });
  std::vector<int> disconnected;
  for (const auto& [root, members] : groups) {
    if (root != main_group->first) {
      disconnected.insert(disconnected.end(), members.begin(), members.end());
    }
  }
  std::sort(disconnected.begin(), disconnected.end());

  Diagnostic missing;
  missing.kind = DiagnosticKind::MissingInteraction;
  missing.primary_span = outcome.assertion.span;
  missing.assertion_origin = outcome.origin_index;
  missing.assertion_line = outcome.line();
  missing.qubits = disconnected;
  missing.message =
      "Qubits are not entangled: " +
      detail::join_qubit_names(flat, disconnected) + " never interact" +
      (disconnected.size() == 1 ? "s" : "") + " with " +
      detail::join_qubit_names(flat, main_group->second) + ".";
  diagnostics.push_back(std::move(missing));

  // A gate acting on some but not all asserted qubits may be missing a
  // control; the latest such gate in execution order is reported.
  const std::set<int> asserted_set(asserted.begin(), asserted.end());
  for (auto it = cone.instruction_indices.rbegin();
       it != cone.instruction_indices.rend(); ++it) {
    const auto& instr = std::get<FlatInstruction>(flat.items.at(*it));
    const std::vector<int> qubits = instr.qubits();
    if (!is_unitary_gate(instr.op) || qubits.size() < 2) {
      continue;
    }
    std::size_t overlap = 0;
    for (const int q : qubits) {
      overlap += asserted_set.count(q);
    }
    if (overlap == 0 || overlap >= asserted_set.size()) {
      continue;
    }
    Diagnostic hypothesis;
    hypothesis.kind = DiagnosticKind::MissingControlHypothesis;
    hypothesis.primary_span = instr.innermost();
    hypothesis.assertion_origin = outcome.origin_index;
    hypothesis.assertion_line = outcome.line();
    hypothesis.message = "Is there a control qubit missing on Line " +
                         std::to_string(instr.innermost().line) + "?";
    hypothesis.related_spans.push_back(
        {outcome.assertion.span, "failed entanglement assertion"});
    diagnostics.push_back(std::move(hypothesis));
    break;
  }
  return diagnostics;
}

/// For a failed superposition assertion whose marginal is a basis state:
/// when no basis-changing gate in the cone targets an asserted qubit, a
/// preparation gate is probably missing before the assertion's outermost
/// call site.
inline std::vector<Diagnostic>
analyze_superposition_failure(const AssertionOutcome& outcome,
                              const ConeOfInfluence& cone,
                              const FlatProgram& flat) {
  std::vector<Diagnostic> diagnostics;
  const std::set<int> asserted(outcome.assertion.qubits.begin(),
                               outcome.assertion.qubits.end());
  for (const std::size_t index : cone.instruction_indices) {
    const auto& instr = std::get<FlatInstruction>(flat.items.at(index));
    if (!is_unitary_gate(instr.op) || is_diagonal(instr.op)) {
      continue;
    }
    for (const int target : instr.targets) {
      if (asserted.count(target) != 0) {
        return diagnostics; // a basis-changing gate already acts here
      }
    }
  }
  const SourceSpan boundary = outcome.call_stack.back();
  Diagnostic hypothesis;
  hypothesis.kind = DiagnosticKind::MissingGateHypothesis;
  hypothesis.primary_span = boundary;
  hypothesis.assertion_origin = outcome.origin_index;
  hypothesis.assertion_line = outcome.line();
  hypothesis.message = "Qubits are not in a superposition. Are you missing a "
                       "gate before Line " +
                       std::to_string(boundary.line) + "?";
  hypothesis.related_spans.push_back(
      {outcome.assertion.span, "failed superposition assertion"});
  diagnostics.push_back(std::move(hypothesis));
  return diagnostics;
}

/// Reports instructions inside the cone that were marked as always-zero
/// controlled at the time the failing assertion executed.
inline std::vector<Diagnostic>
analyze_control_values(const ControlMarkTable& marks,
                       const ConeOfInfluence& cone,
                       const AssertionOutcome& outcome,
                       const FlatProgram& flat) {
  std::vector<Diagnostic> diagnostics;
  std::set<SpanKey> cone_keys;
  for (const std::size_t index : cone.instruction_indices) {
    const auto& instr = std::get<FlatInstruction>(flat.items.at(index));
    cone_keys.insert(span_key(instr.innermost()));
  }
  for (const auto& [key, record] : marks.records()) {
    if (!record.marked_at(outcome.eval_step) || cone_keys.count(key) == 0) {
      continue;
    }
    Diagnostic zero;
    zero.kind = DiagnosticKind::ControlAlwaysZero;
    zero.primary_span = record.span;
    zero.assertion_origin = outcome.origin_index;
    zero.assertion_line = outcome.line();
    zero.qubits = record.zero_controls;
    zero.message = "Controls " +
                   detail::join_qubit_names(flat, record.zero_controls) +
                   " of the gate on Line " + std::to_string(record.span.line) +
                   " were always zero.";
    zero.related_spans.push_back({outcome.assertion.span, "failed assertion"});
    diagnostics.push_back(std::move(zero));

    Diagnostic missing;
    missing.kind = DiagnosticKind::MissingGateHypothesis;
    missing.primary_span = record.span;
    missing.assertion_origin = outcome.origin_index;
    missing.assertion_line = outcome.line();
    missing.message = "Are you missing a gate before Line " +
                      std::to_string(record.span.line) + "?";
    diagnostics.push_back(std::move(missing));
  }
  return diagnostics;
}

/// Full pipeline over every failed outcome: one ConeReport each, then the
/// kind-appropriate analyses. Duplicates merge by (kind, primary span),
/// keeping the earliest failed occurrence; output is ordered by line, kind,
/// column.
inline std::vector<Diagnostic> diagnose(const FlatProgram& flat,
                                        const ExecutionTrace& trace) {
  std::vector<Diagnostic> collected;
  for (const auto& outcome : trace.outcomes) {
    if (outcome.passed) {
      continue;
    }
    const ConeOfInfluence cone = cone_of_influence(flat, outcome.origin_index);
    Diagnostic report;
    report.kind = DiagnosticKind::ConeReport;
    report.primary_span = outcome.assertion.span;
    report.assertion_origin = outcome.origin_index;
    report.assertion_line = outcome.line();
    report.message =
        "Cone of influence of the assertion on Line " +
        std::to_string(outcome.line()) + " covers " +
        std::to_string(cone.instruction_indices.size()) + " instructions on " +
        std::to_string(cone.source_lines.size()) + " source lines.";
    collected.push_back(std::move(report));

    if (outcome.assertion.kind == AssertionKind::Entanglement) {
      const InteractionGraph graph =
          interaction_graph(flat, cone.instruction_indices);
      for (auto& diag : analyze_interactions(graph, outcome, cone, flat)) {
        collected.push_back(std::move(diag));
      }
    }
    if (outcome.assertion.kind == AssertionKind::Superposition) {
      for (auto& diag : analyze_superposition_failure(outcome, cone, flat)) {
        collected.push_back(std::move(diag));
      }
    }
    for (auto& diag :
         analyze_control_values(trace.marks, cone, outcome, flat)) {
      collected.push_back(std::move(diag));
    }
  }

  std::vector<Diagnostic> merged;
  std::set<std::pair<int, SpanKey>> seen;
  for (auto& diag : collected) {
    const std::pair<int, SpanKey> key{static_cast<int>(diag.kind),
                                      span_key(diag.primary_span)};
    if (seen.insert(key).second) {
      merged.push_back(std::move(diag));
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     if (a.primary_span.line != b.primary_span.line) {
                       return a.primary_span.line < b.primary_span.line;
                     }
                     if (a.kind != b.kind) {
                       return static_cast<int>(a.kind) <
                              static_cast<int>(b.kind);
                     }
                     return a.primary_span.column_start <
                            b.primary_span.column_start;
                   });
  return merged;
}

} // namespace qdbg
