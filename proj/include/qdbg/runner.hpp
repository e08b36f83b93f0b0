/**
 * @file runner.hpp
 * @brief Program execution with in-place assertion evaluation and
 *        control-value mark tracking.
 */

#pragma once

#include "qdbg/density.hpp"
#include "qdbg/flatten.hpp"
#include "qdbg/statevector.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qdbg {

/// Probability below which a control qubit counts as "always zero".
inline constexpr double kControlZeroEpsilon = 1e-8;
/// Probability above which a marginal basis state counts as populated.
inline constexpr double kSuperpositionEpsilon = 1e-9;
/// Max-entry tolerance of the separability test.
inline constexpr double kSeparabilityTolerance = 1e-6;

struct SuperpositionEvidence {
  int basis_states = 0;    // populated entries of the marginal distribution
  std::string dominant;    // highest-probability basis pattern, failures only
};

struct ProductCut {
  int qubit = 0;           // the split-off qubit of the cut found product
  double deviation = 0.0;
};

struct EntanglementEvidence {
  std::vector<ProductCut> product_cuts; // empty iff passed
};

struct EqualityEvidence {
  double fidelity = 0.0;   // <phi|rho|phi>
  double similarity = 0.0; // sqrt(fidelity); compared against the threshold
};

using AssertionEvidence =
    std::variant<SuperpositionEvidence, EntanglementEvidence, EqualityEvidence>;

struct AssertionOutcome {
  Assertion assertion;
  std::vector<SourceSpan> call_stack;
  std::size_t origin_index = 0;
  int occurrence = 1;
  bool passed = false;
  std::uint64_t eval_step = 0; // instructions executed before evaluation
  AssertionEvidence metrics;

  [[nodiscard]] int line() const { return assertion.span.line; }
};

/// Mark state of one controlled source instruction. Flattened copies of the
/// same source statement share one record, so a later call of the enclosing
/// gate counts as a later execution of the same instruction. A mark, once
/// cleared by an execution with a live control, is never set again.
struct MarkRecord {
  SourceSpan span;                 // innermost span of the instruction
  std::size_t origin_index = 0;    // first flattened instance
  int executions = 0;
  bool marked = false;
  bool cleared = false;
  std::vector<int> zero_controls;  // at the last marking
  int first_marked_occurrence = 0;
  std::uint64_t marked_step = 0;
  std::uint64_t cleared_step = 0;

  /// Whether the instruction was marked when `step` instructions had run.
  [[nodiscard]] bool marked_at(std::uint64_t step) const {
    if (first_marked_occurrence == 0 || marked_step > step) {
      return false;
    }
    return !cleared || cleared_step > step;
  }
};

class ControlMarkTable {
public:
  MarkRecord& record_for(const FlatInstruction& instr) {
    const SpanKey key = span_key(instr.innermost());
    auto [it, inserted] = records_.try_emplace(key);
    if (inserted) {
      it->second.span = instr.innermost();
      it->second.origin_index = instr.origin_index;
    }
    return it->second;
  }

  [[nodiscard]] const std::map<SpanKey, MarkRecord>& records() const {
    return records_;
  }

  [[nodiscard]] const MarkRecord* find(const SourceSpan& span) const {
    const auto it = records_.find(span_key(span));
    return it == records_.end() ? nullptr : &it->second;
  }

private:
  std::map<SpanKey, MarkRecord> records_;
};

struct ExecutionTrace {
  std::vector<AssertionOutcome> outcomes;
  ControlMarkTable marks;
  std::vector<int> classical_bits;
  Statevector final_state;

  [[nodiscard]] std::size_t failed_count() const {
    std::size_t n = 0;
    for (const auto& outcome : outcomes) {
      n += outcome.passed ? 0 : 1;
    }
    return n;
  }
};

// --- assertion checks -------------------------------------------------------

/// Passes iff the marginal distribution over the asserted qubits populates
/// at least two basis states.
inline AssertionOutcome check_superposition(const Statevector& state,
                                            std::span<const int> qubits) {
  const std::vector<double> probs = marginal_probabilities(state, qubits);
  SuperpositionEvidence evidence;
  std::size_t dominant = 0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b] > kSuperpositionEpsilon) {
      ++evidence.basis_states;
    }
    if (probs[b] > probs[dominant]) {
      dominant = b;
    }
  }
  AssertionOutcome outcome;
  outcome.passed = evidence.basis_states >= 2;
  if (!outcome.passed) {
    // Pattern reads like a ket: leftmost character is the last asserted qubit.
    std::string bits(qubits.size(), '0');
    for (std::size_t j = 0; j < qubits.size(); ++j) {
      bits[qubits.size() - 1 - j] = ((dominant >> j) & 1U) != 0 ? '1' : '0';
    }
    evidence.dominant = std::move(bits);
  }
  outcome.metrics = evidence;
  return outcome;
}

/// Passes iff no single-qubit-vs-rest cut of the asserted set factorizes.
inline AssertionOutcome check_entanglement(const Statevector& state,
                                           std::span<const int> qubits) {
  if (qubits.size() < 2) {
    throw std::invalid_argument(
        "entanglement assertion needs at least 2 qubits");
  }
  const ReducedDensityMatrix rdm = reduced_density_matrix(state, qubits);
  EntanglementEvidence evidence;
  for (int p = 0; p < static_cast<int>(qubits.size()); ++p) {
    const int cut[] = {p};
    const ProductTest test =
        is_product_across(rdm, cut, kSeparabilityTolerance);
    if (test.product) {
      evidence.product_cuts.push_back({qubits[p], test.deviation});
    }
  }
  AssertionOutcome outcome;
  outcome.passed = evidence.product_cuts.empty();
  outcome.metrics = evidence;
  return outcome;
}

/// Passes iff sqrt(<phi|rho|phi>) reaches the similarity threshold.
inline AssertionOutcome check_equality(const Statevector& state,
                                       std::span<const int> qubits,
                                       const std::vector<std::complex<double>>& reference,
                                       double threshold) {
  const ReducedDensityMatrix rdm = reduced_density_matrix(state, qubits);
  Eigen::VectorXcd phi(static_cast<Eigen::Index>(reference.size()));
  for (std::size_t i = 0; i < reference.size(); ++i) {
    phi(static_cast<Eigen::Index>(i)) = reference[i];
  }
  EqualityEvidence evidence;
  evidence.fidelity = fidelity_with_pure(rdm, phi);
  evidence.similarity = std::sqrt(evidence.fidelity);
  AssertionOutcome outcome;
  outcome.passed = evidence.similarity >= threshold;
  outcome.metrics = evidence;
  return outcome;
}

inline AssertionOutcome evaluate_assertion(const Statevector& state,
                                           const Assertion& assertion) {
  switch (assertion.kind) {
  case AssertionKind::Superposition:
    return check_superposition(state, assertion.qubits);
  case AssertionKind::Entanglement:
    return check_entanglement(state, assertion.qubits);
  case AssertionKind::Equality:
    return check_equality(state, assertion.qubits, assertion.reference,
                          assertion.threshold);
  }
  throw std::logic_error("unknown assertion kind");
}

// --- control-value tracking -------------------------------------------------

/// Updates the mark table for a controlled instruction, evaluated immediately
/// before applying it. A control with P(1) <= epsilon marks the instruction
/// (unless a previous execution cleared it); an execution with all controls
/// live clears the mark permanently.
inline void update_control_marks(ControlMarkTable& table,
                                 const FlatInstruction& instr,
                                 const Statevector& state,
                                 std::uint64_t step) {
  MarkRecord& record = table.record_for(instr);
  ++record.executions;
  std::vector<int> zero;
  for (const int control : instr.controls) {
    if (state.probability_one(control) <= kControlZeroEpsilon) {
      zero.push_back(control);
    }
  }
  if (zero.empty()) {
    if (!record.cleared) {
      record.cleared = true;
      record.cleared_step = step;
      record.marked = false;
    }
    return;
  }
  if (record.cleared) {
    return; // cleared is absorbing
  }
  if (!record.marked) {
    record.marked = true;
    record.first_marked_occurrence = record.executions;
    record.marked_step = step;
  }
  record.zero_controls = std::move(zero);
}

// --- execution ---------------------------------------------------------------

/// Runs the flattened program start to finish. Assertions are evaluated in
/// place without modifying the state; execution continues past failures.
inline ExecutionTrace run(const FlatProgram& flat, std::uint64_t seed,
                          const SimLimits& limits = {}) {
  ExecutionTrace trace;
  trace.final_state = init_state(flat.num_qubits, limits);
  trace.classical_bits.assign(static_cast<std::size_t>(flat.num_clbits), 0);
  RngState rng{seed, 0};
  std::uint64_t step = 0;
  for (const auto& item : flat.items) {
    if (const auto* instr = std::get_if<FlatInstruction>(&item)) {
      ++step;
      if (!instr->controls.empty()) {
        update_control_marks(trace.marks, *instr, trace.final_state, step);
      }
      apply_instruction(trace.final_state, *instr, rng, trace.classical_bits);
      continue;
    }
    const auto& flat_assertion = std::get<FlatAssertion>(item);
    AssertionOutcome outcome =
        evaluate_assertion(trace.final_state, flat_assertion.assertion);
    outcome.assertion = flat_assertion.assertion;
    outcome.call_stack = flat_assertion.call_stack;
    outcome.origin_index = flat_assertion.origin_index;
    outcome.occurrence = flat_assertion.occurrence;
    outcome.eval_step = step;
    trace.outcomes.push_back(std::move(outcome));
  }
  if (!std::isfinite(trace.final_state.norm())) {
    throw NumericalError("non-finite amplitude after execution");
  }
  return trace;
}

} // namespace qdbg
