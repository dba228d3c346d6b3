// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssf/scenario.hpp"
#include "ssf/slasher.hpp"
#include "ssf/trace.hpp"

namespace ssf {

enum class Outcome { pass, fail, not_applicable };

std::string_view to_string(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::pass;
  std::string detail;

  static Verdict pass(std::string d = {}) { return {Outcome::pass, std::move(d)}; }
  static Verdict fail(std::string d) { return {Outcome::fail, std::move(d)}; }
  static Verdict not_applicable(std::string d) { return {Outcome::not_applicable, std::move(d)}; }

  bool failed() const { return outcome == Outcome::fail; }
  bool operator==(const Verdict&) const = default;
};

/// Read-only index over a trace shared by the checkers: the block tree of
/// every sent message, per-round validator states and honest proposals.
class TraceIndex {
 public:
  explicit TraceIndex(const Trace& trace);

  struct HonestProposal {
    BlockId block;
    Slot slot = 0;
    ValidatorIndex proposer = 0;
    Round round = 0;
  };

  const Trace& trace() const { return *trace_; }
  const TraceHeader& header() const { return trace_->header; }
  Round total_rounds() const { return header().total_rounds(); }

  /// Every atomic message ever sent, as one view.
  const View& global() const { return global_; }
  const std::vector<MessagePtr>& pool() const { return pool_; }
  bool is_ancestor(const BlockId& a, const BlockId& b) const;

  /// State of validator v at round r, when v was honest then.
  const StateSnapshot* state(Round r, ValidatorIndex v) const;
  bool active(Round r, ValidatorIndex v) const;
  std::size_t active_count(Round r) const;

  const std::vector<HonestProposal>& honest_proposals() const { return proposals_; }
  const HonestProposal* honest_proposal(Slot t) const;
  /// Fast-confirmation outcomes: confirms[slot][validator].
  const std::map<Slot, std::map<ValidatorIndex, ConfirmOutcome>>& confirms() const { return confirms_; }
  /// Validators corrupted at any point of the run.
  const std::set<ValidatorIndex>& adversarial() const { return adversarial_; }

  /// Messages in the order an observer receives them: each message at
  /// max(sent, GST) + delta.
  std::vector<std::pair<Round, MessagePtr>> observer_arrivals() const;

 private:
  const Trace* trace_;
  View global_;
  std::vector<MessagePtr> pool_;
  std::vector<std::vector<std::optional<StateSnapshot>>> states_;
  std::vector<HonestProposal> proposals_;
  std::map<Slot, std::size_t> proposal_at_;
  std::map<Slot, std::map<ValidatorIndex, ConfirmOutcome>> confirms_;
  std::set<ValidatorIndex> adversarial_;
  std::vector<std::pair<Round, MessagePtr>> sends_;
  mutable std::unordered_map<BlockId, std::unordered_map<BlockId, bool, DigestHash>, DigestHash> anc_;
};

enum class ChainKind { finalized, available, canonical };

std::string_view to_string(ChainKind c);

/// Pairwise prefix-comparability of the chosen chain across honest validators
/// at rounds >= after.
Verdict check_safety(const TraceIndex& ix, ChainKind chain, Round after = 0);

/// For each active validator at round r' with r' - conf >= after, the chosen
/// chain contains an honest block proposed after round r' - conf.
Verdict check_liveness(const TraceIndex& ix, ChainKind chain, Round after, Round conf);

/// Honest proposals stay canonical for every active validator from their
/// head-vote round on; fast-confirmed blocks stay canonical from the head-vote
/// round of the next slot. Not applicable unless GST = 0.
Verdict check_reorg_resilience(const TraceIndex& ix);

/// Every honest proposal of a slot starting at or after max(GST, GAT) + 4 delta
/// is justified in all active views at the slot's merge round and
/// ack-finalized for the observer exactly at the slot's end.
Verdict check_ssf(const TraceIndex& ix);

/// Honest proposals at t and t+1 after max(GST, GAT) + 4 delta: the slot-t
/// block is in every active validator's finalized chain by the merge round
/// of slot t+1.
Verdict check_one_slot_lag(const TraceIndex& ix);

/// Slots starting at or after GST + delta with an honest proposer and at least
/// a quorum of active validators: every active validator fast-confirms the
/// proposal.
Verdict check_fast_liveness(const TraceIndex& ix);

/// finalized <= available <= canonical for every honest state record.
Verdict check_prefix(const TraceIndex& ix);

/// Conflicting finalization for the observer must yield at least ceil(n/3)
/// verified culprits, all adversarial. Vacuous without a conflict.
Verdict check_accountability(const TraceIndex& ix, CulpritReport* report = nullptr);

/// Runs the scenario under both fork-choice modes and compares traces.
/// Not applicable unless GST = 0 and the scenario is compliant with tau = eta.
Verdict check_equivalence(const Scenario& sc);

/// Re-runs the scenario and compares trace bytes.
Verdict check_determinism(const Scenario& sc);

/// Names accepted by run_check.
const std::vector<std::string>& trace_property_names();

/// Dispatches a trace property by name ("safety-fin", "safety-ava",
/// "liveness-ava", "liveness-fin", "reorg", "ssf", "one-slot-lag",
/// "fast-liveness", "prefix", "accountability"). Throws std::invalid_argument
/// on unknown names.
Verdict run_check(const std::string& name, const TraceIndex& ix);

}  // namespace ssf
