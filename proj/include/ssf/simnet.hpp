// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ssf/scenario.hpp"
#include "ssf/trace.hpp"
#include "ssf/validator.hpp"

namespace ssf {

struct Delivery {
  ValidatorIndex recipient = 0;
  Round round = 0;
};

struct AdversarySend {
  MessagePtr message;
  /// Honest recipients and requested delivery rounds. Deliveries earlier than
  /// the round after sending are moved to that round.
  std::vector<Delivery> deliveries;
};

/// Hook interface for everything the adversary controls: corrupted
/// validators' behavior and message delays.
class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Validator v becomes adversarial; state is its honest state so far.
  virtual void corrupt(ValidatorIndex v, const ValidatorState& state, Round r) = 0;
  /// A message sent by an honest validator this round (rushing: seen before
  /// the adversary acts).
  virtual void observe(const MessagePtr& m, ValidatorIndex sender, Round r) = 0;
  /// Requested delivery round for an honest transmission. The world clamps
  /// it into [sent + 1, max(sent, GST) + delta].
  virtual Round honest_delivery(const MessagePtr& m, ValidatorIndex sender, ValidatorIndex recipient,
                                Round sent) = 0;
  virtual std::vector<AdversarySend> act(Round r) = 0;
};

std::unique_ptr<Adversary> make_adversary(const Scenario& sc);

/// Discrete-round simulator. Single-threaded and fully determined by the
/// scenario (including its seed).
class World {
 public:
  /// Throws ScenarioError when the scenario is invalid.
  explicit World(Scenario sc);
  World(Scenario sc, std::unique_ptr<Adversary> adversary);

  void step();
  void run();
  bool done() const { return round_ >= sc_.total_rounds(); }
  Round round() const { return round_; }

  const Scenario& scenario() const { return sc_; }
  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  /// Honest validator states (the last honest state for corrupted ones).
  const std::vector<ValidatorState>& validators() const { return validators_; }
  bool adversarial(ValidatorIndex v) const { return corrupted_.contains(v); }

 private:
  void schedule(const MessagePtr& m, ValidatorIndex recipient, Round at);
  void broadcast_honest(ValidatorIndex sender, const MessagePtr& m, Round r);
  void receive(ValidatorIndex v, const MessagePtr& m, Round r);
  void record_send(Round r, Actor actor, const MessagePtr& m);
  void check_unforged(const MessagePtr& m, Round r) const;

  Scenario sc_;
  std::unique_ptr<Adversary> adversary_;
  Round round_ = 0;
  std::vector<ValidatorState> validators_;
  std::set<ValidatorIndex> corrupted_;
  std::map<Round, std::vector<std::pair<ValidatorIndex, MessagePtr>>> in_flight_;
  std::unordered_map<MessageId, std::vector<Round>, DigestHash> earliest_;
  std::vector<std::vector<MessagePtr>> queued_;
  std::unordered_set<MessageId, DigestHash> honest_sent_;
  Trace trace_;
};

/// Runs a scenario to its horizon and returns the trace.
Trace run(const Scenario& sc);

/// Participation condition for slot t: the honest validators active in slot
/// t-1 outnumber the adversary at slot t together with honest validators
/// active in slots [t-tau, t-2] but not in t-1. Activity is sampled at the
/// head-vote round of each slot.
bool check_tau_sleepiness(const Scenario& sc, Slot t);

struct ComplianceReport {
  /// Slots at or after GST that fail the participation condition.
  std::vector<Slot> failing_slots;
  /// Validators that sent two different head votes for one slot.
  std::vector<ValidatorIndex> head_equivocators;
  bool head_equivocation_ok = true;

  bool compliant() const { return failing_slots.empty() && head_equivocation_ok; }
};

/// Checks every slot after GST and, on the given trace of the scenario, that
/// fewer than ceil(n/3) validators equivocated on head votes.
ComplianceReport check_compliance(const Scenario& sc, const Trace& trace);
/// Runs the scenario to obtain the trace.
ComplianceReport check_compliance(const Scenario& sc);

}  // namespace ssf
