// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssf/ffg.hpp"
#include "ssf/forkchoice.hpp"

namespace ssf {

struct ProposerSchedule {
  enum class Kind { round_robin, seeded, list };

  Kind kind = Kind::round_robin;
  std::uint32_t n = 1;
  std::uint64_t seed = 0;
  std::vector<ValidatorIndex> list;

  ValidatorIndex operator()(Slot t) const;
};

struct ValidatorParams {
  Round delta = 1;
  std::optional<Slot> eta;
  std::uint64_t kappa = 2;
  std::uint32_t n = 1;
  ForkChoiceMode fc_mode = ForkChoiceMode::hfc;
  ProposerSchedule proposers;
  /// Mixed into block bodies so that otherwise identical proposals differ.
  std::string body_tag;

  Round slot_length() const { return 4 * delta; }
  Slot slot_of(Round r) const { return r / slot_length(); }
};

enum class ValidatorStatus { asleep, joining, active };

std::string_view to_string(ValidatorStatus s);

enum class Phase { none, propose, head_vote, confirm, merge };

struct ConfirmOutcome {
  Slot slot = 0;
  /// Highest canonical block with a quorum of slot votes, if any.
  std::optional<BlockId> fast;
  BlockId kappa_prefix;
  BlockId available;
};

struct RoundOutput {
  Phase phase = Phase::none;
  std::vector<MessagePtr> emitted;
  std::optional<ConfirmOutcome> confirm;
};

struct ReceiveResult {
  /// Newly seen messages the recipient forwards to its peers.
  std::vector<MessagePtr> regossip;
  /// Set when the message was dropped.
  std::optional<std::string> note;
};

/// One honest validator: four phases per slot, a view and a buffer, the
/// two-tier confirmation rule, FFG voting and acknowledgments.
class ValidatorState {
 public:
  ValidatorState(ValidatorIndex index, ValidatorParams params,
                 ValidatorStatus status = ValidatorStatus::active);

  ReceiveResult on_receive(const MessagePtr& m, Round r);
  RoundOutput on_round(Round r);

  void sleep() { status_ = ValidatorStatus::asleep; }
  /// Starts the joining protocol; the validator becomes active at the next
  /// merge round.
  void wake() { status_ = ValidatorStatus::joining; }

  ValidatorIndex index() const { return index_; }
  const ValidatorParams& params() const { return params_; }
  ValidatorParams& mutable_params() { return params_; }
  ValidatorStatus status() const { return status_; }
  const View& view() const { return view_; }
  const View& buffer() const { return buffer_; }
  const BlockId& canonical() const { return canonical_; }
  const BlockId& available() const { return available_; }
  const BlockId& finalized() const { return finalized_; }
  const JustificationState& justification() const { return tracker_.state(); }
  const Checkpoint& latest_justified() const { return tracker_.state().latest; }

  /// Fork choice over the current view under the configured mode.
  BlockId fork_choice(Slot t) const;

  // Individual phases, exposed for tests and for adversary puppets.
  MessagePtr propose(Slot t);
  MessagePtr head_vote(Slot t);
  std::pair<std::optional<MessagePtr>, ConfirmOutcome> confirm_and_vote(Slot t);
  std::optional<MessagePtr> merge_and_ack(Slot t);
  /// Highest canonical block with at least a quorum of distinct slot-t head
  /// voters in the buffer for it or a descendant.
  std::optional<BlockId> fast_confirmed(Slot t) const;

  /// Adds an own message to the buffer, as if delivered to self.
  void deliver_own(const MessagePtr& m);

 private:
  void merge_buffer();
  void normalize(Slot t);

  ValidatorIndex index_;
  ValidatorParams params_;
  ValidatorStatus status_;
  View view_;
  View buffer_;
  std::set<MessageId> seen_proposals_;
  JustificationTracker tracker_;
  BlockId canonical_;
  BlockId available_;
  BlockId finalized_;
};

}  // namespace ssf
