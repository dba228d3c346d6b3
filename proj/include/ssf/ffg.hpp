// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ssf/view.hpp"

namespace ssf {

/// Smallest integer >= 2n/3.
constexpr std::uint32_t quorum(std::uint32_t n) { return (2 * n + 2) / 3; }

/// Smallest integer >= n/3.
constexpr std::uint32_t third(std::uint32_t n) { return (n + 2) / 3; }

enum class VoteValidity { valid, pending, invalid };

/// Pending means a referenced block is not connected yet, so the answer may
/// still change. Invalid votes are kept as evidence but never counted.
VoteValidity classify_ffg_vote(const View& v, const FfgVote& vote);

using LinkKey = std::pair<Checkpoint, Checkpoint>;

struct SupermajorityLink {
  Checkpoint source;
  Checkpoint target;
  /// One vote message per voter.
  std::map<ValidatorIndex, MessagePtr> votes;

  std::set<ValidatorIndex> voters() const;
};

struct JustificationState {
  std::set<Checkpoint> justified;
  /// Quorum links whose source is justified.
  std::map<LinkKey, SupermajorityLink> links;
  Checkpoint latest;
  /// More than one checkpoint is justified at the latest slot.
  bool latest_tied = false;
  std::set<Checkpoint> finalized;

  bool is_justified(const Checkpoint& c) const { return justified.contains(c); }
  /// The first link (in checkpoint order of its source) justifying c, or null
  /// for genesis and unjustified checkpoints. Following it repeatedly
  /// reaches genesis.
  const SupermajorityLink* justifying_link(const Checkpoint& c) const;
  /// Links from genesis to c, in slot order.
  std::vector<const SupermajorityLink*> justification_chain(const Checkpoint& c) const;

  bool operator==(const JustificationState& o) const;
};

using LinkTallies = std::map<LinkKey, std::map<ValidatorIndex, MessagePtr>>;

/// Fixed-point closure over tallied valid votes.
JustificationState close_justification(const LinkTallies& tallies, std::uint32_t n);

JustificationState compute_justification(const View& v, std::uint32_t n);

std::set<Checkpoint> compute_finalized(const JustificationState& js);

std::set<Checkpoint> compute_finalized_with_acks(const JustificationState& js,
                                                 std::span<const MessagePtr> acks,
                                                 std::uint32_t n);

/// Thrown when two finalized checkpoints reference conflicting blocks.
struct ConflictingFinalization : std::runtime_error {
  ConflictingFinalization(Checkpoint a, Checkpoint b);
  Checkpoint first;
  Checkpoint second;
};

/// Blocks of finalized checkpoints ordered by ancestry, always starting at
/// genesis. Throws ConflictingFinalization for the first conflicting pair in
/// checkpoint order.
std::vector<BlockId> finalized_chain(const View& v, const std::set<Checkpoint>& finalized);
std::vector<BlockId> finalized_chain(const View& v, std::uint32_t n, bool with_acks);

/// Incremental justification over a view that only grows. Produces the same
/// state as compute_justification on the current view.
class JustificationTracker {
 public:
  explicit JustificationTracker(std::uint32_t n);

  const JustificationState& update(const View& v);
  const JustificationState& state() const { return state_; }

 private:
  void tally(const MessagePtr& m);

  std::uint32_t n_;
  std::size_t cursor_ = 0;
  std::size_t connected_seen_ = 0;
  std::vector<MessagePtr> pending_;
  LinkTallies tallies_;
  JustificationState state_;
};

}  // namespace ssf
