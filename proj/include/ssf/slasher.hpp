// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ssf/ffg.hpp"

namespace ssf {

enum class ViolationKind { e1, e2, e3, head_equivocation };

std::string_view to_string(ViolationKind k);

/// Distinct votes with equal target slots.
bool check_e1(const FfgVote& a, const FfgVote& b);
/// Distinct votes where one slot interval strictly surrounds the other.
bool check_e2(const FfgVote& a, const FfgVote& b);
/// The acknowledged slot lies strictly inside the vote's slot interval.
bool check_e3(const FfgVote& vote, const Acknowledgment& ack);
/// Two distinct head votes for one slot.
bool check_head_equivocation(const HeadVote& a, const HeadVote& b);

struct Violation {
  ViolationKind kind;
  ValidatorIndex offender = 0;
  /// Ordered by message id, except for E3 where first is the FFG vote.
  MessagePtr first;
  MessagePtr second;

  /// Re-checks attribution and the kind's predicate on the evidence.
  bool verify() const;

  bool operator<(const Violation& o) const;
  bool operator==(const Violation& o) const;
};

/// All violations derivable from pairs of messages in the pool (proposals
/// are unpacked). Sorted and free of duplicates.
std::vector<Violation> scan(std::span<const MessagePtr> pool);

struct InsufficientEvidence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CulpritRoute { e1, e2, e3 };

std::string_view to_string(CulpritRoute r);

struct CulpritReport {
  CulpritRoute route;
  Checkpoint earlier;
  Checkpoint later;
  std::map<ValidatorIndex, Violation> culprits;
};

/// Identifies at least ceil(n/3) violators from two conflicting finalized
/// checkpoints. Throws InsufficientEvidence unless the pool finalizes both.
CulpritReport extract_culprits(const Checkpoint& a, const Checkpoint& b,
                               std::span<const MessagePtr> pool, std::uint32_t n);

}  // namespace ssf
