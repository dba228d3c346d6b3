// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssf/digest.hpp"

namespace ssf {

/// A block. The parent reference is absent only for genesis.
struct Block {
  BlockId id;
  std::optional<BlockId> parent;
  Slot slot = 0;
  ValidatorIndex proposer = 0;
  std::string body;

  bool operator==(const Block&) const = default;
};

/// Computes the content digest used as a block's identifier.
BlockId block_digest(const std::optional<BlockId>& parent, Slot slot,
                     ValidatorIndex proposer, const std::string& body);

Block make_block(std::optional<BlockId> parent, Slot slot,
                 ValidatorIndex proposer, std::string body = {});

const Block& genesis_block();
const BlockId& genesis_id();

/// (block, slot) pair. Ordered by slot first, then by block id, which is the
/// scan order used by justification and forensics.
struct Checkpoint {
  BlockId block;
  Slot slot = 0;

  bool operator==(const Checkpoint&) const = default;
  std::strong_ordering operator<=>(const Checkpoint& o) const {
    if (auto c = slot <=> o.slot; c != 0) return c;
    return block <=> o.block;
  }
};

Checkpoint genesis_checkpoint();

struct HeadVote {
  BlockId block;
  Slot slot = 0;
  ValidatorIndex voter = 0;

  auto operator<=>(const HeadVote&) const = default;
};

struct FfgVote {
  Checkpoint source;
  Checkpoint target;
  ValidatorIndex voter = 0;

  bool operator==(const FfgVote&) const = default;
  auto operator<=>(const FfgVote&) const = default;
};

struct Acknowledgment {
  Checkpoint checkpoint;
  Slot slot = 0;
  ValidatorIndex voter = 0;

  bool operator==(const Acknowledgment&) const = default;
  auto operator<=>(const Acknowledgment&) const = default;
};

class Message;
using MessagePtr = std::shared_ptr<const Message>;

/// The proposed view holds atomic messages only (no nested proposals),
/// sorted by message id and free of duplicates.
struct Proposal {
  Block block;
  std::vector<MessagePtr> proposed_view;
  Slot slot = 0;
  ValidatorIndex proposer = 0;
};

enum class MessageKind : std::uint8_t {
  block = 1,
  head_vote = 2,
  ffg_vote = 3,
  proposal = 4,
  ack = 5,
};

std::string_view to_string(MessageKind kind);

/// Immutable protocol message. The author (sender identity) is derived from
/// the content: a block's proposer, a vote's or acknowledgment's voter, a
/// proposal's proposer.
class Message {
 public:
  using Body = std::variant<Block, HeadVote, FfgVote, Proposal, Acknowledgment>;

  /// Builds a message and computes its id. Proposed views are flattened,
  /// sorted and deduplicated.
  static MessagePtr make(Body body);

  const MessageId& id() const { return id_; }
  const Body& body() const { return body_; }
  MessageKind kind() const;
  ValidatorIndex author() const;
  bool is_atomic() const { return kind() != MessageKind::proposal; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&body_);
  }

 private:
  Message(Body body, MessageId id) : body_(std::move(body)), id_(id) {}

  Body body_;
  MessageId id_;
};

MessagePtr make_block_message(const Block& block);
MessagePtr make_head_vote(const BlockId& block, Slot slot, ValidatorIndex voter);
MessagePtr make_ffg_vote(const Checkpoint& source, const Checkpoint& target,
                         ValidatorIndex voter);
MessagePtr make_ack(const Checkpoint& checkpoint, Slot slot,
                    ValidatorIndex voter);
MessagePtr make_proposal(const Block& block, std::vector<MessagePtr> view,
                         Slot slot, ValidatorIndex proposer);

/// Returns a reason when the message violates a structural invariant that
/// can be checked without a view (block id matches its content, proposal
/// and acknowledgment field agreement, genesis uniqueness). FFG votes with
/// inverted slots are not malformed: they are kept as evidence.
std::optional<std::string> structural_error(const Message& m);

/// Appends the atomic messages carried by m (m itself, or a proposal's
/// block plus its proposed view).
void append_atomic(const MessagePtr& m, std::vector<MessagePtr>& out);

}  // namespace ssf
