// SPDX-License-Identifier: Apache-2.0
#include "ssf/message.hpp"

#include <algorithm>

#include "ssf/codec.hpp"

namespace ssf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

MessageId compute_id(const Message::Body& body) {
  if (const auto* b = std::get_if<Block>(&body)) return MessageId{b->id.bytes};

  codec::ByteWriter w;
  std::visit(Overloaded{
                 [](const Block&) {},
                 [&](const HeadVote& v) {
                   w.u8(static_cast<std::uint8_t>(MessageKind::head_vote));
                   w.digest(v.block);
                   w.u64(v.slot);
                   w.u32(v.voter);
                 },
                 [&](const FfgVote& v) {
                   w.u8(static_cast<std::uint8_t>(MessageKind::ffg_vote));
                   w.checkpoint(v.source);
                   w.checkpoint(v.target);
                   w.u32(v.voter);
                 },
                 [&](const Proposal& p) {
                   w.u8(static_cast<std::uint8_t>(MessageKind::proposal));
                   w.digest(p.block.id);
                   w.u32(static_cast<std::uint32_t>(p.proposed_view.size()));
                   for (const auto& m : p.proposed_view) w.digest(m->id());
                   w.u64(p.slot);
                   w.u32(p.proposer);
                 },
                 [&](const Acknowledgment& a) {
                   w.u8(static_cast<std::uint8_t>(MessageKind::ack));
                   w.checkpoint(a.checkpoint);
                   w.u64(a.slot);
                   w.u32(a.voter);
                 },
             },
             body);
  return MessageId{sha256(w.data())};
}

}  // namespace

BlockId block_digest(const std::optional<BlockId>& parent, Slot slot,
                     ValidatorIndex proposer, const std::string& body) {
  codec::ByteWriter w;
  w.u8(static_cast<std::uint8_t>(MessageKind::block));
  w.u8(parent ? 1 : 0);
  if (parent) w.digest(*parent);
  w.u64(slot);
  w.u32(proposer);
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.raw({reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
  return BlockId{sha256(w.data())};
}

Block make_block(std::optional<BlockId> parent, Slot slot,
                 ValidatorIndex proposer, std::string body) {
  Block b;
  b.id = block_digest(parent, slot, proposer, body);
  b.parent = parent;
  b.slot = slot;
  b.proposer = proposer;
  b.body = std::move(body);
  return b;
}

const Block& genesis_block() {
  static const Block g = make_block(std::nullopt, 0, 0, "genesis");
  return g;
}

const BlockId& genesis_id() { return genesis_block().id; }

Checkpoint genesis_checkpoint() { return Checkpoint{genesis_id(), 0}; }

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::block: return "block";
    case MessageKind::head_vote: return "head-vote";
    case MessageKind::ffg_vote: return "ffg-vote";
    case MessageKind::proposal: return "propose";
    case MessageKind::ack: return "ack";
  }
  return "unknown";
}

MessagePtr Message::make(Body body) {
  if (auto* p = std::get_if<Proposal>(&body)) {
    std::vector<MessagePtr> flat;
    flat.reserve(p->proposed_view.size());
    for (const auto& m : p->proposed_view) append_atomic(m, flat);
    std::sort(flat.begin(), flat.end(),
              [](const MessagePtr& a, const MessagePtr& b) {
                return a->id() < b->id();
              });
    flat.erase(std::unique(flat.begin(), flat.end(),
                           [](const MessagePtr& a, const MessagePtr& b) {
                             return a->id() == b->id();
                           }),
               flat.end());
    p->proposed_view = std::move(flat);
  }
  MessageId id = compute_id(body);
  return MessagePtr(new Message(std::move(body), id));
}

MessageKind Message::kind() const {
  // Variant alternatives are declared in MessageKind order.
  return static_cast<MessageKind>(body_.index() + 1);
}

ValidatorIndex Message::author() const {
  return std::visit(Overloaded{
                        [](const Block& b) { return b.proposer; },
                        [](const HeadVote& v) { return v.voter; },
                        [](const FfgVote& v) { return v.voter; },
                        [](const Proposal& p) { return p.proposer; },
                        [](const Acknowledgment& a) { return a.voter; },
                    },
                    body_);
}

MessagePtr make_block_message(const Block& block) {
  return Message::make(block);
}

MessagePtr make_head_vote(const BlockId& block, Slot slot,
                          ValidatorIndex voter) {
  return Message::make(HeadVote{block, slot, voter});
}

MessagePtr make_ffg_vote(const Checkpoint& source, const Checkpoint& target,
                         ValidatorIndex voter) {
  return Message::make(FfgVote{source, target, voter});
}

MessagePtr make_ack(const Checkpoint& checkpoint, Slot slot,
                    ValidatorIndex voter) {
  return Message::make(Acknowledgment{checkpoint, slot, voter});
}

MessagePtr make_proposal(const Block& block, std::vector<MessagePtr> view,
                         Slot slot, ValidatorIndex proposer) {
  return Message::make(Proposal{block, std::move(view), slot, proposer});
}

std::optional<std::string> structural_error(const Message& m) {
  return std::visit(
      Overloaded{
          [](const Block& b) -> std::optional<std::string> {
            if (b.id != block_digest(b.parent, b.slot, b.proposer, b.body)) {
              return "block id does not match its content";
            }
            if (!b.parent && b.id != genesis_id()) {
              return "parentless block other than genesis";
            }
            if (b.parent && b.slot == 0) return "non-genesis block at slot 0";
            return std::nullopt;
          },
          [](const HeadVote&) -> std::optional<std::string> {
            return std::nullopt;
          },
          [](const FfgVote&) -> std::optional<std::string> {
            return std::nullopt;
          },
          [](const Proposal& p) -> std::optional<std::string> {
            if (p.block.slot != p.slot || p.block.proposer != p.proposer) {
              return "proposal block does not match proposal slot/proposer";
            }
            bool has_block = std::any_of(
                p.proposed_view.begin(), p.proposed_view.end(),
                [&](const MessagePtr& x) {
                  return x->id().bytes == p.block.id.bytes;
                });
            if (!has_block) return "proposed view does not contain the block";
            for (const auto& x : p.proposed_view) {
              if (auto err = structural_error(*x)) {
                return "proposed view: " + *err;
              }
            }
            if (auto err = structural_error(*Message::make(p.block))) {
              return err;
            }
            return std::nullopt;
          },
          [](const Acknowledgment& a) -> std::optional<std::string> {
            if (a.checkpoint.slot != a.slot) {
              return "acknowledgment slot differs from its checkpoint slot";
            }
            return std::nullopt;
          },
      },
      m.body());
}

void append_atomic(const MessagePtr& m, std::vector<MessagePtr>& out) {
  if (const auto* p = m->get_if<Proposal>()) {
    out.push_back(make_block_message(p->block));
    for (const auto& x : p->proposed_view) append_atomic(x, out);
  } else {
    out.push_back(m);
  }
}

}  // namespace ssf
