// SPDX-License-Identifier: Apache-2.0
#include "ssf/validator.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "ssf/mix.hpp"

namespace ssf {

ValidatorIndex ProposerSchedule::operator()(Slot t) const {
  switch (kind) {
    case Kind::round_robin: return static_cast<ValidatorIndex>(t % n);
    case Kind::seeded: return static_cast<ValidatorIndex>(mix64({seed, t}) % n);
    case Kind::list: return list.empty() ? 0 : list[t % list.size()];
  }
  return 0;
}

std::string_view to_string(ValidatorStatus s) {
  switch (s) {
    case ValidatorStatus::asleep: return "asleep";
    case ValidatorStatus::joining: return "joining";
    case ValidatorStatus::active: return "active";
  }
  return "unknown";
}

ValidatorState::ValidatorState(ValidatorIndex index, ValidatorParams params, ValidatorStatus status)
    : index_(index),
      params_(std::move(params)),
      status_(status),
      view_(View::with_genesis()),
      tracker_(params_.n),
      canonical_(genesis_id()),
      available_(genesis_id()),
      finalized_(genesis_id()) {}

BlockId ValidatorState::fork_choice(Slot t) const {
  return ssf::fork_choice(params_.fc_mode, view_, t, ForkChoiceParams{params_.eta, params_.n},
                          latest_justified().block);
}

void ValidatorState::deliver_own(const MessagePtr& m) {
  if (!m->is_atomic()) seen_proposals_.insert(m->id());
  buffer_.insert(m);
}

ReceiveResult ValidatorState::on_receive(const MessagePtr& m, Round r) {
  ReceiveResult out;
  if (auto err = structural_error(*m)) {
    out.note = "dropped " + std::string(to_string(m->kind())) + ": " + *err;
    return out;
  }
  const Slot t = params_.slot_of(r);

  std::vector<MessagePtr> parts;
  append_atomic(m, parts);
  for (const auto& p : parts) {
    if (!view_.contains(p->id()) && !buffer_.contains(p->id())) out.regossip.push_back(p);
  }
  buffer_.insert(m);

  if (const auto* p = m->get_if<Proposal>()) {
    const Round start = p->slot * params_.slot_length();
    bool fresh = seen_proposals_.insert(m->id()).second;
    if (fresh && r >= start && r < start + params_.delta) out.regossip.push_back(m);
    if (status_ == ValidatorStatus::active && p->slot == t && r <= start + params_.delta &&
        params_.proposers(t) == p->proposer) {
      if (view_.insert(m)) normalize(t);
    }
  }
  return out;
}

RoundOutput ValidatorState::on_round(Round r) {
  RoundOutput out;
  const Slot t = params_.slot_of(r);
  const Round off = r % params_.slot_length();
  const Round d = params_.delta;

  if (status_ == ValidatorStatus::asleep) return out;
  bool joined = false;
  if (status_ == ValidatorStatus::joining) {
    if (off != 3 * d) return out;
    status_ = ValidatorStatus::active;
    joined = true;
  }

  if (off == 0 && t >= 1 && params_.proposers(t) == index_) {
    out.phase = Phase::propose;
    out.emitted.push_back(propose(t));
  } else if (off == d && t >= 1) {
    out.phase = Phase::head_vote;
    out.emitted.push_back(head_vote(t));
  } else if (off == 2 * d && t >= 1) {
    out.phase = Phase::confirm;
    auto [vote, outcome] = confirm_and_vote(t);
    if (vote) out.emitted.push_back(*vote);
    out.confirm = outcome;
  } else if (off == 3 * d) {
    out.phase = Phase::merge;
    if (auto ack = merge_and_ack(t)) out.emitted.push_back(*ack);
    // A head chosen before sleeping is stale; adopt the merged view's.
    if (joined) {
      canonical_ = fork_choice(t + 1);
      normalize(t);
    }
  }
  for (const auto& m : out.emitted) deliver_own(m);
  return out;
}

void ValidatorState::merge_buffer() {
  view_.merge(buffer_);
  buffer_ = View{};
}

MessagePtr ValidatorState::propose(Slot t) {
  merge_buffer();
  normalize(t);
  const BlockId parent = fork_choice(t);
  std::string body = "v" + std::to_string(index_) + "/t" + std::to_string(t);
  if (!params_.body_tag.empty()) body += "/" + params_.body_tag;
  Block b = make_block(parent, t, index_, std::move(body));
  auto bm = make_block_message(b);
  view_.insert(bm);
  canonical_ = b.id;
  normalize(t);
  return make_proposal(b, view_.messages(), t, index_);
}

MessagePtr ValidatorState::head_vote(Slot t) {
  canonical_ = fork_choice(t);
  normalize(t);
  return make_head_vote(canonical_, t, index_);
}

std::optional<BlockId> ValidatorState::fast_confirmed(Slot t) const {
  // Canonical chain indexed by height.
  const std::uint64_t top = view_.height(canonical_);
  std::unordered_map<BlockId, std::uint64_t, DigestHash> on_chain;
  std::vector<BlockId> chain(top + 1);
  for (BlockId cur = canonical_;;) {
    std::uint64_t h = view_.height(cur);
    chain[h] = cur;
    on_chain.emplace(cur, h);
    if (h == 0) break;
    cur = *view_.block(cur).parent;
  }

  auto lookup = [&](const BlockId& id) -> const Block* {
    if (const Block* b = view_.find_block(id)) return b;
    return buffer_.find_block(id);
  };

  std::map<ValidatorIndex, std::uint64_t> support;
  for (const auto& m : buffer_.head_votes()) {
    const auto& v = *m->get_if<HeadVote>();
    if (v.slot != t) continue;
    std::optional<std::uint64_t> hit;
    BlockId cur = v.block;
    for (std::size_t steps = 0; steps <= view_.size() + buffer_.size(); ++steps) {
      if (auto it = on_chain.find(cur); it != on_chain.end()) {
        hit = it->second;
        break;
      }
      const Block* b = lookup(cur);
      if (!b || !b->parent) break;
      const Block* parent = lookup(*b->parent);
      if (!parent || parent->slot >= b->slot) break;
      cur = *b->parent;
    }
    if (!hit) continue;
    auto [it, inserted] = support.emplace(v.voter, *hit);
    if (!inserted) it->second = std::max(it->second, *hit);
  }

  const std::uint32_t q = quorum(params_.n);
  std::vector<std::uint32_t> count(top + 2, 0);
  for (const auto& [who, h] : support) ++count[h];
  std::uint32_t acc = 0;
  for (std::uint64_t h = top + 1; h-- > 0;) {
    acc += count[h];
    if (acc >= q) return chain[h];
  }
  return std::nullopt;
}

std::pair<std::optional<MessagePtr>, ConfirmOutcome> ValidatorState::confirm_and_vote(Slot t) {
  ConfirmOutcome c;
  c.slot = t;
  c.fast = fast_confirmed(t);
  c.kappa_prefix = view_.prefix_at_depth(canonical_, params_.kappa);
  const BlockId fast = c.fast.value_or(genesis_id());
  if (!(view_.is_ancestor(fast, available_) && view_.is_ancestor(c.kappa_prefix, available_))) {
    available_ = view_.height(fast) >= view_.height(c.kappa_prefix) ? fast : c.kappa_prefix;
  }
  normalize(t);
  c.available = available_;

  const Checkpoint lj = latest_justified();
  if (lj.slot >= t) return {std::nullopt, c};
  BlockId target = lj.block;
  if (available_ != lj.block && view_.is_ancestor(lj.block, available_)) target = available_;
  return {make_ffg_vote(lj, Checkpoint{target, t}, index_), c};
}

std::optional<MessagePtr> ValidatorState::merge_and_ack(Slot t) {
  merge_buffer();
  normalize(t);
  const Checkpoint lj = latest_justified();
  if (t >= 1 && lj.slot == t) return make_ack(lj, t, index_);
  return std::nullopt;
}

void ValidatorState::normalize(Slot t) {
  const auto& js = tracker_.update(view_);

  // Highest finalized block that extends every lower finalized one.
  BlockId fin = genesis_id();
  for (const auto& c : js.finalized) {
    if (view_.is_ancestor(fin, c.block)) {
      fin = c.block;
    } else if (!view_.is_ancestor(c.block, fin)) {
      break;
    }
  }
  finalized_ = fin;

  if (!view_.is_ancestor(finalized_, canonical_)) canonical_ = fork_choice(t);
  if (!view_.is_ancestor(available_, canonical_)) available_ = view_.lca(available_, canonical_);
  if (!view_.is_ancestor(finalized_, available_) && view_.is_ancestor(finalized_, canonical_)) {
    available_ = finalized_;
  }
}

}  // namespace ssf
