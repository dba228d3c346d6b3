// SPDX-License-Identifier: Apache-2.0
#include "ssf/ffg.hpp"

#include <algorithm>

#include "ssf/codec.hpp"

namespace ssf {

VoteValidity classify_ffg_vote(const View& v, const FfgVote& vote) {
  if (vote.source.slot >= vote.target.slot) return VoteValidity::invalid;
  if (!v.is_connected(vote.source.block) || !v.is_connected(vote.target.block)) {
    // A block that is present but can never connect still leaves the vote
    // pending; its validity is simply never settled.
    return VoteValidity::pending;
  }
  if (vote.source.slot < v.block(vote.source.block).slot) return VoteValidity::invalid;
  if (vote.target.slot < v.block(vote.target.block).slot) return VoteValidity::invalid;
  if (!v.is_ancestor(vote.source.block, vote.target.block)) return VoteValidity::invalid;
  return VoteValidity::valid;
}

std::set<ValidatorIndex> SupermajorityLink::voters() const {
  std::set<ValidatorIndex> out;
  for (const auto& [v, m] : votes) out.insert(v);
  return out;
}

const SupermajorityLink* JustificationState::justifying_link(const Checkpoint& c) const {
  if (!justified.contains(c)) return nullptr;
  for (const auto& [key, link] : links) {
    if (key.second == c) return &link;
  }
  return nullptr;
}

std::vector<const SupermajorityLink*> JustificationState::justification_chain(
    const Checkpoint& c) const {
  std::vector<const SupermajorityLink*> out;
  for (auto* l = justifying_link(c); l; l = justifying_link(l->source)) out.push_back(l);
  std::reverse(out.begin(), out.end());
  return out;
}

bool JustificationState::operator==(const JustificationState& o) const {
  if (justified != o.justified || latest != o.latest || latest_tied != o.latest_tied ||
      finalized != o.finalized || links.size() != o.links.size()) {
    return false;
  }
  for (auto a = links.begin(), b = o.links.begin(); a != links.end(); ++a, ++b) {
    if (a->first != b->first || a->second.voters() != b->second.voters()) return false;
  }
  return true;
}

JustificationState close_justification(const LinkTallies& tallies, std::uint32_t n) {
  const std::uint32_t q = quorum(n);
  JustificationState st;
  st.justified.insert(genesis_checkpoint());

  // Sources always have strictly smaller slots than targets, so one pass in
  // source order reaches the fixed point.
  for (const auto& [key, votes] : tallies) {
    if (votes.size() >= q && st.justified.contains(key.first)) {
      st.justified.insert(key.second);
      st.links.emplace(key, SupermajorityLink{key.first, key.second, votes});
    }
  }

  st.latest = genesis_checkpoint();
  std::size_t at_latest = 0;
  for (const auto& c : st.justified) {
    if (c.slot > st.latest.slot) {
      st.latest = c;
      at_latest = 1;
    } else if (c.slot == st.latest.slot) {
      if (at_latest == 0) st.latest = c;
      ++at_latest;
    }
  }
  st.latest_tied = at_latest > 1;
  st.finalized = compute_finalized(st);
  return st;
}

JustificationState compute_justification(const View& v, std::uint32_t n) {
  LinkTallies tallies;
  for (const auto& m : v.ffg_votes()) {
    const auto& vote = *m->get_if<FfgVote>();
    if (classify_ffg_vote(v, vote) != VoteValidity::valid) continue;
    tallies[{vote.source, vote.target}].emplace(vote.voter, m);
  }
  return close_justification(tallies, n);
}

std::set<Checkpoint> compute_finalized(const JustificationState& js) {
  std::set<Checkpoint> out;
  for (const auto& [key, link] : js.links) {
    if (key.second.slot == key.first.slot + 1) out.insert(key.first);
  }
  return out;
}

std::set<Checkpoint> compute_finalized_with_acks(const JustificationState& js,
                                                 std::span<const MessagePtr> acks,
                                                 std::uint32_t n) {
  std::set<Checkpoint> out = compute_finalized(js);
  std::map<Checkpoint, std::set<ValidatorIndex>> ackers;
  for (const auto& m : acks) {
    const auto* a = m->get_if<Acknowledgment>();
    if (a && a->checkpoint.slot == a->slot) ackers[a->checkpoint].insert(a->voter);
  }
  for (const auto& [c, voters] : ackers) {
    if (voters.size() >= quorum(n) && js.justified.contains(c)) out.insert(c);
  }
  return out;
}

ConflictingFinalization::ConflictingFinalization(Checkpoint a, Checkpoint b)
    : std::runtime_error("conflicting finalization: " + codec::to_text(a) + " vs " +
                         codec::to_text(b)),
      first(a),
      second(b) {}

std::vector<BlockId> finalized_chain(const View& v, const std::set<Checkpoint>& finalized) {
  std::vector<Checkpoint> cps(finalized.begin(), finalized.end());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    for (std::size_t j = i + 1; j < cps.size(); ++j) {
      if (!v.comparable(cps[i].block, cps[j].block)) {
        throw ConflictingFinalization(cps[i], cps[j]);
      }
    }
  }
  std::vector<BlockId> chain{genesis_id()};
  std::vector<std::pair<std::uint64_t, BlockId>> by_height;
  for (const auto& c : cps) by_height.emplace_back(v.height(c.block), c.block);
  std::sort(by_height.begin(), by_height.end());
  for (const auto& [h, b] : by_height) {
    if (b != chain.back()) chain.push_back(b);
  }
  return chain;
}

std::vector<BlockId> finalized_chain(const View& v, std::uint32_t n, bool with_acks) {
  auto js = compute_justification(v, n);
  return finalized_chain(v, with_acks ? compute_finalized_with_acks(js, v.acks(), n)
                                      : js.finalized);
}

JustificationTracker::JustificationTracker(std::uint32_t n) : n_(n) {
  state_ = close_justification(tallies_, n_);
}

void JustificationTracker::tally(const MessagePtr& m) {
  const auto& vote = *m->get_if<FfgVote>();
  tallies_[{vote.source, vote.target}].emplace(vote.voter, m);
}

const JustificationState& JustificationTracker::update(const View& v) {
  bool changed = false;
  const auto& votes = v.ffg_votes();

  if (v.connected_blocks().size() != connected_seen_) {
    connected_seen_ = v.connected_blocks().size();
    std::vector<MessagePtr> still;
    for (const auto& m : pending_) {
      switch (classify_ffg_vote(v, *m->get_if<FfgVote>())) {
        case VoteValidity::valid: tally(m); changed = true; break;
        case VoteValidity::pending: still.push_back(m); break;
        case VoteValidity::invalid: break;
      }
    }
    pending_ = std::move(still);
  }

  for (; cursor_ < votes.size(); ++cursor_) {
    const auto& m = votes[cursor_];
    switch (classify_ffg_vote(v, *m->get_if<FfgVote>())) {
      case VoteValidity::valid: tally(m); changed = true; break;
      case VoteValidity::pending: pending_.push_back(m); break;
      case VoteValidity::invalid: break;
    }
  }

  if (changed) state_ = close_justification(tallies_, n_);
  return state_;
}

}  // namespace ssf
