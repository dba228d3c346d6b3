// SPDX-License-Identifier: Apache-2.0
#include "ssf/forkchoice.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "ssf/ffg.hpp"

namespace ssf {

bool FilteredView::block_visible(const BlockId& id) const {
  if (!view->is_connected(id)) return false;
  return !anchor || view->comparable(*anchor, id);
}

std::vector<MessagePtr> FilteredView::messages() const {
  std::set<MessageId> kept_votes;
  for (const auto& m : head_votes) kept_votes.insert(m->id());
  std::vector<MessagePtr> out;
  for (const auto& m : view->messages()) {
    if (m->kind() == MessageKind::head_vote) {
      if (!kept_votes.contains(m->id())) continue;
    } else if (const auto* b = m->get_if<Block>()) {
      if (anchor && view->is_connected(b->id) && !block_visible(b->id)) continue;
    }
    out.push_back(m);
  }
  return out;
}

FilteredView unfiltered(const View& v, Slot t) {
  return FilteredView{&v, t, v.head_votes(), std::nullopt};
}

namespace {

const HeadVote& hv(const MessagePtr& m) { return *m->get_if<HeadVote>(); }

FilteredView keep_if(const FilteredView& fv, auto pred) {
  FilteredView out{fv.view, fv.slot, {}, fv.anchor};
  for (const auto& m : fv.head_votes) {
    if (pred(hv(m))) out.head_votes.push_back(m);
  }
  return out;
}

}  // namespace

FilteredView fil_eq(const FilteredView& fv) {
  std::map<std::pair<ValidatorIndex, Slot>, BlockId> first;
  std::set<ValidatorIndex> offenders;
  for (const auto& m : fv.head_votes) {
    const auto& v = hv(m);
    auto [it, inserted] = first.emplace(std::make_pair(v.voter, v.slot), v.block);
    if (!inserted && it->second != v.block) offenders.insert(v.voter);
  }
  return keep_if(fv, [&](const HeadVote& v) { return !offenders.contains(v.voter); });
}

FilteredView fil_exp(const FilteredView& fv, std::optional<Slot> eta) {
  if (!eta || *eta >= fv.slot) return fv;
  const Slot min_slot = fv.slot - *eta;
  return keep_if(fv, [&](const HeadVote& v) { return v.slot >= min_slot; });
}

FilteredView fil_lmd(const FilteredView& fv) {
  std::map<ValidatorIndex, Slot> latest;
  for (const auto& m : fv.head_votes) {
    auto& s = latest[hv(m).voter];
    s = std::max(s, hv(m).slot);
  }
  return keep_if(fv, [&](const HeadVote& v) { return latest.at(v.voter) == v.slot; });
}

FilteredView fil_ffg(const FilteredView& fv, const BlockId& justified_block) {
  FilteredView out = fv;
  out.anchor = justified_block;
  return out;
}

FilteredView fil_eq(const View& v, Slot t) { return fil_eq(unfiltered(v, t)); }
FilteredView fil_exp(const View& v, Slot t, std::optional<Slot> eta) {
  return fil_exp(unfiltered(v, t), eta);
}
FilteredView fil_lmd(const View& v, Slot t) { return fil_lmd(unfiltered(v, t)); }
FilteredView fil_ffg(const View& v, Slot t, std::uint32_t n) {
  return fil_ffg(unfiltered(v, t), compute_justification(v, n).latest.block);
}

namespace {

struct Tree {
  std::vector<BlockId> ids;
  std::vector<std::int64_t> parent;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::uint32_t> weight;
  std::unordered_map<BlockId, std::size_t, DigestHash> index;
};

Tree build_tree(const FilteredView& fv) {
  Tree t;
  const View& v = *fv.view;
  for (const auto& id : v.connected_blocks()) {
    if (!fv.block_visible(id)) continue;
    std::size_t i = t.ids.size();
    t.index.emplace(id, i);
    t.ids.push_back(id);
    t.children.emplace_back();
    const auto& b = v.block(id);
    std::int64_t p = -1;
    if (b.parent) {
      // Visibility is closed under ancestry, so the parent is indexed.
      p = static_cast<std::int64_t>(t.index.at(*b.parent));
      t.children[p].push_back(i);
    }
    t.parent.push_back(p);
  }
  for (auto& c : t.children) {
    std::sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return t.ids[a] < t.ids[b]; });
  }

  t.weight.assign(t.ids.size(), 0);
  std::vector<std::int64_t> stamp(t.ids.size(), -1);
  for (const auto& m : fv.head_votes) {
    const auto& vote = hv(m);
    auto it = t.index.find(vote.block);
    if (it == t.index.end()) continue;
    for (std::int64_t i = static_cast<std::int64_t>(it->second);
         i >= 0 && stamp[i] != static_cast<std::int64_t>(vote.voter); i = t.parent[i]) {
      stamp[i] = vote.voter;
      ++t.weight[i];
    }
  }
  return t;
}

}  // namespace

std::map<BlockId, std::uint32_t> ghost_weights(const FilteredView& fv) {
  // Per-voter stamping counts each voter once per node provided a voter's
  // votes are contiguous; sort to guarantee it.
  FilteredView sorted = fv;
  std::stable_sort(sorted.head_votes.begin(), sorted.head_votes.end(),
                   [](const MessagePtr& a, const MessagePtr& b) { return hv(a).voter < hv(b).voter; });
  Tree t = build_tree(sorted);
  std::map<BlockId, std::uint32_t> out;
  for (std::size_t i = 0; i < t.ids.size(); ++i) out.emplace(t.ids[i], t.weight[i]);
  return out;
}

BlockId ghost(const FilteredView& fv) {
  FilteredView sorted = fv;
  std::stable_sort(sorted.head_votes.begin(), sorted.head_votes.end(),
                   [](const MessagePtr& a, const MessagePtr& b) { return hv(a).voter < hv(b).voter; });
  Tree t = build_tree(sorted);
  auto root = t.index.find(genesis_id());
  if (root == t.index.end()) throw UnknownBlockError(genesis_id());
  std::size_t cur = root->second;
  while (!t.children[cur].empty()) {
    std::size_t best = t.children[cur].front();
    for (std::size_t c : t.children[cur]) {
      if (t.weight[c] > t.weight[best]) best = c;
    }
    cur = best;
  }
  return t.ids[cur];
}

BlockId rlmd_ghost(const FilteredView& fv, const ForkChoiceParams& p) {
  return ghost(fil_lmd(fil_exp(fil_eq(fv), p.eta)));
}

BlockId rlmd_ghost(const View& v, Slot t, const ForkChoiceParams& p) {
  return rlmd_ghost(unfiltered(v, t), p);
}

BlockId hfc(const View& v, Slot t, const ForkChoiceParams& p, const BlockId& justified_block) {
  return rlmd_ghost(fil_ffg(unfiltered(v, t), justified_block), p);
}

BlockId hfc(const View& v, Slot t, const ForkChoiceParams& p) {
  return hfc(v, t, p, compute_justification(v, p.n).latest.block);
}

BlockId fork_choice(ForkChoiceMode mode, const View& v, Slot t, const ForkChoiceParams& p,
                    const BlockId& justified_block) {
  return mode == ForkChoiceMode::hfc ? hfc(v, t, p, justified_block) : rlmd_ghost(v, t, p);
}

}  // namespace ssf
