// SPDX-License-Identifier: Apache-2.0
#include "ssf/slasher.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "ssf/codec.hpp"

namespace ssf {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::e1: return "E1";
    case ViolationKind::e2: return "E2";
    case ViolationKind::e3: return "E3";
    case ViolationKind::head_equivocation: return "head-equivocation";
  }
  return "unknown";
}

std::string_view to_string(CulpritRoute r) {
  switch (r) {
    case CulpritRoute::e1: return "E1";
    case CulpritRoute::e2: return "E2";
    case CulpritRoute::e3: return "E3";
  }
  return "unknown";
}

bool check_e1(const FfgVote& a, const FfgVote& b) {
  return a != b && a.voter == b.voter && a.target.slot == b.target.slot;
}

bool check_e2(const FfgVote& a, const FfgVote& b) {
  if (a == b || a.voter != b.voter) return false;
  auto surrounds = [](const FfgVote& outer, const FfgVote& inner) {
    return outer.source.slot < inner.source.slot && inner.source.slot < inner.target.slot &&
           inner.target.slot < outer.target.slot;
  };
  return surrounds(a, b) || surrounds(b, a);
}

bool check_e3(const FfgVote& vote, const Acknowledgment& ack) {
  return vote.voter == ack.voter && vote.source.slot < ack.checkpoint.slot &&
         ack.checkpoint.slot < vote.target.slot;
}

bool check_head_equivocation(const HeadVote& a, const HeadVote& b) {
  return a != b && a.voter == b.voter && a.slot == b.slot;
}

bool Violation::verify() const {
  if (!first || !second) return false;
  if (first->author() != offender || second->author() != offender) return false;
  switch (kind) {
    case ViolationKind::e1:
    case ViolationKind::e2: {
      const auto* a = first->get_if<FfgVote>();
      const auto* b = second->get_if<FfgVote>();
      if (!a || !b) return false;
      return kind == ViolationKind::e1 ? check_e1(*a, *b) : check_e2(*a, *b);
    }
    case ViolationKind::e3: {
      const auto* v = first->get_if<FfgVote>();
      const auto* a = second->get_if<Acknowledgment>();
      return v && a && check_e3(*v, *a);
    }
    case ViolationKind::head_equivocation: {
      const auto* a = first->get_if<HeadVote>();
      const auto* b = second->get_if<HeadVote>();
      return a && b && check_head_equivocation(*a, *b);
    }
  }
  return false;
}

bool Violation::operator<(const Violation& o) const {
  return std::tie(kind, offender, first->id(), second->id()) <
         std::tie(o.kind, o.offender, o.first->id(), o.second->id());
}

bool Violation::operator==(const Violation& o) const {
  return kind == o.kind && offender == o.offender && first->id() == o.first->id() &&
         second->id() == o.second->id();
}

namespace {

Violation ordered_pair(ViolationKind k, ValidatorIndex who, MessagePtr a, MessagePtr b) {
  if (b->id() < a->id()) std::swap(a, b);
  return Violation{k, who, std::move(a), std::move(b)};
}

std::vector<MessagePtr> unpack(std::span<const MessagePtr> pool) {
  std::vector<MessagePtr> flat;
  for (const auto& m : pool) append_atomic(m, flat);
  std::sort(flat.begin(), flat.end(),
            [](const MessagePtr& a, const MessagePtr& b) { return a->id() < b->id(); });
  flat.erase(std::unique(flat.begin(), flat.end(),
                         [](const MessagePtr& a, const MessagePtr& b) { return a->id() == b->id(); }),
             flat.end());
  return flat;
}

}  // namespace

std::vector<Violation> scan(std::span<const MessagePtr> pool) {
  struct PerVoter {
    std::vector<MessagePtr> head, ffg, ack;
  };
  std::map<ValidatorIndex, PerVoter> by_voter;
  for (const auto& m : unpack(pool)) {
    switch (m->kind()) {
      case MessageKind::head_vote: by_voter[m->author()].head.push_back(m); break;
      case MessageKind::ffg_vote: by_voter[m->author()].ffg.push_back(m); break;
      case MessageKind::ack: by_voter[m->author()].ack.push_back(m); break;
      default: break;
    }
  }

  std::set<Violation> out;
  for (const auto& [who, pv] : by_voter) {
    for (std::size_t i = 0; i < pv.head.size(); ++i) {
      for (std::size_t j = i + 1; j < pv.head.size(); ++j) {
        if (check_head_equivocation(*pv.head[i]->get_if<HeadVote>(), *pv.head[j]->get_if<HeadVote>())) {
          out.insert(ordered_pair(ViolationKind::head_equivocation, who, pv.head[i], pv.head[j]));
        }
      }
    }
    for (std::size_t i = 0; i < pv.ffg.size(); ++i) {
      const auto& a = *pv.ffg[i]->get_if<FfgVote>();
      for (std::size_t j = i + 1; j < pv.ffg.size(); ++j) {
        const auto& b = *pv.ffg[j]->get_if<FfgVote>();
        if (check_e1(a, b)) out.insert(ordered_pair(ViolationKind::e1, who, pv.ffg[i], pv.ffg[j]));
        if (check_e2(a, b)) out.insert(ordered_pair(ViolationKind::e2, who, pv.ffg[i], pv.ffg[j]));
      }
      for (const auto& ack : pv.ack) {
        if (check_e3(a, *ack->get_if<Acknowledgment>())) {
          out.insert(Violation{ViolationKind::e3, who, pv.ffg[i], ack});
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

namespace {

/// Checkpoints along the justification chain of c, plus the target of the
/// first slot-adjacent link out of c when one exists.
std::vector<Checkpoint> chain_checkpoints(const JustificationState& js, const Checkpoint& c,
                                          const SupermajorityLink* finalizing) {
  std::vector<Checkpoint> out{genesis_checkpoint()};
  for (const auto* l : js.justification_chain(c)) out.push_back(l->target);
  if (finalizing) out.push_back(finalizing->target);
  return out;
}

const SupermajorityLink* finalizing_link(const JustificationState& js, const Checkpoint& c) {
  for (const auto& [key, link] : js.links) {
    if (key.first == c && key.second.slot == c.slot + 1) return &link;
  }
  return nullptr;
}

std::map<ValidatorIndex, MessagePtr> ackers_of(const View& v, const Checkpoint& c) {
  std::map<ValidatorIndex, MessagePtr> out;
  for (const auto& m : v.acks()) {
    const auto& a = *m->get_if<Acknowledgment>();
    if (a.checkpoint == c && a.slot == c.slot) {
      auto [it, inserted] = out.emplace(a.voter, m);
      if (!inserted && m->id() < it->second->id()) it->second = m;
    }
  }
  return out;
}

}  // namespace

CulpritReport extract_culprits(const Checkpoint& a, const Checkpoint& b,
                               std::span<const MessagePtr> pool, std::uint32_t n) {
  View v = View::with_genesis();
  v.insert(pool);
  const auto js = compute_justification(v, n);
  const auto fin = compute_finalized_with_acks(js, v.acks(), n);
  for (const auto& c : {a, b}) {
    if (!fin.contains(c)) {
      throw InsufficientEvidence("pool does not finalize " + codec::to_text(c));
    }
  }
  if (v.comparable(a.block, b.block)) {
    throw InsufficientEvidence("checkpoints " + codec::to_text(a) + " and " + codec::to_text(b) +
                               " do not conflict");
  }

  const Checkpoint& early = std::min(a, b);
  const Checkpoint& late = std::max(a, b);
  const auto* early_fin = finalizing_link(js, early);
  const auto* late_fin = finalizing_link(js, late);

  CulpritReport report{CulpritRoute::e1, early, late, {}};

  // Two distinct justified checkpoints in one slot: their justifying links
  // share at least 2q - n voters, each with two votes of equal target slot.
  std::map<Slot, std::set<Checkpoint>> by_slot;
  for (const auto& c : chain_checkpoints(js, early, early_fin)) by_slot[c.slot].insert(c);
  for (const auto& c : chain_checkpoints(js, late, late_fin)) by_slot[c.slot].insert(c);
  for (const auto& [slot, cps] : by_slot) {
    if (cps.size() < 2) continue;
    auto it = cps.begin();
    const auto* l1 = js.justifying_link(*it);
    const auto* l2 = js.justifying_link(*std::next(it));
    for (const auto& [who, m1] : l1->votes) {
      if (auto m2 = l2->votes.find(who); m2 != l2->votes.end()) {
        report.culprits.emplace(who, ordered_pair(ViolationKind::e1, who, m1, m2->second));
      }
    }
    return report;
  }

  // Otherwise slots along the two chains interleave; find the first link of
  // the later chain that jumps over the earlier checkpoint.
  auto later_chain = js.justification_chain(late);
  const SupermajorityLink* jump = nullptr;
  for (const auto* l : later_chain) {
    if (l->target.slot > early.slot) {
      jump = l;
      break;
    }
  }
  if (!jump) throw InsufficientEvidence("later chain never passes the earlier checkpoint");

  if (early_fin) {
    report.route = CulpritRoute::e2;
    for (const auto& [who, m1] : early_fin->votes) {
      if (auto m2 = jump->votes.find(who); m2 != jump->votes.end()) {
        report.culprits.emplace(who, ordered_pair(ViolationKind::e2, who, m1, m2->second));
      }
    }
  } else {
    report.route = CulpritRoute::e3;
    for (const auto& [who, ack] : ackers_of(v, early)) {
      if (auto m = jump->votes.find(who); m != jump->votes.end()) {
        report.culprits.emplace(who, Violation{ViolationKind::e3, who, m->second, ack});
      }
    }
  }
  return report;
}

}  // namespace ssf
