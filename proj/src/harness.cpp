// SPDX-License-Identifier: Apache-2.0
#include "ssf/harness.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "ssf/codec.hpp"
#include "ssf/ffg.hpp"
#include "ssf/simnet.hpp"

namespace ssf {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "PASS";
    case Outcome::fail: return "FAIL";
    case Outcome::not_applicable: return "N/A";
  }
  return "?";
}

std::string_view to_string(ChainKind c) {
  switch (c) {
    case ChainKind::finalized: return "fin";
    case ChainKind::available: return "ava";
    case ChainKind::canonical: return "canonical";
  }
  return "?";
}

namespace {

std::string short_id(const BlockId& b) { return b.hex().substr(0, 12); }

std::string at(ValidatorIndex v, Round r) { return "v" + std::to_string(v) + "@" + std::to_string(r); }

const BlockId& chain_of(const StateSnapshot& s, ChainKind c) {
  switch (c) {
    case ChainKind::finalized: return s.finalized;
    case ChainKind::available: return s.available;
    case ChainKind::canonical: return s.canonical;
  }
  return s.canonical;
}

Round stable_after(const TraceHeader& h) { return std::max(h.gst, h.gat) + h.slot_length(); }

}  // namespace

TraceIndex::TraceIndex(const Trace& trace) : trace_(&trace), global_(View::with_genesis()) {
  const auto& h = trace.header;
  states_.assign(h.total_rounds(), std::vector<std::optional<StateSnapshot>>(h.n));
  for (const auto& rec : trace.records) {
    switch (rec.kind) {
      case RecordKind::send: {
        sends_.emplace_back(rec.round, rec.message);
        std::vector<MessagePtr> parts;
        append_atomic(rec.message, parts);
        for (const auto& p : parts) {
          if (global_.insert(p)) pool_.push_back(p);
        }
        if (rec.actor.kind == Actor::Kind::adversary) adversarial_.insert(rec.actor.index);
        if (const auto* p = rec.message->get_if<Proposal>(); p && rec.actor.kind == Actor::Kind::honest) {
          if (!proposal_at_.contains(p->slot)) {
            proposal_at_[p->slot] = proposals_.size();
            proposals_.push_back(HonestProposal{p->block.id, p->slot, p->proposer, rec.round});
          }
        }
        break;
      }
      case RecordKind::state:
        if (rec.round < states_.size() && rec.actor.index < h.n) states_[rec.round][rec.actor.index] = rec.state;
        break;
      case RecordKind::confirm:
        confirms_[rec.confirm.slot][rec.actor.index] = rec.confirm;
        break;
      case RecordKind::event:
        if (rec.text.starts_with("corrupt v=")) {
          adversarial_.insert(static_cast<ValidatorIndex>(std::stoul(rec.text.substr(10))));
        }
        break;
      case RecordKind::note: break;
    }
  }
}

bool TraceIndex::is_ancestor(const BlockId& a, const BlockId& b) const {
  auto& row = anc_[a];
  if (auto it = row.find(b); it != row.end()) return it->second;
  bool res = global_.is_connected(a) && global_.is_connected(b) && global_.is_ancestor(a, b);
  row.emplace(b, res);
  return res;
}

const StateSnapshot* TraceIndex::state(Round r, ValidatorIndex v) const {
  if (r >= states_.size() || v >= header().n || !states_[r][v]) return nullptr;
  return &*states_[r][v];
}

bool TraceIndex::active(Round r, ValidatorIndex v) const {
  const auto* s = state(r, v);
  return s && s->status == ValidatorStatus::active;
}

std::size_t TraceIndex::active_count(Round r) const {
  std::size_t c = 0;
  for (ValidatorIndex v = 0; v < header().n; ++v) c += active(r, v);
  return c;
}

const TraceIndex::HonestProposal* TraceIndex::honest_proposal(Slot t) const {
  auto it = proposal_at_.find(t);
  return it == proposal_at_.end() ? nullptr : &proposals_[it->second];
}

std::vector<std::pair<Round, MessagePtr>> TraceIndex::observer_arrivals() const {
  std::vector<std::pair<Round, MessagePtr>> out;
  out.reserve(sends_.size());
  for (const auto& [r, m] : sends_) out.emplace_back(std::max(r, header().gst) + header().delta, m);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

Verdict check_safety(const TraceIndex& ix, ChainKind chain, Round after) {
  std::map<BlockId, std::pair<ValidatorIndex, Round>> witness;
  for (Round r = after; r < ix.total_rounds(); ++r) {
    for (ValidatorIndex v = 0; v < ix.header().n; ++v) {
      if (const auto* s = ix.state(r, v)) witness.emplace(chain_of(*s, chain), std::pair{v, r});
    }
  }
  std::vector<BlockId> blocks;
  for (const auto& [b, _] : witness) blocks.push_back(b);
  std::sort(blocks.begin(), blocks.end(), [&](const BlockId& a, const BlockId& b) {
    return std::pair{ix.global().height(a), a} < std::pair{ix.global().height(b), b};
  });
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      if (!ix.is_ancestor(blocks[i], blocks[j])) {
        auto [v1, r1] = witness.at(blocks[i]);
        auto [v2, r2] = witness.at(blocks[j]);
        return Verdict::fail("chain_" + std::string(to_string(chain)) + " conflict: " + at(v1, r1) + " has " +
                             short_id(blocks[i]) + ", " + at(v2, r2) + " has " + short_id(blocks[j]));
      }
    }
  }
  return Verdict::pass(std::to_string(blocks.size()) + " distinct chains comparable");
}

Verdict check_liveness(const TraceIndex& ix, ChainKind chain, Round after, Round conf) {
  // Latest proposal round of an honest block on each block's chain.
  std::unordered_map<BlockId, std::optional<Round>, DigestHash> best;
  std::set<BlockId> honest;
  for (const auto& p : ix.honest_proposals()) honest.insert(p.block);
  const Round L = ix.header().slot_length();
  std::function<std::optional<Round>(const BlockId&)> latest = [&](const BlockId& b) -> std::optional<Round> {
    if (auto it = best.find(b); it != best.end()) return it->second;
    const Block& blk = ix.global().block(b);
    std::optional<Round> res = blk.parent ? latest(*blk.parent) : std::nullopt;
    if (honest.contains(b)) res = std::max(res.value_or(0), blk.slot * L);
    best.emplace(b, res);
    return res;
  };
  std::size_t checked = 0;
  for (Round r = after + conf; r < ix.total_rounds(); ++r) {
    for (ValidatorIndex v = 0; v < ix.header().n; ++v) {
      if (!ix.active(r, v)) continue;
      ++checked;
      auto got = latest(chain_of(*ix.state(r, v), chain));
      if (!got || *got + conf <= r) {
        return Verdict::fail("chain_" + std::string(to_string(chain)) + " of " + at(v, r) +
                             " has no honest block proposed after round " + std::to_string(r - conf));
      }
    }
  }
  return Verdict::pass(std::to_string(checked) + " states checked");
}

Verdict check_reorg_resilience(const TraceIndex& ix) {
  const auto& h = ix.header();
  if (h.gst != 0) return Verdict::not_applicable("requires GST = 0");
  const Round L = h.slot_length();
  auto stays = [&](const BlockId& b, Round from, const std::string& what) -> std::optional<Verdict> {
    for (Round r = from; r < ix.total_rounds(); ++r) {
      for (ValidatorIndex v = 0; v < h.n; ++v) {
        if (!ix.active(r, v)) continue;
        if (!ix.is_ancestor(b, ix.state(r, v)->canonical)) {
          return Verdict::fail(what + " " + short_id(b) + " not canonical for " + at(v, r));
        }
      }
    }
    return std::nullopt;
  };
  for (const auto& p : ix.honest_proposals()) {
    if (auto v = stays(p.block, p.slot * L + h.delta, "honest proposal of slot " + std::to_string(p.slot))) {
      return *v;
    }
  }
  std::size_t fast = 0;
  for (const auto& [t, by] : ix.confirms()) {
    std::set<BlockId> seen;
    for (const auto& [_, c] : by) {
      if (!c.fast || !seen.insert(*c.fast).second) continue;
      ++fast;
      if (auto v = stays(*c.fast, (t + 1) * L + h.delta, "fast-confirmed block of slot " + std::to_string(t))) {
        return *v;
      }
    }
  }
  return Verdict::pass(std::to_string(ix.honest_proposals().size()) + " proposals, " + std::to_string(fast) +
                       " fast-confirmed blocks");
}

Verdict check_ssf(const TraceIndex& ix) {
  const auto& h = ix.header();
  const Round L = h.slot_length();
  const Round after = stable_after(h);

  std::vector<const TraceIndex::HonestProposal*> due;
  for (const auto& p : ix.honest_proposals()) {
    if (p.slot * L >= after && p.slot * L + 3 * h.delta < ix.total_rounds()) due.push_back(&p);
  }
  if (due.empty()) return Verdict::pass("no eligible slot");

  // First, the proposal's checkpoint must be the latest justified one in
  // every active view right after the slot's merge.
  for (const auto* p : due) {
    const Round m = p->slot * L + 3 * h.delta;
    const Checkpoint want{p->block, p->slot};
    for (ValidatorIndex v = 0; v < h.n; ++v) {
      if (ix.active(m, v) && ix.state(m, v)->justified != want) {
        return Verdict::fail("slot " + std::to_string(p->slot) + ": " + at(v, m) + " latest justified is " +
                             codec::to_text(ix.state(m, v)->justified));
      }
    }
  }

  // Observer replay: the proposal must be ack-finalized at the slot end and
  // not one round earlier.
  std::map<Round, std::vector<std::pair<const TraceIndex::HonestProposal*, bool>>> probes;
  for (const auto* p : due) {
    const Round end = (p->slot + 1) * L;
    probes[end - 1].emplace_back(p, false);
    probes[end].emplace_back(p, true);
  }
  const auto arrivals = ix.observer_arrivals();
  View obs = View::with_genesis();
  JustificationTracker tracker(h.n);
  std::size_t next = 0;
  for (const auto& [round, list] : probes) {
    while (next < arrivals.size() && arrivals[next].first <= round) obs.insert(arrivals[next++].second);
    const auto& js = tracker.update(obs);
    const auto fin = compute_finalized_with_acks(js, obs.acks(), h.n);
    for (const auto& [p, expect] : list) {
      const bool got = fin.contains(Checkpoint{p->block, p->slot});
      if (got != expect) {
        return Verdict::fail("slot " + std::to_string(p->slot) + ": observer " +
                             (expect ? "has not finalized the proposal by round " : "finalized the proposal early, round ") +
                             std::to_string(round));
      }
    }
  }
  return Verdict::pass(std::to_string(due.size()) + " proposals ack-finalized at slot end");
}

Verdict check_one_slot_lag(const TraceIndex& ix) {
  const auto& h = ix.header();
  const Round L = h.slot_length();
  const Round after = stable_after(h);
  std::size_t checked = 0;
  for (const auto& p : ix.honest_proposals()) {
    const Round merge_next = (p.slot + 1) * L + 3 * h.delta;
    if (p.slot * L < after || merge_next >= ix.total_rounds() || !ix.honest_proposal(p.slot + 1)) continue;
    ++checked;
    for (ValidatorIndex v = 0; v < h.n; ++v) {
      if (ix.active(merge_next, v) && !ix.is_ancestor(p.block, ix.state(merge_next, v)->finalized)) {
        return Verdict::fail("slot " + std::to_string(p.slot) + " block not finalized by " + at(v, merge_next));
      }
    }
  }
  return Verdict::pass(std::to_string(checked) + " slots checked");
}

Verdict check_fast_liveness(const TraceIndex& ix) {
  const auto& h = ix.header();
  const Round L = h.slot_length();
  std::size_t checked = 0;
  for (const auto& p : ix.honest_proposals()) {
    const Round start = p.slot * L;
    const Round conf = start + 2 * h.delta;
    // The previous merge round must already be synchronous.
    if (start < h.gst + h.delta || conf >= ix.total_rounds()) continue;
    if (ix.active_count(start + h.delta) < quorum(h.n)) continue;
    ++checked;
    auto it = ix.confirms().find(p.slot);
    for (ValidatorIndex v = 0; v < h.n; ++v) {
      if (!ix.active(conf, v)) continue;
      const ConfirmOutcome* c = nullptr;
      if (it != ix.confirms().end()) {
        if (auto jt = it->second.find(v); jt != it->second.end()) c = &jt->second;
      }
      if (!c || !c->fast || !ix.is_ancestor(p.block, *c->fast)) {
        return Verdict::fail("slot " + std::to_string(p.slot) + " proposal not fast-confirmed by " + at(v, conf));
      }
    }
  }
  return Verdict::pass(std::to_string(checked) + " slots checked");
}

Verdict check_prefix(const TraceIndex& ix) {
  std::size_t checked = 0;
  for (Round r = 0; r < ix.total_rounds(); ++r) {
    for (ValidatorIndex v = 0; v < ix.header().n; ++v) {
      const auto* s = ix.state(r, v);
      if (!s) continue;
      ++checked;
      if (!ix.is_ancestor(s->finalized, s->available)) return Verdict::fail("fin not a prefix of ava at " + at(v, r));
      if (!ix.is_ancestor(s->available, s->canonical)) {
        return Verdict::fail("ava not a prefix of canonical at " + at(v, r));
      }
    }
  }
  return Verdict::pass(std::to_string(checked) + " states checked");
}

Verdict check_accountability(const TraceIndex& ix, CulpritReport* report) {
  const auto n = ix.header().n;
  const auto js = compute_justification(ix.global(), n);
  const auto fin = compute_finalized_with_acks(js, ix.global().acks(), n);
  try {
    finalized_chain(ix.global(), fin);
    return Verdict::pass("no conflicting finalization");
  } catch (const ConflictingFinalization& e) {
    CulpritReport rep;
    try {
      rep = extract_culprits(e.first, e.second, ix.pool(), n);
    } catch (const InsufficientEvidence& ie) {
      return Verdict::fail(std::string("conflict without evidence: ") + ie.what());
    }
    if (report) *report = rep;
    for (const auto& [who, violation] : rep.culprits) {
      if (!ix.adversarial().contains(who)) return Verdict::fail("honest validator " + std::to_string(who) + " accused");
      if (!violation.verify()) return Verdict::fail("evidence against " + std::to_string(who) + " does not verify");
    }
    if (rep.culprits.size() < third(n)) {
      return Verdict::fail("only " + std::to_string(rep.culprits.size()) + " culprits");
    }
    return Verdict::pass(std::to_string(rep.culprits.size()) + " culprits via " + std::string(to_string(rep.route)));
  }
}

Verdict check_equivalence(const Scenario& sc) {
  if (sc.gst != 0) return Verdict::not_applicable("requires GST = 0");
  Scenario a = sc;
  a.tau = sc.eta;
  a.fc_mode = ForkChoiceMode::hfc;
  const Trace ta = run(a);
  if (auto rep = check_compliance(a, ta); !rep.compliant()) {
    return Verdict::not_applicable("scenario is not compliant with tau = eta");
  }
  Scenario b = a;
  b.fc_mode = ForkChoiceMode::rlmd;
  const Trace tb = run(b);
  const std::string xa = ta.text(false);
  const std::string xb = tb.text(false);
  if (xa == xb) return Verdict::pass("traces identical");
  std::istringstream sa(xa), sb(xb);
  std::string la, lb;
  for (std::size_t line = 1;; ++line) {
    const bool ga = static_cast<bool>(std::getline(sa, la));
    const bool gb = static_cast<bool>(std::getline(sb, lb));
    if (!ga || !gb || la != lb) {
      return Verdict::fail("first divergence at line " + std::to_string(line) + ": hfc '" + (ga ? la : "<end>") +
                           "' vs rlmd '" + (gb ? lb : "<end>") + "'");
    }
  }
}

Verdict check_determinism(const Scenario& sc) {
  if (run(sc).text() == run(sc).text()) return Verdict::pass("byte-identical");
  return Verdict::fail("traces differ between runs");
}

const std::vector<std::string>& trace_property_names() {
  static const std::vector<std::string> names{"safety-fin", "safety-ava",   "liveness-fin",  "liveness-ava",
                                              "reorg",      "ssf",          "one-slot-lag",  "fast-liveness",
                                              "prefix",     "accountability"};
  return names;
}

Verdict run_check(const std::string& name, const TraceIndex& ix) {
  const auto& h = ix.header();
  const Round conf = h.slot_length() * (h.kappa + 2);
  if (name == "safety-fin") return check_safety(ix, ChainKind::finalized);
  if (name == "safety-ava") return check_safety(ix, ChainKind::available, stable_after(h));
  if (name == "liveness-fin") return check_liveness(ix, ChainKind::finalized, stable_after(h), conf);
  if (name == "liveness-ava") return check_liveness(ix, ChainKind::available, stable_after(h), conf);
  if (name == "reorg") return check_reorg_resilience(ix);
  if (name == "ssf") return check_ssf(ix);
  if (name == "one-slot-lag") return check_one_slot_lag(ix);
  if (name == "fast-liveness") return check_fast_liveness(ix);
  if (name == "prefix") return check_prefix(ix);
  if (name == "accountability") return check_accountability(ix);
  throw std::invalid_argument("unknown property '" + name + "'");
}

}  // namespace ssf
