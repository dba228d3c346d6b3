// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "ssf/mix.hpp"
#include "ssf/simnet.hpp"

namespace ssf {
namespace {

std::uint64_t id_word(const MessageId& id) {
  std::uint64_t w = 0;
  for (int i = 0; i < 8; ++i) w = (w << 8) | id.bytes[i];
  return w;
}

/// A set of corrupted validators sharing one strategy: each runs a copy of the
/// honest state machine whose output is rewritten before it is sent.
struct Faction {
  std::string tag;
  /// Honest validators this faction talks to and listens to; empty means all.
  std::set<ValidatorIndex> audience;
  /// Inclusive slot range in which puppets act; an empty range means always.
  std::pair<Slot, Slot> window{1, 0};
  std::map<ValidatorIndex, ValidatorState> puppets;
  std::vector<MessagePtr> inbox;

  bool hears(ValidatorIndex v) const { return audience.empty() || audience.contains(v); }
  bool acting(Slot t) const { return window.first > window.second || (t >= window.first && t <= window.second); }
};

class PuppetAdversary final : public Adversary {
 public:
  explicit PuppetAdversary(const Scenario& sc) : sc_(sc), strategy_(sc.adversary.strategy) {
    groups_ = sc.adversary.groups;
    if (groups_.empty() && strategy_ == "partitioner") {
      groups_.resize(2);
      for (ValidatorIndex v = 0; v < sc.n; ++v) groups_[v < sc.n / 2 ? 0 : 1].push_back(v);
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      for (auto v : groups_[g]) class_of_[v] = g;
    }
    if (strategy_ == "double-finalizer") {
      factions_.resize(2);
      factions_[0].tag = "A";
      factions_[0].audience = {groups_[0].begin(), groups_[0].end()};
      factions_[0].window = sc.adversary.window_a;
      factions_[1].tag = "B";
      factions_[1].audience = {groups_[1].begin(), groups_[1].end()};
      factions_[1].window = sc.adversary.window_b;
    } else {
      factions_.resize(1);
    }
  }

  void corrupt(ValidatorIndex v, const ValidatorState& state, Round) override {
    for (auto& f : factions_) {
      auto [it, _] = f.puppets.emplace(v, state);
      if (!f.tag.empty()) it->second.mutable_params().body_tag = f.tag;
      if (it->second.status() != ValidatorStatus::active) it->second.wake();
    }
  }

  void observe(const MessagePtr& m, ValidatorIndex sender, Round) override {
    for (auto& f : factions_) {
      if (f.hears(sender)) f.inbox.push_back(m);
    }
  }

  Round honest_delivery(const MessagePtr& m, ValidatorIndex sender, ValidatorIndex recipient,
                        Round sent) override {
    const Round latest = std::max(sent, sc_.gst) + sc_.delta;
    if (sent < sc_.gst && !class_of_.empty() && crosses(sender, recipient)) return latest;
    const std::uint64_t h = mix64({sc_.seed, id_word(m->id()), recipient, sent});
    if (sent < sc_.gst && class_of_.empty()) return sent + 1 + h % (latest - sent);
    return sent + 1 + h % sc_.delta;
  }

  std::vector<AdversarySend> act(Round r) override {
    std::vector<AdversarySend> out;
    const Slot t = sc_.params_for(0).slot_of(r);
    for (auto& f : factions_) {
      auto inbox = std::move(f.inbox);
      f.inbox.clear();
      for (auto& [v, p] : f.puppets) {
        for (const auto& m : inbox) {
          if (m->author() != v || !m->is_atomic()) p.on_receive(m, r);
          else p.deliver_own(m);
        }
      }
      if (!f.acting(t)) continue;
      for (auto& [v, p] : f.puppets) {
        auto ro = p.on_round(r);
        auto msgs = rewrite(f, v, p, ro, t);
        for (const auto& m : msgs) {
          p.deliver_own(m);
          f.inbox.push_back(m);
          out.push_back(AdversarySend{m, deliveries(f, v, r)});
        }
      }
    }
    return out;
  }

 private:
  bool crosses(ValidatorIndex a, ValidatorIndex b) const {
    auto ia = class_of_.find(a);
    auto ib = class_of_.find(b);
    if (ia == class_of_.end() || ib == class_of_.end()) return false;
    return ia->second != ib->second;
  }

  std::vector<Delivery> deliveries(const Faction& f, ValidatorIndex author, Round r) const {
    std::vector<Delivery> d;
    for (ValidatorIndex u = 0; u < sc_.n; ++u) {
      if (u == author || sc_.adversarial(u, r) || !f.hears(u)) continue;
      Round at = r + 1;
      if (strategy_ == "partitioner" && r < sc_.gst && crosses(author, u)) at = sc_.gst + sc_.delta;
      d.push_back(Delivery{u, at});
    }
    return d;
  }

  std::vector<MessagePtr> rewrite(const Faction& f, ValidatorIndex v, const ValidatorState& p,
                                  const RoundOutput& ro, Slot t) {
    (void)f;
    std::vector<MessagePtr> out;
    const bool deviate = t >= sc_.adversary.start_slot;
    for (const auto& m : ro.emitted) {
      if (!deviate) {
        out.push_back(m);
        continue;
      }
      if (strategy_ == "silent-proposer" && m->kind() == MessageKind::proposal) continue;

      if (const auto* hv = m->get_if<HeadVote>(); hv && strategy_ == "head-equivocator") {
        out.push_back(m);
        BlockId other;
        if (const auto& b = p.view().block(hv->block); b.parent) {
          other = *b.parent;
        } else {
          Block minted = make_block(genesis_id(), hv->slot, v, "equivocation");
          out.push_back(make_block_message(minted));
          other = minted.id;
        }
        out.push_back(make_head_vote(other, hv->slot, v));
        continue;
      }

      if (const auto* fv = m->get_if<FfgVote>()) {
        if (strategy_ == "ffg-equivocator") {
          out.push_back(m);
          Block minted = make_block(fv->source.block, t, v, "equivocation");
          out.push_back(make_block_message(minted));
          out.push_back(make_ffg_vote(fv->source, Checkpoint{minted.id, t}, v));
          continue;
        }
        if (strategy_ == "surround-voter" && t == std::max<Slot>(sc_.adversary.start_slot, 2) &&
            !surrounded_.contains(v)) {
          surrounded_.insert(v);
          out.push_back(m);
          out.push_back(make_ffg_vote(Checkpoint{genesis_id(), 0}, Checkpoint{p.canonical(), t + 2}, v));
          continue;
        }
        if (strategy_ == "ack-surrounder") {
          if (auto it = acked_.find(v); it != acked_.end() && it->second < t && it->second > 0) {
            out.push_back(make_ffg_vote(Checkpoint{genesis_id(), 0}, fv->target, v));
            continue;
          }
        }
      }

      if (const auto* ack = m->get_if<Acknowledgment>(); ack && strategy_ == "ack-surrounder") {
        acked_.emplace(v, ack->slot);
      }
      out.push_back(m);
    }
    return out;
  }

  Scenario sc_;
  std::string strategy_;
  std::vector<std::vector<ValidatorIndex>> groups_;
  std::map<ValidatorIndex, std::size_t> class_of_;
  std::vector<Faction> factions_;
  std::set<ValidatorIndex> surrounded_;
  std::map<ValidatorIndex, Slot> acked_;
};

}  // namespace

std::unique_ptr<Adversary> make_adversary(const Scenario& sc) { return std::make_unique<PuppetAdversary>(sc); }

}  // namespace ssf
