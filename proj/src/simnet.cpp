// SPDX-License-Identifier: Apache-2.0
#include "ssf/simnet.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ssf/slasher.hpp"

namespace ssf {

World::World(Scenario sc) : World(sc, make_adversary(sc)) {}

World::World(Scenario sc, std::unique_ptr<Adversary> adversary)
    : sc_(std::move(sc)), adversary_(std::move(adversary)) {
  if (auto problems = sc_.validate(); !problems.empty()) throw ScenarioError(problems);
  trace_.header = TraceHeader::from(sc_);
  queued_.resize(sc_.n);
  validators_.reserve(sc_.n);
  for (ValidatorIndex v = 0; v < sc_.n; ++v) validators_.emplace_back(v, sc_.params_for(v));
}

void World::record_send(Round r, Actor actor, const MessagePtr& m) {
  TraceRecord rec;
  rec.round = r;
  rec.actor = actor;
  rec.kind = RecordKind::send;
  rec.message = m;
  trace_.records.push_back(std::move(rec));
}

void World::schedule(const MessagePtr& m, ValidatorIndex recipient, Round at) {
  auto& slots = earliest_[m->id()];
  if (slots.empty()) slots.assign(sc_.n, std::numeric_limits<Round>::max());
  if (slots[recipient] <= at) return;
  slots[recipient] = at;
  in_flight_[at].emplace_back(recipient, m);
}

void World::broadcast_honest(ValidatorIndex sender, const MessagePtr& m, Round r) {
  const Round latest = std::max(r, sc_.gst) + sc_.delta;
  for (ValidatorIndex u = 0; u < sc_.n; ++u) {
    if (u == sender || corrupted_.contains(u)) continue;
    Round at = adversary_->honest_delivery(m, sender, u, r);
    schedule(m, u, std::clamp(at, r + 1, latest));
  }
}

void World::receive(ValidatorIndex v, const MessagePtr& m, Round r) {
  auto res = validators_[v].on_receive(m, r);
  if (res.note) {
    TraceRecord rec;
    rec.round = r;
    rec.actor = Actor{Actor::Kind::honest, v};
    rec.kind = RecordKind::note;
    rec.text = *res.note;
    trace_.records.push_back(std::move(rec));
  }
  for (const auto& x : res.regossip) broadcast_honest(v, x, r);
}

void World::check_unforged(const MessagePtr& m, Round r) const {
  if (!sc_.adversarial(m->author(), r)) {
    throw std::logic_error("adversary sent a message authored by honest validator " +
                           std::to_string(m->author()));
  }
  std::vector<MessagePtr> parts;
  append_atomic(m, parts);
  for (const auto& p : parts) {
    if (p->get_if<Block>() && p->get_if<Block>()->id == genesis_id()) continue;
    if (!sc_.adversarial(p->author(), r) && !honest_sent_.contains(p->id())) {
      throw std::logic_error("adversary embedded a forged message of validator " +
                             std::to_string(p->author()));
    }
  }
}

void World::step() {
  if (done()) return;
  const Round r = round_;
  auto event = [&](const std::string& text) {
    TraceRecord rec;
    rec.round = r;
    rec.kind = RecordKind::event;
    rec.text = text;
    trace_.records.push_back(std::move(rec));
  };

  // 1. Deliveries.
  if (auto it = in_flight_.find(r); it != in_flight_.end()) {
    auto due = std::move(it->second);
    in_flight_.erase(it);
    for (const auto& [u, m] : due) {
      if (corrupted_.contains(u)) continue;
      if (validators_[u].status() == ValidatorStatus::asleep) {
        queued_[u].push_back(m);
      } else {
        receive(u, m, r);
      }
    }
  }

  // 2. Corruption, sleep and wake transitions.
  for (ValidatorIndex v = 0; v < sc_.n; ++v) {
    if (corrupted_.contains(v)) continue;
    if (sc_.adversarial(v, r)) {
      corrupted_.insert(v);
      queued_[v].clear();
      adversary_->corrupt(v, validators_[v], r);
      event("corrupt v=" + std::to_string(v));
      continue;
    }
    auto& val = validators_[v];
    const bool awake = sc_.awake(v, r);
    if (!awake && val.status() != ValidatorStatus::asleep) {
      val.sleep();
      event("sleep v=" + std::to_string(v));
    } else if (awake && val.status() == ValidatorStatus::asleep) {
      val.wake();
      event("wake v=" + std::to_string(v));
      auto q = std::move(queued_[v]);
      queued_[v].clear();
      for (const auto& m : q) receive(v, m, r);
    }
  }

  // 3. Honest validators act.
  for (ValidatorIndex v = 0; v < sc_.n; ++v) {
    if (corrupted_.contains(v)) continue;
    auto out = validators_[v].on_round(r);
    const Actor actor{Actor::Kind::honest, v};
    for (const auto& m : out.emitted) {
      std::vector<MessagePtr> parts;
      append_atomic(m, parts);
      for (const auto& p : parts) honest_sent_.insert(p->id());
      honest_sent_.insert(m->id());
      record_send(r, actor, m);
      adversary_->observe(m, v, r);
      broadcast_honest(v, m, r);
    }
    if (out.confirm) {
      TraceRecord rec;
      rec.round = r;
      rec.actor = actor;
      rec.kind = RecordKind::confirm;
      rec.confirm = *out.confirm;
      trace_.records.push_back(std::move(rec));
    }
  }

  // 4. Adversary acts after observing this round's honest messages.
  for (auto& send : adversary_->act(r)) {
    check_unforged(send.message, r);
    record_send(r, Actor{Actor::Kind::adversary, send.message->author()}, send.message);
    for (const auto& d : send.deliveries) {
      if (d.recipient >= sc_.n || corrupted_.contains(d.recipient)) continue;
      schedule(send.message, d.recipient, std::max(d.round, r + 1));
    }
  }

  // 5. Per-validator state.
  for (ValidatorIndex v = 0; v < sc_.n; ++v) {
    if (corrupted_.contains(v)) continue;
    const auto& val = validators_[v];
    TraceRecord rec;
    rec.round = r;
    rec.actor = Actor{Actor::Kind::honest, v};
    rec.kind = RecordKind::state;
    rec.state = StateSnapshot{val.status(), val.canonical(), val.available(), val.finalized(),
                              val.latest_justified()};
    trace_.records.push_back(std::move(rec));
  }

  ++round_;
}

void World::run() {
  while (!done()) step();
}

Trace run(const Scenario& sc) {
  World w(sc);
  w.run();
  return w.take_trace();
}

namespace {

std::set<ValidatorIndex> active_at(const Scenario& sc, Round r) {
  std::set<ValidatorIndex> out;
  for (ValidatorIndex v = 0; v < sc.n; ++v) {
    if (sc.active(v, r)) out.insert(v);
  }
  return out;
}

}  // namespace

bool check_tau_sleepiness(const Scenario& sc, Slot t) {
  const Round L = sc.slot_length();
  auto h = [&](std::int64_t s) {
    return s < 0 ? std::set<ValidatorIndex>{} : active_at(sc, static_cast<Round>(s) * L + sc.delta);
  };
  const auto prev = h(static_cast<std::int64_t>(t) - 1);
  std::set<ValidatorIndex> rhs;
  const Round probe = t * L + sc.delta;
  for (ValidatorIndex v = 0; v < sc.n; ++v) {
    if (sc.adversarial(v, probe)) rhs.insert(v);
  }
  const std::int64_t lo = sc.tau ? static_cast<std::int64_t>(t) - static_cast<std::int64_t>(*sc.tau) : 0;
  for (std::int64_t s = std::max<std::int64_t>(lo, 0); s <= static_cast<std::int64_t>(t) - 2; ++s) {
    for (auto v : h(s)) {
      if (!prev.contains(v)) rhs.insert(v);
    }
  }
  return prev.size() > rhs.size();
}

ComplianceReport check_compliance(const Scenario& sc, const Trace& trace) {
  ComplianceReport rep;
  for (Slot t = 1; t < sc.horizon; ++t) {
    if (t * sc.slot_length() < sc.gst) continue;
    if (!check_tau_sleepiness(sc, t)) rep.failing_slots.push_back(t);
  }
  std::vector<MessagePtr> pool;
  for (const auto& rec : trace.records) {
    if (rec.kind == RecordKind::send && rec.actor.kind == Actor::Kind::adversary) pool.push_back(rec.message);
  }
  std::set<ValidatorIndex> eq;
  for (const auto& v : scan(pool)) {
    if (v.kind == ViolationKind::head_equivocation) eq.insert(v.offender);
  }
  rep.head_equivocators.assign(eq.begin(), eq.end());
  rep.head_equivocation_ok = eq.size() < third(sc.n);
  return rep;
}

ComplianceReport check_compliance(const Scenario& sc) { return check_compliance(sc, run(sc)); }

}  // namespace ssf
