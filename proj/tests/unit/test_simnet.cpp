// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <limits>

#include "ssf/codec.hpp"
#include "ssf/simnet.hpp"
#include "ssf/slasher.hpp"

namespace ssf {
namespace {

Scenario base(std::uint32_t n = 4, Slot horizon = 6) {
  Scenario sc;
  sc.n = n;
  sc.horizon = horizon;
  return sc;
}

/// Delays every honest message as long as allowed and sends nothing.
class Stall : public Adversary {
 public:
  void corrupt(ValidatorIndex, const ValidatorState&, Round) override {}
  void observe(const MessagePtr&, ValidatorIndex, Round) override {}
  Round honest_delivery(const MessagePtr&, ValidatorIndex, ValidatorIndex, Round) override {
    return std::numeric_limits<Round>::max();
  }
  std::vector<AdversarySend> act(Round) override { return {}; }
};

/// Resends the first honest head vote it observes; the world must reject a
/// message authored by an honest validator.
class Forger : public Stall {
 public:
  void observe(const MessagePtr& m, ValidatorIndex, Round) override {
    if (!seen && m->kind() == MessageKind::head_vote) seen = m;
  }
  std::vector<AdversarySend> act(Round) override {
    if (!seen) return {};
    return {AdversarySend{seen, {}}};
  }
  MessagePtr seen;
};

TEST(Simnet, DeterministicTraces) {
  auto sc = base(5, 8);
  sc.seed = 11;
  sc.delta = 2;
  sc.proposer_kind = ProposerSchedule::Kind::seeded;
  EXPECT_EQ(run(sc).text(), run(sc).text());
  auto other = sc;
  other.seed = 12;
  EXPECT_NE(run(sc).text(), run(other).text());
}

TEST(Simnet, LoneValidatorSlotEmissions) {
  auto sc = base(1, 2);
  auto tr = run(sc);
  std::vector<std::pair<Round, MessageKind>> sends;
  for (const auto& r : tr.records) {
    if (r.kind == RecordKind::send) sends.emplace_back(r.round, r.message->kind());
  }
  std::vector<std::pair<Round, MessageKind>> want{{4, MessageKind::proposal},
                                                  {5, MessageKind::head_vote},
                                                  {6, MessageKind::ffg_vote},
                                                  {7, MessageKind::ack}};
  EXPECT_EQ(sends, want);
}

TEST(Simnet, PreGstDeliveryAtGstPlusDelta) {
  auto sc = base(2, 4);
  sc.gst = 10;
  World w(sc, std::make_unique<Stall>());
  // Validator 1 proposes at round 4; validator 0 gets it exactly at 11.
  MessagePtr proposal;
  while (w.round() <= 10) {
    w.step();
    for (const auto& r : w.trace().records) {
      if (!proposal && r.kind == RecordKind::send && r.message->kind() == MessageKind::proposal) {
        proposal = r.message;
      }
    }
    if (proposal) {
      const auto& v0 = w.validators()[0];
      const auto id = proposal->get_if<Proposal>()->block.id;
      EXPECT_FALSE(v0.view().has_block(id) || v0.buffer().has_block(id)) << w.round();
    }
  }
  ASSERT_TRUE(proposal);
  w.step();
  const auto& v0 = w.validators()[0];
  const auto id = proposal->get_if<Proposal>()->block.id;
  EXPECT_TRUE(v0.view().has_block(id) || v0.buffer().has_block(id));
}

TEST(Simnet, PostGstDelayWithinDelta) {
  auto sc = base(4, 4);
  sc.delta = 3;
  sc.seed = 5;
  World w(sc);
  // A head vote sent at 4*3*1 + 3 = 15 is known to everybody by 18.
  while (w.round() <= 18) w.step();
  for (const auto& r : w.trace().records) {
    if (r.kind != RecordKind::send || r.message->kind() != MessageKind::head_vote || r.round != 15) continue;
    for (const auto& v : w.validators()) EXPECT_TRUE(v.view().contains(r.message->id()) || v.buffer().contains(r.message->id()));
  }
}

TEST(Simnet, RejectsForgery) {
  auto sc = base(4, 3);
  sc.corruption = {{3, 0}};
  World w(sc, std::make_unique<Forger>());
  EXPECT_THROW(w.run(), std::logic_error);
}

TEST(Simnet, AsleepValidatorCatchesUpOnWake) {
  auto sc = base(4, 6);
  sc.sleep = {{2, 0, 10}};
  sc.gat = 10;
  World w(sc);
  while (w.round() < 10) w.step();
  EXPECT_EQ(w.validators()[2].view().size(), 1u);  // genesis only
  w.step();
  EXPECT_EQ(w.validators()[2].status(), ValidatorStatus::joining);
  while (w.round() < 12) w.step();  // round 11 is a merge round
  EXPECT_EQ(w.validators()[2].status(), ValidatorStatus::active);
  EXPECT_EQ(w.validators()[2].canonical(), w.validators()[0].canonical());
}

TEST(Simnet, InvalidScenarioRejected) {
  auto sc = base(4, 4);
  sc.sleep = {{1, 0, 8}};  // GAT = 0
  sc.corruption = {{9, 0}};
  try {
    World w(sc);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.problems.size(), 2u);
  }
}

TEST(Simnet, StrategiesProduceTheirViolations) {
  struct Case {
    std::string strategy;
    ViolationKind kind;
  };
  for (const auto& c : {Case{"head-equivocator", ViolationKind::head_equivocation},
                        Case{"ffg-equivocator", ViolationKind::e1}, Case{"surround-voter", ViolationKind::e2},
                        Case{"ack-surrounder", ViolationKind::e3}}) {
    auto sc = base(7, 8);
    sc.corruption = {{5, 0}, {6, 0}};
    sc.adversary.strategy = c.strategy;
    auto tr = run(sc);
    std::vector<MessagePtr> pool;
    for (const auto& r : tr.records) {
      if (r.kind == RecordKind::send) pool.push_back(r.message);
    }
    std::set<ValidatorIndex> offenders;
    for (const auto& v : scan(pool)) {
      EXPECT_TRUE(v.verify());
      if (v.kind == c.kind) offenders.insert(v.offender);
      EXPECT_GE(v.offender, 5u) << c.strategy << " accused an honest validator";
    }
    EXPECT_EQ(offenders, (std::set<ValidatorIndex>{5, 6})) << c.strategy;
  }
}

TEST(Simnet, SilentProposerSkipsSlots) {
  auto sc = base(4, 6);
  sc.corruption = {{1, 0}};
  sc.adversary.strategy = "silent-proposer";
  auto tr = run(sc);
  for (const auto& r : tr.records) {
    if (r.kind == RecordKind::send && r.actor.kind == Actor::Kind::adversary) {
      EXPECT_NE(r.message->kind(), MessageKind::proposal);
    }
  }
}

TEST(TauSleepiness, AllHonestAlwaysActive) {
  auto sc = base(4, 10);
  for (Slot t = 1; t < 10; ++t) EXPECT_TRUE(check_tau_sleepiness(sc, t));
}

TEST(TauSleepiness, SetArithmeticExample) {
  // n = 10, tau = 3, t = 5: six active in slot 4 (one of them corrupted at
  // slot 5), adversary {7, 8, 9} at slot 5, and validators 5 and 6 active in
  // slots 2-3 but asleep in slot 4.
  auto sc = base(10, 8);
  sc.tau = 3;
  const Round L = sc.slot_length();
  sc.corruption = {{7, 0}, {8, 0}, {9, 5 * L}};
  sc.sleep = {{5, 4 * L, 6 * L}, {6, 4 * L, 6 * L}};
  sc.gat = 6 * L;
  ASSERT_TRUE(sc.validate().empty());
  EXPECT_TRUE(check_tau_sleepiness(sc, 5));  // 6 > |{7,8,9} u {5,6}| = 5
  sc.corruption.push_back({3, 5 * L});
  EXPECT_FALSE(check_tau_sleepiness(sc, 5));  // 6 > 6 fails
}

TEST(TauSleepiness, StrictBoundary) {
  auto sc = base(6, 4);
  sc.corruption = {{3, 0}, {4, 0}, {5, 0}};
  EXPECT_FALSE(check_tau_sleepiness(sc, 2));  // 3 > 3 fails
}

TEST(Compliance, FlagsMassSleep) {
  auto sc = base(6, 8);
  const Round L = sc.slot_length();
  sc.sleep = {{0, 3 * L, 5 * L}, {1, 3 * L, 5 * L}, {2, 3 * L, 5 * L}, {3, 3 * L, 5 * L}};
  sc.gat = 5 * L;
  auto rep = check_compliance(sc);
  EXPECT_FALSE(rep.compliant());
  EXPECT_NE(std::find(rep.failing_slots.begin(), rep.failing_slots.end(), 4u), rep.failing_slots.end());
}

TEST(Compliance, HeadEquivocatorThreshold) {
  auto sc = base(7, 6);
  sc.adversary.strategy = "head-equivocator";
  sc.corruption = {{6, 0}};
  EXPECT_TRUE(check_compliance(sc).compliant());
  sc.corruption = {{4, 0}, {5, 0}, {6, 0}};
  auto rep = check_compliance(sc);
  EXPECT_FALSE(rep.head_equivocation_ok);
  EXPECT_EQ(rep.head_equivocators.size(), 3u);
}

TEST(ScenarioYaml, RoundTrip) {
  Scenario sc = base(7, 12);
  sc.name = "round-trip";
  sc.delta = 2;
  sc.gst = 8;
  sc.gat = 16;
  sc.eta = 3;
  sc.seed = 99;
  sc.fc_mode = ForkChoiceMode::rlmd;
  sc.proposer_kind = ProposerSchedule::Kind::list;
  sc.proposer_list = {1, 2, 3};
  sc.sleep = {{2, 0, 16}};
  sc.corruption = {{6, 4}};
  sc.adversary.strategy = "partitioner";
  sc.adversary.groups = {{0, 1, 2}, {3, 4, 5}};
  auto back = parse_scenario(to_yaml(sc));
  EXPECT_EQ(to_yaml(back), to_yaml(sc));
  EXPECT_EQ(back.eta, std::optional<Slot>{3});
  EXPECT_EQ(back.tau, std::nullopt);
  EXPECT_EQ(back.sleep.size(), 1u);
  EXPECT_EQ(back.adversary.groups.size(), 2u);
}

TEST(ScenarioYaml, RejectsUnknownKeys) {
  EXPECT_THROW(parse_scenario("n: 4\nbogus: 1\n"), ScenarioError);
  EXPECT_THROW(parse_scenario("n: [1\n"), ScenarioError);
}

TEST(TraceText, RoundTrip) {
  auto sc = base(4, 5);
  sc.corruption = {{3, 0}};
  sc.adversary.strategy = "ffg-equivocator";
  auto tr = run(sc);
  auto text = tr.text();
  auto back = Trace::parse(text);
  EXPECT_EQ(back.text(), text);
  EXPECT_EQ(back.records.size(), tr.records.size());
}

TEST(TraceText, RejectsGarbage) {
  EXPECT_THROW(Trace::parse("hello\n"), codec::DecodeError);
  EXPECT_THROW(Trace::parse("0 v0 state status=active\n"), codec::DecodeError);
}

}  // namespace
}  // namespace ssf
