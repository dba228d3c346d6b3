// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ssf/slasher.hpp"
#include "oracles/oracles.hpp"

namespace ssf {
namespace {

using namespace ssf::testing;

FfgVote vote(Slot s, Slot t, ValidatorIndex who = 0, std::uint8_t tag = 0) {
  BlockId b{};
  b.bytes[0] = tag;
  return FfgVote{{genesis_id(), s}, {b, t}, who};
}

TEST(Predicates, Examples) {
  auto a = vote(1, 5, 0, 1);
  EXPECT_FALSE(check_e1(a, a));
  EXPECT_TRUE(check_e1(vote(1, 5, 0, 1), vote(2, 5, 0, 2)));
  EXPECT_FALSE(check_e1(vote(1, 4), vote(1, 5)));
  EXPECT_TRUE(check_e2(vote(1, 4), vote(2, 3)));
  EXPECT_FALSE(check_e2(vote(1, 2), vote(2, 3)));
  EXPECT_FALSE(check_e2(vote(1, 3), vote(1, 4)));
  Acknowledgment ack{{genesis_id(), 4}, 4, 0};
  EXPECT_TRUE(check_e3(vote(2, 6), ack));
  EXPECT_FALSE(check_e3(vote(4, 5), ack));
  EXPECT_FALSE(check_e3(vote(2, 6), Acknowledgment{{genesis_id(), 6}, 6, 0}));
  EXPECT_FALSE(check_e1(vote(1, 5, 0, 1), vote(2, 5, 1, 2)));  // different voters
}

TEST(Predicates, MatchEnumerationOracle) {
  // Every slot quadruple up to 6, with two target blocks, as an oracle over
  // interval containment.
  int checked = 0;
  for (Slot s1 = 0; s1 <= 6; ++s1)
    for (Slot t1 = 0; t1 <= 6; ++t1)
      for (Slot s2 = 0; s2 <= 6; ++s2)
        for (Slot t2 = 0; t2 <= 6; ++t2)
          for (std::uint8_t tag = 0; tag < 2; ++tag) {
            auto a = vote(s1, t1, 3, 0);
            auto b = vote(s2, t2, 3, tag);
            bool distinct = !(s1 == s2 && t1 == t2 && tag == 0);
            bool e1 = distinct && t1 == t2;
            auto strictly_inside = [](Slot is, Slot it, Slot os, Slot ot) {
              // (is, it) lies in the open interval (os, ot) and is non-empty.
              return os < is && is < it && it < ot;
            };
            bool e2 = distinct && (strictly_inside(s2, t2, s1, t1) || strictly_inside(s1, t1, s2, t2));
            ASSERT_EQ(check_e1(a, b), e1);
            ASSERT_EQ(check_e2(a, b), e2);
            ++checked;
          }
  for (Slot s = 0; s <= 6; ++s)
    for (Slot t = 0; t <= 6; ++t)
      for (Slot k = 0; k <= 6; ++k) {
        bool inside = false;
        for (Slot x = s + 1; x < t; ++x) inside |= (x == k);
        ASSERT_EQ(check_e3(vote(s, t, 2), Acknowledgment{{genesis_id(), k}, k, 2}), inside);
        ++checked;
      }
  EXPECT_GE(checked, 1000);
}

TEST(Scan, MatchesAllPairsOracle) {
  std::mt19937_64 rng(1);
  for (int iter = 0; iter < 1000; ++iter) {
    auto pool = random_pool(rng, iter < 50 ? 500 : 1 + iter % 60);
    auto got = scan(pool);
    std::set<std::tuple<ViolationKind, ValidatorIndex, MessageId, MessageId>> as_set;
    for (const auto& v : got) {
      ASSERT_TRUE(v.verify());
      as_set.emplace(v.kind, v.offender, v.first->id(), v.second->id());
    }
    ASSERT_EQ(as_set.size(), got.size());
    ASSERT_EQ(as_set, oracle_scan(pool));
  }
}

TEST(Scan, HonestPoolIsClean) {
  std::vector<MessagePtr> pool;
  for (Slot t = 1; t < 6; ++t) {
    for (ValidatorIndex i = 0; i < 4; ++i) {
      pool.push_back(make_head_vote(genesis_id(), t, i));
      pool.push_back(make_ffg_vote({genesis_id(), t - 1}, {genesis_id(), t}, i));
      pool.push_back(make_ack({genesis_id(), t}, t, i));
    }
  }
  EXPECT_TRUE(scan(pool).empty());
}

TEST(Scan, InjectedEquivocationGivesOneE1) {
  auto a = make_block(genesis_id(), 2, 0);
  auto b = make_block(genesis_id(), 2, 1);
  std::vector<MessagePtr> pool{make_ffg_vote(genesis_checkpoint(), {a.id, 2}, 5),
                               make_ffg_vote(genesis_checkpoint(), {b.id, 2}, 5)};
  auto v = scan(pool);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::e1);
  EXPECT_EQ(v[0].offender, 5u);
}

// ---- forensic fixtures, n = 9 with adversarial {6,7,8} ----

constexpr std::uint32_t kN = 9;
const std::vector<ValidatorIndex> kSideA{0, 1, 2, 6, 7, 8};
const std::vector<ValidatorIndex> kSideB{3, 4, 5, 6, 7, 8};

void link(std::vector<MessagePtr>& pool, Checkpoint s, Checkpoint t,
          const std::vector<ValidatorIndex>& who) {
  for (auto i : who) pool.push_back(make_ffg_vote(s, t, i));
}

void expect_only_adversarial(const CulpritReport& r) {
  EXPECT_GE(r.culprits.size(), third(kN));
  for (const auto& [who, v] : r.culprits) {
    EXPECT_GE(who, 6u);
    EXPECT_EQ(v.offender, who);
    EXPECT_TRUE(v.verify());
  }
}

TEST(Forensics, E1Route) {
  auto a = make_block(genesis_id(), 1, 0, "a");
  auto b = make_block(genesis_id(), 1, 1, "b");
  auto a2 = make_block(a.id, 2, 0, "a");
  auto b2 = make_block(b.id, 2, 1, "b");
  std::vector<MessagePtr> pool;
  for (const auto& x : {a, b, a2, b2}) pool.push_back(make_block_message(x));
  link(pool, genesis_checkpoint(), {a.id, 1}, kSideA);
  link(pool, {a.id, 1}, {a2.id, 2}, kSideA);
  link(pool, genesis_checkpoint(), {b.id, 1}, kSideB);
  link(pool, {b.id, 1}, {b2.id, 2}, kSideB);
  auto r = extract_culprits({a.id, 1}, {b.id, 1}, pool, kN);
  EXPECT_EQ(r.route, CulpritRoute::e1);
  expect_only_adversarial(r);
}

TEST(Forensics, E2Route) {
  auto a1 = make_block(genesis_id(), 1, 0, "a");
  auto a2 = make_block(a1.id, 2, 0, "a");
  auto b3 = make_block(genesis_id(), 3, 1, "b");
  auto b4 = make_block(b3.id, 4, 1, "b");
  std::vector<MessagePtr> pool;
  for (const auto& x : {a1, a2, b3, b4}) pool.push_back(make_block_message(x));
  link(pool, genesis_checkpoint(), {a1.id, 1}, kSideA);
  link(pool, {a1.id, 1}, {a2.id, 2}, kSideA);
  link(pool, genesis_checkpoint(), {b3.id, 3}, kSideB);
  link(pool, {b3.id, 3}, {b4.id, 4}, kSideB);
  auto r = extract_culprits({a1.id, 1}, {b3.id, 3}, pool, kN);
  EXPECT_EQ(r.route, CulpritRoute::e2);
  expect_only_adversarial(r);
}

TEST(Forensics, E3Route) {
  auto a1 = make_block(genesis_id(), 1, 0, "a");
  auto b3 = make_block(genesis_id(), 3, 1, "b");
  auto b4 = make_block(b3.id, 4, 1, "b");
  std::vector<MessagePtr> pool;
  for (const auto& x : {a1, b3, b4}) pool.push_back(make_block_message(x));
  link(pool, genesis_checkpoint(), {a1.id, 1}, kSideA);
  for (auto i : kSideA) pool.push_back(make_ack({a1.id, 1}, 1, i));
  link(pool, genesis_checkpoint(), {b3.id, 3}, kSideB);
  link(pool, {b3.id, 3}, {b4.id, 4}, kSideB);
  auto r = extract_culprits({a1.id, 1}, {b3.id, 3}, pool, kN);
  EXPECT_EQ(r.route, CulpritRoute::e3);
  expect_only_adversarial(r);
}

TEST(Forensics, InsufficientEvidence) {
  auto a1 = make_block(genesis_id(), 1, 0, "a");
  auto b3 = make_block(genesis_id(), 3, 1, "b");
  std::vector<MessagePtr> pool{make_block_message(a1), make_block_message(b3)};
  link(pool, genesis_checkpoint(), {a1.id, 1}, kSideA);
  EXPECT_THROW(extract_culprits({a1.id, 1}, {b3.id, 3}, pool, kN), InsufficientEvidence);
}

}  // namespace
}  // namespace ssf
