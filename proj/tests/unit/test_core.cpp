// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ssf/codec.hpp"
#include "ssf/view.hpp"
#include "oracles/oracles.hpp"

namespace ssf {
namespace {

using testing::oracle_ancestor;
using testing::path_to_root;
using testing::random_tree;

TEST(Digest, HexRoundTrip) {
  auto id = genesis_id();
  EXPECT_EQ(BlockId::from_hex(id.hex()), id);
  EXPECT_THROW(BlockId::from_hex("zz"), std::invalid_argument);
}

TEST(Digest, KnownSha256) {
  std::string abc = "abc";
  auto d = sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
  EXPECT_EQ(to_hex(d), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Message, GenesisIsUniqueParentless) {
  EXPECT_FALSE(genesis_block().parent);
  EXPECT_EQ(genesis_block().slot, 0u);
  EXPECT_FALSE(structural_error(*make_block_message(genesis_block())));
  auto fake = make_block(std::nullopt, 0, 1, "other");
  EXPECT_TRUE(structural_error(*make_block_message(fake)));
}

TEST(Message, TamperedBlockIdRejected) {
  auto b = make_block(genesis_id(), 1, 0);
  b.slot = 2;
  EXPECT_TRUE(structural_error(*make_block_message(b)));
}

TEST(Message, ProposalInvariants) {
  auto b = make_block(genesis_id(), 1, 2);
  auto ok = make_proposal(b, {make_block_message(b)}, 1, 2);
  EXPECT_FALSE(structural_error(*ok));
  EXPECT_TRUE(structural_error(*make_proposal(b, {}, 1, 2)));
  EXPECT_TRUE(structural_error(*make_proposal(b, {make_block_message(b)}, 2, 2)));
  EXPECT_TRUE(structural_error(*make_proposal(b, {make_block_message(b)}, 1, 3)));
}

TEST(Message, AckSlotMustMatchCheckpoint) {
  EXPECT_FALSE(structural_error(*make_ack({genesis_id(), 3}, 3, 0)));
  EXPECT_TRUE(structural_error(*make_ack({genesis_id(), 3}, 4, 0)));
}

TEST(Message, InvertedFfgVoteIsWellFormedEvidence) {
  EXPECT_FALSE(structural_error(*make_ffg_vote({genesis_id(), 5}, {genesis_id(), 2}, 0)));
}

TEST(Message, IdsAreContentDerived) {
  auto a = make_head_vote(genesis_id(), 1, 0);
  auto b = make_head_vote(genesis_id(), 1, 0);
  auto c = make_head_vote(genesis_id(), 1, 1);
  EXPECT_EQ(a->id(), b->id());
  EXPECT_NE(a->id(), c->id());
}

TEST(Message, ProposalViewIsFlattenedSortedDeduped) {
  auto b1 = make_block(genesis_id(), 1, 0);
  auto v1 = make_head_vote(b1.id, 1, 3);
  auto inner = make_proposal(b1, {make_block_message(b1), v1}, 1, 0);
  auto b2 = make_block(b1.id, 2, 1);
  auto outer = make_proposal(b2, {make_block_message(b2), inner, v1}, 2, 1);
  const auto& pv = outer->get_if<Proposal>()->proposed_view;
  EXPECT_EQ(pv.size(), 3u);
  EXPECT_TRUE(std::is_sorted(pv.begin(), pv.end(),
                             [](const MessagePtr& x, const MessagePtr& y) { return x->id() < y->id(); }));
  for (const auto& m : pv) EXPECT_TRUE(m->is_atomic());
}

std::vector<MessagePtr> random_messages(std::mt19937_64& rng, std::size_t count) {
  auto tree = random_tree(rng, 12);
  std::vector<MessagePtr> out;
  std::uniform_int_distribution<std::size_t> pick(0, tree.blocks.size() - 1);
  std::uniform_int_distribution<ValidatorIndex> who(0, 5);
  std::uniform_int_distribution<int> kind(0, 4);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& b = tree.blocks[pick(rng)];
    const auto& c = tree.blocks[pick(rng)];
    switch (kind(rng)) {
      case 0: out.push_back(make_block_message(b)); break;
      case 1: out.push_back(make_head_vote(b.id, b.slot + 1, who(rng))); break;
      case 2: out.push_back(make_ffg_vote({b.id, b.slot}, {c.id, c.slot}, who(rng))); break;
      case 3: out.push_back(make_ack({b.id, b.slot}, b.slot, who(rng))); break;
      default:
        if (b.parent) {
          out.push_back(make_proposal(b, {make_block_message(b), make_head_vote(c.id, c.slot, who(rng))},
                                      b.slot, b.proposer));
        } else {
          out.push_back(make_block_message(b));
        }
    }
  }
  return out;
}

std::set<MessageId> oracle_union(std::initializer_list<const std::vector<MessagePtr>*> sets) {
  std::set<MessageId> out;
  for (const auto* s : sets) {
    for (const auto& m : *s) {
      std::vector<MessagePtr> flat;
      append_atomic(m, flat);
      for (const auto& x : flat) out.insert(x->id());
    }
  }
  return out;
}

std::set<MessageId> id_set(const View& v) {
  auto ids = v.ids();
  return {ids.begin(), ids.end()};
}

TEST(View, MergeIdentityAndGenesis) {
  View v = View::with_genesis();
  View before = v;
  v.insert(std::span<const MessagePtr>{});
  EXPECT_EQ(v.ids(), before.ids());

  View e;
  e.insert(make_block_message(genesis_block()));
  EXPECT_EQ(e.size(), 1u);
  EXPECT_TRUE(e.is_connected(genesis_id()));
}

TEST(View, MergeIsSemilatticeAgainstUnionOracle) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 1000; ++iter) {
    auto a = random_messages(rng, 15);
    auto b = random_messages(rng, 15);
    auto c = random_messages(rng, 15);
    View base = View::with_genesis();
    base.insert(c);

    View ab = view_merge(view_merge(base, a), b);
    View ba = view_merge(view_merge(base, b), a);
    ASSERT_EQ(ab.ids(), ba.ids());
    auto expect = oracle_union({&a, &b, &c});
    expect.insert(make_block_message(genesis_block())->id());
    ASSERT_EQ(id_set(ab), expect);
    View again = view_merge(ab, a);
    ASSERT_EQ(again.ids(), ab.ids());

    View abc1 = ab;
    View bc;
    bc.insert(b);
    bc.insert(c);
    View abc2 = view_merge(base, a);
    abc2.merge(bc);
    ASSERT_EQ(abc1.ids(), abc2.ids());
    ASSERT_EQ(abc1.connected_blocks().size(), abc2.connected_blocks().size());
  }
}

TEST(View, DanglingBlockConnectsWhenParentArrives) {
  auto a = make_block(genesis_id(), 1, 0);
  auto b = make_block(a.id, 2, 0);
  View v = View::with_genesis();
  v.insert(make_block_message(b));
  EXPECT_TRUE(v.has_block(b.id));
  EXPECT_FALSE(v.is_connected(b.id));
  EXPECT_THROW(v.height(b.id), UnknownBlockError);
  v.insert(make_block_message(a));
  EXPECT_TRUE(v.is_connected(b.id));
  EXPECT_EQ(v.height(b.id), 2u);
}

TEST(View, NonIncreasingSlotNeverConnects) {
  auto a = make_block(genesis_id(), 3, 0);
  auto b = make_block(a.id, 3, 1);
  View v = View::with_genesis();
  v.insert(make_block_message(a));
  v.insert(make_block_message(b));
  EXPECT_TRUE(v.has_block(b.id));
  EXPECT_FALSE(v.is_connected(b.id));
}

TEST(View, AncestryBasics) {
  auto a = make_block(genesis_id(), 1, 0);
  auto b = make_block(a.id, 2, 0);
  View v = View::with_genesis();
  v.insert(make_block_message(a));
  v.insert(make_block_message(b));
  EXPECT_TRUE(is_ancestor(v, genesis_id(), b.id));
  EXPECT_TRUE(is_ancestor(v, b.id, b.id));
  EXPECT_FALSE(is_ancestor(v, b.id, a.id));
  EXPECT_EQ(block_height(v, genesis_id()), 0u);
  EXPECT_EQ(block_height(v, b.id), 2u);
  EXPECT_EQ(prefix_at_depth(v, b.id, 0), b.id);
  EXPECT_EQ(prefix_at_depth(v, b.id, 5), genesis_id());
  auto unknown = make_block(genesis_id(), 9, 9);
  EXPECT_THROW(is_ancestor(v, unknown.id, b.id), UnknownBlockError);
}

TEST(View, AncestryHeightPrefixMatchPathOracle) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 1000; ++iter) {
    auto tree = random_tree(rng, 1 + iter % 20);
    // Insert in shuffled order to exercise dangling resolution.
    auto blocks = tree.blocks;
    std::shuffle(blocks.begin(), blocks.end(), rng);
    View v;
    for (const auto& b : blocks) v.insert(make_block_message(b));
    ASSERT_EQ(v.connected_blocks().size(), tree.blocks.size());
    for (const auto& x : tree.blocks) {
      auto path = path_to_root(tree, x.id);
      ASSERT_EQ(v.height(x.id), path.size() - 1);
      for (std::uint64_t k = 0; k < 4; ++k) {
        BlockId expect = k < path.size() ? path[k] : genesis_id();
        ASSERT_EQ(v.prefix_at_depth(x.id, k), expect);
      }
      for (const auto& y : tree.blocks) {
        ASSERT_EQ(v.is_ancestor(x.id, y.id), oracle_ancestor(tree, x.id, y.id));
      }
    }
  }
}

TEST(View, AncestryIsPartialOrder) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    auto tree = random_tree(rng, 20);
    View v = tree.view();
    for (const auto& a : tree.blocks) {
      EXPECT_TRUE(v.is_ancestor(a.id, a.id));
      for (const auto& b : tree.blocks) {
        if (a.id != b.id && v.is_ancestor(a.id, b.id)) EXPECT_FALSE(v.is_ancestor(b.id, a.id));
        for (const auto& c : tree.blocks) {
          if (v.is_ancestor(a.id, b.id) && v.is_ancestor(b.id, c.id)) {
            EXPECT_TRUE(v.is_ancestor(a.id, c.id));
          }
        }
      }
    }
  }
}

TEST(Codec, BinaryRoundTrip) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 300; ++iter) {
    auto msgs = random_messages(rng, 10);
    auto bytes = codec::encode_all(msgs);
    auto back = codec::decode_all(bytes);
    ASSERT_EQ(back.size(), msgs.size());
    for (std::size_t i = 0; i < msgs.size(); ++i) {
      ASSERT_EQ(back[i]->id(), msgs[i]->id());
      ASSERT_EQ(codec::encode(*back[i]), codec::encode(*msgs[i]));
    }
  }
}

TEST(Codec, TruncatedRecordRejected) {
  auto bytes = codec::encode(*make_head_vote(genesis_id(), 1, 0));
  bytes.pop_back();
  EXPECT_THROW(codec::decode(bytes), codec::DecodeError);
}

TEST(Codec, TextRoundTrip) {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 300; ++iter) {
    auto msgs = random_messages(rng, 10);
    std::map<MessageId, MessagePtr> known;
    for (const auto& m : msgs) {
      std::vector<MessagePtr> flat;
      append_atomic(m, flat);
      for (const auto& x : flat) known.emplace(x->id(), x);
    }
    auto resolve = [&](const MessageId& id) -> MessagePtr {
      auto it = known.find(id);
      return it == known.end() ? nullptr : it->second;
    };
    for (const auto& m : msgs) {
      auto line = codec::to_text(*m);
      auto back = codec::from_text(line, resolve);
      ASSERT_EQ(back->id(), m->id()) << line;
      ASSERT_EQ(codec::to_text(*back), line);
    }
  }
}

TEST(Codec, TextRejectsGarbage) {
  EXPECT_THROW(codec::from_text("head-vote block=xyz slot=1 voter=0"), codec::DecodeError);
  EXPECT_THROW(codec::from_text("nonsense"), codec::DecodeError);
  EXPECT_THROW(codec::from_text("ack checkpoint=" + genesis_id().hex() + "@1 voter=0 slot=1"),
               codec::DecodeError);
}

}  // namespace
}  // namespace ssf
