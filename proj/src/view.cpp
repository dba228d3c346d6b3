// SPDX-License-Identifier: Apache-2.0
#include "ssf/view.hpp"

#include <algorithm>

namespace ssf {

View View::with_genesis() {
  View v;
  v.insert(make_block_message(genesis_block()));
  return v;
}

bool View::insert(const MessagePtr& m) {
  if (m->is_atomic()) return insert_atomic(m);
  std::vector<MessagePtr> parts;
  append_atomic(m, parts);
  bool fresh = false;
  for (const auto& p : parts) fresh |= insert_atomic(p);
  return fresh;
}

bool View::insert(std::span<const MessagePtr> ms) {
  bool fresh = false;
  for (const auto& m : ms) fresh |= insert(m);
  return fresh;
}

void View::merge(const View& other) {
  if (&other == this) return;
  for (const auto& [id, m] : other.messages_) insert_atomic(m);
}

bool View::insert_atomic(const MessagePtr& m) {
  if (!messages_.emplace(m->id(), m).second) return false;
  switch (m->kind()) {
    case MessageKind::block: add_block(*m->get_if<Block>()); break;
    case MessageKind::head_vote: head_votes_.push_back(m); break;
    case MessageKind::ffg_vote: ffg_votes_.push_back(m); break;
    case MessageKind::ack: acks_.push_back(m); break;
    case MessageKind::proposal: break;
  }
  return true;
}

void View::add_block(const Block& b) {
  nodes_.emplace(b.id, Node{b, false, 0, {}});
  if (!b.parent) {
    if (b.id == genesis_id()) connect(b.id);
    return;
  }
  auto it = nodes_.find(*b.parent);
  if (it != nodes_.end() && it->second.connected) {
    connect(b.id);
  } else {
    waiting_[*b.parent].push_back(b.id);
  }
}

void View::connect(const BlockId& root) {
  std::vector<BlockId> stack{root};
  while (!stack.empty()) {
    BlockId id = stack.back();
    stack.pop_back();
    Node& node = nodes_.at(id);
    if (node.block.parent) {
      Node& parent = nodes_.at(*node.block.parent);
      if (parent.block.slot >= node.block.slot) continue;
      node.height = parent.height + 1;
      auto pos = std::lower_bound(parent.children.begin(), parent.children.end(), id);
      parent.children.insert(pos, id);
    }
    node.connected = true;
    connected_order_.push_back(id);
    if (auto w = waiting_.find(id); w != waiting_.end()) {
      auto kids = std::move(w->second);
      waiting_.erase(w);
      stack.insert(stack.end(), kids.begin(), kids.end());
    }
  }
}

MessagePtr View::find(const MessageId& id) const {
  auto it = messages_.find(id);
  return it == messages_.end() ? nullptr : it->second;
}

std::vector<MessagePtr> View::messages() const {
  std::vector<MessagePtr> out;
  out.reserve(messages_.size());
  for (const auto& [id, m] : messages_) out.push_back(m);
  std::sort(out.begin(), out.end(), [](const MessagePtr& a, const MessagePtr& b) {
    return a->id() < b->id();
  });
  return out;
}

std::vector<MessageId> View::ids() const {
  std::vector<MessageId> out;
  out.reserve(messages_.size());
  for (const auto& [id, m] : messages_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

bool View::is_connected(const BlockId& id) const {
  auto it = nodes_.find(id);
  return it != nodes_.end() && it->second.connected;
}

const Block* View::find_block(const BlockId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second.block;
}

const View::Node& View::connected_node(const BlockId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end() || !it->second.connected) throw UnknownBlockError(id);
  return it->second;
}

const Block& View::block(const BlockId& id) const { return connected_node(id).block; }

std::uint64_t View::height(const BlockId& id) const { return connected_node(id).height; }

BlockId View::ancestor_at_height(const BlockId& head, std::uint64_t h) const {
  const Node* n = &connected_node(head);
  if (h > n->height) throw std::out_of_range("ancestor height above block");
  while (n->height > h) n = &nodes_.at(*n->block.parent);
  return n->block.id;
}

bool View::is_ancestor(const BlockId& a, const BlockId& b) const {
  const Node& na = connected_node(a);
  const Node& nb = connected_node(b);
  if (na.height > nb.height) return false;
  return ancestor_at_height(b, na.height) == a;
}

BlockId View::prefix_at_depth(const BlockId& head, std::uint64_t depth) const {
  std::uint64_t h = height(head);
  return ancestor_at_height(head, depth >= h ? 0 : h - depth);
}

BlockId View::lca(const BlockId& a, const BlockId& b) const {
  std::uint64_t h = std::min(height(a), height(b));
  BlockId x = ancestor_at_height(a, h);
  BlockId y = ancestor_at_height(b, h);
  while (x != y) {
    x = *nodes_.at(x).block.parent;
    y = *nodes_.at(y).block.parent;
  }
  return x;
}

const std::vector<BlockId>& View::children(const BlockId& id) const {
  return connected_node(id).children;
}

View view_merge(const View& v, std::span<const MessagePtr> msgs) {
  View out = v;
  out.insert(msgs);
  return out;
}

bool is_ancestor(const View& v, const BlockId& a, const BlockId& b) {
  return v.is_ancestor(a, b);
}

std::uint64_t block_height(const View& v, const BlockId& b) { return v.height(b); }

BlockId prefix_at_depth(const View& v, const BlockId& head, std::uint64_t depth) {
  return v.prefix_at_depth(head, depth);
}

}  // namespace ssf
