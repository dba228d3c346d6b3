// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ssf/message.hpp"

namespace ssf {

/// Raised when a query names a block that is absent from the view or not
/// connected to genesis.
struct UnknownBlockError : std::out_of_range {
  explicit UnknownBlockError(const BlockId& id)
      : std::out_of_range("unknown block " + id.short_hex()), block(id) {}
  BlockId block;
};

/// A set of atomic messages with a derived block tree.
///
/// Proposals are stored unpacked: inserting one inserts its block and its
/// proposed view. Blocks whose parent is missing stay dangling until the
/// parent arrives; a block whose parent has an equal or later slot never
/// connects.
class View {
 public:
  View() = default;
  static View with_genesis();

  /// Returns true if at least one message was new.
  bool insert(const MessagePtr& m);
  bool insert(std::span<const MessagePtr> ms);
  void merge(const View& other);

  bool contains(const MessageId& id) const { return messages_.contains(id); }
  MessagePtr find(const MessageId& id) const;
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }

  /// All stored messages sorted by id.
  std::vector<MessagePtr> messages() const;
  std::vector<MessageId> ids() const;

  bool has_block(const BlockId& id) const { return nodes_.contains(id); }
  bool is_connected(const BlockId& id) const;
  /// Any stored block, connected or not; null when absent.
  const Block* find_block(const BlockId& id) const;
  /// Connected block; throws UnknownBlockError otherwise.
  const Block& block(const BlockId& id) const;

  std::uint64_t height(const BlockId& id) const;
  /// Ancestor-or-equal.
  bool is_ancestor(const BlockId& a, const BlockId& b) const;
  bool comparable(const BlockId& a, const BlockId& b) const {
    return is_ancestor(a, b) || is_ancestor(b, a);
  }
  BlockId prefix_at_depth(const BlockId& head, std::uint64_t depth) const;
  BlockId ancestor_at_height(const BlockId& head, std::uint64_t h) const;
  BlockId lca(const BlockId& a, const BlockId& b) const;
  /// Connected children sorted by id.
  const std::vector<BlockId>& children(const BlockId& id) const;
  /// Connected blocks; every parent precedes its children.
  const std::vector<BlockId>& connected_blocks() const { return connected_order_; }

  const std::vector<MessagePtr>& head_votes() const { return head_votes_; }
  const std::vector<MessagePtr>& ffg_votes() const { return ffg_votes_; }
  const std::vector<MessagePtr>& acks() const { return acks_; }

 private:
  struct Node {
    Block block;
    bool connected = false;
    std::uint64_t height = 0;
    std::vector<BlockId> children;
  };

  bool insert_atomic(const MessagePtr& m);
  void add_block(const Block& b);
  void connect(const BlockId& id);
  const Node& connected_node(const BlockId& id) const;

  std::unordered_map<MessageId, MessagePtr, DigestHash> messages_;
  std::unordered_map<BlockId, Node, DigestHash> nodes_;
  std::unordered_map<BlockId, std::vector<BlockId>, DigestHash> waiting_;
  std::vector<BlockId> connected_order_;
  std::vector<MessagePtr> head_votes_;
  std::vector<MessagePtr> ffg_votes_;
  std::vector<MessagePtr> acks_;
};

View view_merge(const View& v, std::span<const MessagePtr> msgs);
bool is_ancestor(const View& v, const BlockId& a, const BlockId& b);
std::uint64_t block_height(const View& v, const BlockId& b);
BlockId prefix_at_depth(const View& v, const BlockId& head, std::uint64_t depth);

}  // namespace ssf
