// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ssf/view.hpp"

namespace ssf {

/// A view narrowed by filters, together with the slot it is evaluated at.
/// Head votes are materialized; blocks are narrowed lazily by an optional
/// anchor (only blocks comparable with it stay visible).
struct FilteredView {
  const View* view = nullptr;
  Slot slot = 0;
  std::vector<MessagePtr> head_votes;
  std::optional<BlockId> anchor;

  bool block_visible(const BlockId& id) const;
  /// Materialized message set, sorted by id.
  std::vector<MessagePtr> messages() const;
};

FilteredView unfiltered(const View& v, Slot t);

/// Drops every head vote of a validator that cast two distinct head votes
/// for one slot.
FilteredView fil_eq(const FilteredView& fv);
/// Drops head votes from slots before t - eta. nullopt means no expiry.
FilteredView fil_exp(const FilteredView& fv, std::optional<Slot> eta);
/// Keeps, per voter, only head votes from that voter's latest vote slot.
FilteredView fil_lmd(const FilteredView& fv);
/// Drops blocks that conflict with the latest justified block.
FilteredView fil_ffg(const FilteredView& fv, const BlockId& justified_block);

FilteredView fil_eq(const View& v, Slot t);
FilteredView fil_exp(const View& v, Slot t, std::optional<Slot> eta);
FilteredView fil_lmd(const View& v, Slot t);
FilteredView fil_ffg(const View& v, Slot t, std::uint32_t n);

/// Number of distinct voters whose surviving head vote targets a visible
/// block in each visible block's subtree.
std::map<BlockId, std::uint32_t> ghost_weights(const FilteredView& fv);

/// Heaviest-subtree descent from genesis to a leaf; ties go to the smaller id.
BlockId ghost(const FilteredView& fv);

struct ForkChoiceParams {
  std::optional<Slot> eta;
  std::uint32_t n = 1;
};

enum class ForkChoiceMode { hfc, rlmd };

BlockId rlmd_ghost(const View& v, Slot t, const ForkChoiceParams& p);
BlockId rlmd_ghost(const FilteredView& fv, const ForkChoiceParams& p);
BlockId hfc(const View& v, Slot t, const ForkChoiceParams& p);
/// As above with a precomputed latest justified block.
BlockId hfc(const View& v, Slot t, const ForkChoiceParams& p, const BlockId& justified_block);

BlockId fork_choice(ForkChoiceMode mode, const View& v, Slot t, const ForkChoiceParams& p,
                    const BlockId& justified_block);

}  // namespace ssf
