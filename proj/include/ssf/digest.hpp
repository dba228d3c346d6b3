// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace ssf {

using ValidatorIndex = std::uint32_t;
using Slot = std::uint64_t;
using Round = std::uint64_t;

using DigestBytes = std::array<std::uint8_t, 32>;

DigestBytes sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Parses exactly 64 lowercase or uppercase hex characters.
/// Throws std::invalid_argument on malformed input.
DigestBytes digest_from_hex(std::string_view hex);

/// A SHA-256 digest distinguished by a tag type. Ordering is lexicographic
/// on the raw bytes and is the tie-break order used throughout the engine.
template <class Tag>
struct Digest {
  DigestBytes bytes{};

  auto operator<=>(const Digest&) const = default;
  bool operator==(const Digest&) const = default;

  std::string hex() const { return to_hex(bytes); }
  /// First 8 hex digits, for log output only.
  std::string short_hex() const { return hex().substr(0, 8); }

  static Digest from_hex(std::string_view h) { return Digest{digest_from_hex(h)}; }
};

struct BlockTag;
struct MessageTag;
using BlockId = Digest<BlockTag>;
using MessageId = Digest<MessageTag>;

struct DigestHash {
  template <class Tag>
  std::size_t operator()(const Digest<Tag>& d) const noexcept {
    std::size_t h;
    std::memcpy(&h, d.bytes.data(), sizeof(h));
    return h;
  }
};

}  // namespace ssf
