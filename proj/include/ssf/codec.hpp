// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssf/message.hpp"

namespace ssf::codec {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Little-endian writer for the canonical binary layout.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void raw(std::span<const std::uint8_t> bytes);
  template <class Tag>
  void digest(const Digest<Tag>& d) {
    raw(d.bytes);
  }
  void checkpoint(const Checkpoint& c);

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> raw(std::size_t n);
  template <class Tag>
  Digest<Tag> digest() {
    Digest<Tag> d;
    auto s = raw(d.bytes.size());
    std::copy(s.begin(), s.end(), d.bytes.begin());
    return d;
  }
  Checkpoint checkpoint();

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

/// Canonical binary record: u32 payload length, then a one-byte kind tag
/// followed by the fields in declaration order. Proposals nest the full
/// records of their block and of every proposed-view message.
std::vector<std::uint8_t> encode(const Message& m);
void encode_into(const Message& m, ByteWriter& w);

/// Decodes one record. `consumed`, when given, receives the record size.
MessagePtr decode(std::span<const std::uint8_t> bytes,
                  std::size_t* consumed = nullptr);

std::vector<std::uint8_t> encode_all(std::span<const MessagePtr> messages);
std::vector<MessagePtr> decode_all(std::span<const std::uint8_t> bytes);

/// Single-line text record. Proposals reference their block and proposed
/// view by message id; those messages must be resolvable when parsing.
std::string to_text(const Message& m);

using Resolver = std::function<MessagePtr(const MessageId&)>;

/// Parses a record produced by to_text. Throws DecodeError.
MessagePtr from_text(std::string_view line, const Resolver& resolve = {});

std::string to_text(const Checkpoint& c);
Checkpoint checkpoint_from_text(std::string_view s);

}  // namespace ssf::codec
