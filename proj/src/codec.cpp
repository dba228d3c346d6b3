// SPDX-License-Identifier: Apache-2.0
#include "ssf/codec.hpp"

#include <charconv>
#include <unordered_map>

namespace ssf::codec {

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::raw(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::checkpoint(const Checkpoint& c) {
  digest(c.block);
  u64(c.slot);
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (data_.size() - pos_ < n) throw DecodeError("truncated record");
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto s = raw(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | s[i];
  return v;
}

std::uint64_t ByteReader::u64() {
  auto s = raw(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | s[i];
  return v;
}

Checkpoint ByteReader::checkpoint() {
  Checkpoint c;
  c.block = digest<BlockTag>();
  c.slot = u64();
  return c;
}

namespace {

void write_block(const Block& b, ByteWriter& w) {
  w.digest(b.id);
  w.u8(b.parent ? 1 : 0);
  if (b.parent) w.digest(*b.parent);
  w.u64(b.slot);
  w.u32(b.proposer);
  w.u32(static_cast<std::uint32_t>(b.body.size()));
  w.raw({reinterpret_cast<const std::uint8_t*>(b.body.data()), b.body.size()});
}

Block read_block(ByteReader& r) {
  Block b;
  b.id = r.digest<BlockTag>();
  std::uint8_t has_parent = r.u8();
  if (has_parent > 1) throw DecodeError("bad parent flag");
  if (has_parent) b.parent = r.digest<BlockTag>();
  b.slot = r.u64();
  b.proposer = r.u32();
  auto len = r.u32();
  auto body = r.raw(len);
  b.body.assign(body.begin(), body.end());
  return b;
}

void write_payload(const Message& m, ByteWriter& w) {
  w.u8(static_cast<std::uint8_t>(m.kind()));
  if (const auto* b = m.get_if<Block>()) {
    write_block(*b, w);
  } else if (const auto* v = m.get_if<HeadVote>()) {
    w.digest(v->block);
    w.u64(v->slot);
    w.u32(v->voter);
  } else if (const auto* f = m.get_if<FfgVote>()) {
    w.checkpoint(f->source);
    w.checkpoint(f->target);
    w.u32(f->voter);
  } else if (const auto* p = m.get_if<Proposal>()) {
    encode_into(*make_block_message(p->block), w);
    w.u32(static_cast<std::uint32_t>(p->proposed_view.size()));
    for (const auto& x : p->proposed_view) encode_into(*x, w);
    w.u64(p->slot);
    w.u32(p->proposer);
  } else if (const auto* a = m.get_if<Acknowledgment>()) {
    w.checkpoint(a->checkpoint);
    w.u64(a->slot);
    w.u32(a->voter);
  }
}

MessagePtr read_record(ByteReader& r);

MessagePtr read_payload(ByteReader& r) {
  auto tag = r.u8();
  switch (static_cast<MessageKind>(tag)) {
    case MessageKind::block:
      return Message::make(read_block(r));
    case MessageKind::head_vote: {
      HeadVote v;
      v.block = r.digest<BlockTag>();
      v.slot = r.u64();
      v.voter = r.u32();
      return Message::make(v);
    }
    case MessageKind::ffg_vote: {
      FfgVote v;
      v.source = r.checkpoint();
      v.target = r.checkpoint();
      v.voter = r.u32();
      return Message::make(v);
    }
    case MessageKind::proposal: {
      Proposal p;
      auto bm = read_record(r);
      const auto* b = bm->get_if<Block>();
      if (!b) throw DecodeError("proposal block record is not a block");
      p.block = *b;
      auto count = r.u32();
      for (std::uint32_t i = 0; i < count; ++i) {
        p.proposed_view.push_back(read_record(r));
      }
      p.slot = r.u64();
      p.proposer = r.u32();
      return Message::make(std::move(p));
    }
    case MessageKind::ack: {
      Acknowledgment a;
      a.checkpoint = r.checkpoint();
      a.slot = r.u64();
      a.voter = r.u32();
      return Message::make(a);
    }
  }
  throw DecodeError("unknown message tag " + std::to_string(tag));
}

MessagePtr read_record(ByteReader& r) {
  auto len = r.u32();
  ByteReader inner(r.raw(len));
  auto m = read_payload(inner);
  if (!inner.done()) throw DecodeError("trailing bytes in record");
  return m;
}

}  // namespace

void encode_into(const Message& m, ByteWriter& w) {
  ByteWriter payload;
  write_payload(m, payload);
  w.u32(static_cast<std::uint32_t>(payload.data().size()));
  w.raw(payload.data());
}

std::vector<std::uint8_t> encode(const Message& m) {
  ByteWriter w;
  encode_into(m, w);
  return w.take();
}

MessagePtr decode(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  ByteReader r(bytes);
  auto m = read_record(r);
  if (consumed) *consumed = r.offset();
  return m;
}

std::vector<std::uint8_t> encode_all(std::span<const MessagePtr> messages) {
  ByteWriter w;
  for (const auto& m : messages) encode_into(*m, w);
  return w.take();
}

std::vector<MessagePtr> decode_all(std::span<const std::uint8_t> bytes) {
  std::vector<MessagePtr> out;
  ByteReader r(bytes);
  while (!r.done()) out.push_back(read_record(r));
  return out;
}

// ---- text ----

std::string to_text(const Checkpoint& c) {
  return c.block.hex() + "@" + std::to_string(c.slot);
}

namespace {

template <class T>
T parse_uint(std::string_view s, std::string_view what) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw DecodeError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

template <class Tag>
Digest<Tag> parse_digest(std::string_view s) {
  try {
    return Digest<Tag>::from_hex(s);
  } catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
}

std::string body_hex(const std::string& body) {
  if (body.empty()) return "-";
  return to_hex({reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
}

std::string body_from_hex(std::string_view s) {
  if (s == "-") return {};
  if (s.size() % 2) throw DecodeError("odd-length body hex");
  std::string out;
  out.reserve(s.size() / 2);
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw DecodeError("bad body hex");
  };
  for (std::size_t i = 0; i < s.size(); i += 2) {
    out.push_back(static_cast<char>((nib(s[i]) << 4) | nib(s[i + 1])));
  }
  return out;
}

/// Splits "kind k1=v1 k2=v2 ..." and checks that keys appear in order.
struct Fields {
  std::string_view kind;
  std::vector<std::pair<std::string_view, std::string_view>> kv;

  std::string_view get(std::size_t i, std::string_view key) const {
    if (i >= kv.size() || kv[i].first != key) {
      throw DecodeError("expected field '" + std::string(key) + "'");
    }
    return kv[i].second;
  }
};

Fields split(std::string_view line) {
  Fields f;
  std::size_t pos = 0;
  auto next = [&]() -> std::string_view {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    return line.substr(start, pos - start);
  };
  f.kind = next();
  for (auto tok = next(); !tok.empty(); tok = next()) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) {
      throw DecodeError("field without '=': " + std::string(tok));
    }
    f.kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return f;
}

void expect_count(const Fields& f, std::size_t n) {
  if (f.kv.size() != n) {
    throw DecodeError("record '" + std::string(f.kind) + "' expects " +
                      std::to_string(n) + " fields");
  }
}

}  // namespace

Checkpoint checkpoint_from_text(std::string_view s) {
  auto at = s.find('@');
  if (at == std::string_view::npos) throw DecodeError("checkpoint without '@'");
  return Checkpoint{parse_digest<BlockTag>(s.substr(0, at)),
                    parse_uint<Slot>(s.substr(at + 1), "checkpoint slot")};
}

std::string to_text(const Message& m) {
  std::string out(to_string(m.kind()));
  if (const auto* b = m.get_if<Block>()) {
    out += " id=" + b->id.hex();
    out += " parent=" + (b->parent ? b->parent->hex() : std::string("-"));
    out += " slot=" + std::to_string(b->slot);
    out += " proposer=" + std::to_string(b->proposer);
    out += " body=" + body_hex(b->body);
  } else if (const auto* v = m.get_if<HeadVote>()) {
    out += " block=" + v->block.hex();
    out += " slot=" + std::to_string(v->slot);
    out += " voter=" + std::to_string(v->voter);
  } else if (const auto* fv = m.get_if<FfgVote>()) {
    out += " source=" + to_text(fv->source);
    out += " target=" + to_text(fv->target);
    out += " voter=" + std::to_string(fv->voter);
  } else if (const auto* p = m.get_if<Proposal>()) {
    out += " block=" + p->block.id.hex();
    out += " view=";
    if (p->proposed_view.empty()) out += "-";
    for (std::size_t i = 0; i < p->proposed_view.size(); ++i) {
      if (i) out += ",";
      out += p->proposed_view[i]->id().hex();
    }
    out += " slot=" + std::to_string(p->slot);
    out += " proposer=" + std::to_string(p->proposer);
  } else if (const auto* a = m.get_if<Acknowledgment>()) {
    out += " checkpoint=" + to_text(a->checkpoint);
    out += " slot=" + std::to_string(a->slot);
    out += " voter=" + std::to_string(a->voter);
  }
  return out;
}

MessagePtr from_text(std::string_view line, const Resolver& resolve) {
  auto f = split(line);
  if (f.kind == "block") {
    expect_count(f, 5);
    Block b;
    b.id = parse_digest<BlockTag>(f.get(0, "id"));
    auto parent = f.get(1, "parent");
    if (parent != "-") b.parent = parse_digest<BlockTag>(parent);
    b.slot = parse_uint<Slot>(f.get(2, "slot"), "slot");
    b.proposer = parse_uint<ValidatorIndex>(f.get(3, "proposer"), "proposer");
    b.body = body_from_hex(f.get(4, "body"));
    return Message::make(std::move(b));
  }
  if (f.kind == "head-vote") {
    expect_count(f, 3);
    return make_head_vote(parse_digest<BlockTag>(f.get(0, "block")),
                          parse_uint<Slot>(f.get(1, "slot"), "slot"),
                          parse_uint<ValidatorIndex>(f.get(2, "voter"), "voter"));
  }
  if (f.kind == "ffg-vote") {
    expect_count(f, 3);
    return make_ffg_vote(checkpoint_from_text(f.get(0, "source")),
                         checkpoint_from_text(f.get(1, "target")),
                         parse_uint<ValidatorIndex>(f.get(2, "voter"), "voter"));
  }
  if (f.kind == "ack") {
    expect_count(f, 3);
    return make_ack(checkpoint_from_text(f.get(0, "checkpoint")),
                    parse_uint<Slot>(f.get(1, "slot"), "slot"),
                    parse_uint<ValidatorIndex>(f.get(2, "voter"), "voter"));
  }
  if (f.kind == "propose") {
    expect_count(f, 4);
    if (!resolve) throw DecodeError("proposal record needs a resolver");
    auto lookup = [&](std::string_view hex) {
      auto id = parse_digest<MessageTag>(hex);
      auto m = resolve(id);
      if (!m) throw DecodeError("unresolved message " + std::string(hex));
      return m;
    };
    auto bm = lookup(f.get(0, "block"));
    const auto* b = bm->get_if<Block>();
    if (!b) throw DecodeError("proposal block id does not name a block");
    std::vector<MessagePtr> view;
    auto list = f.get(1, "view");
    if (list != "-") {
      std::size_t pos = 0;
      while (pos <= list.size()) {
        auto comma = list.find(',', pos);
        if (comma == std::string_view::npos) comma = list.size();
        view.push_back(lookup(list.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }
    return make_proposal(*b, std::move(view),
                         parse_uint<Slot>(f.get(2, "slot"), "slot"),
                         parse_uint<ValidatorIndex>(f.get(3, "proposer"), "proposer"));
  }
  throw DecodeError("unknown record kind '" + std::string(f.kind) + "'");
}

}  // namespace ssf::codec
