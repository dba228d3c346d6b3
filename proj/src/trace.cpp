// SPDX-License-Identifier: Apache-2.0
#include "ssf/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ssf/codec.hpp"

namespace ssf {

using codec::DecodeError;

TraceHeader TraceHeader::from(const Scenario& sc) {
  TraceHeader h;
  h.n = sc.n;
  h.delta = sc.delta;
  h.gst = sc.gst;
  h.gat = sc.gat;
  h.eta = sc.eta;
  h.tau = sc.tau;
  h.kappa = sc.kappa;
  h.horizon = sc.horizon;
  h.seed = sc.seed;
  h.fc_mode = sc.fc_mode;
  h.strategy = sc.adversary.strategy;
  return h;
}

std::string Actor::str() const {
  switch (kind) {
    case Kind::world: return "world";
    case Kind::honest: return "v" + std::to_string(index);
    case Kind::adversary: return "a" + std::to_string(index);
  }
  return "world";
}

namespace {

template <class T>
T to_uint(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw DecodeError("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::string inf_text(const std::optional<Slot>& v) { return v ? std::to_string(*v) : "inf"; }

std::optional<Slot> inf_parse(std::string_view s) {
  if (s == "inf") return std::nullopt;
  return to_uint<Slot>(s);
}

std::string_view status_text(ValidatorStatus s) { return to_string(s); }

ValidatorStatus status_parse(std::string_view s) {
  if (s == "asleep") return ValidatorStatus::asleep;
  if (s == "joining") return ValidatorStatus::joining;
  if (s == "active") return ValidatorStatus::active;
  throw DecodeError("bad status '" + std::string(s) + "'");
}

/// key=value tokens after the record kind.
std::unordered_map<std::string, std::string> kv_map(std::string_view payload) {
  std::unordered_map<std::string, std::string> out;
  std::istringstream ss{std::string(payload)};
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw DecodeError("expected key=value, got '" + tok + "'");
    out.emplace(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

const std::string& need(const std::unordered_map<std::string, std::string>& m, const std::string& k) {
  auto it = m.find(k);
  if (it == m.end()) throw DecodeError("missing field '" + k + "'");
  return it->second;
}

}  // namespace

Actor Actor::parse(std::string_view s) {
  if (s == "world") return Actor{};
  if (s.size() >= 2 && (s[0] == 'v' || s[0] == 'a')) {
    return Actor{s[0] == 'v' ? Kind::honest : Kind::adversary, to_uint<ValidatorIndex>(s.substr(1))};
  }
  throw DecodeError("bad actor '" + std::string(s) + "'");
}

void Trace::write(std::ostream& out, bool include_fc) const {
  const auto& h = header;
  out << "0 world header n=" << h.n << " delta=" << h.delta << " gst=" << h.gst << " gat=" << h.gat
      << " eta=" << inf_text(h.eta) << " tau=" << inf_text(h.tau) << " kappa=" << h.kappa
      << " horizon=" << h.horizon << " seed=" << h.seed;
  if (include_fc) out << " fc=" << to_string(h.fc_mode);
  out << " strategy=" << h.strategy << "\n";

  std::unordered_set<MessageId, DigestHash> printed;
  for (const auto& rec : records) {
    const std::string prefix = std::to_string(rec.round) + " " + rec.actor.str() + " ";
    switch (rec.kind) {
      case RecordKind::send: {
        if (const auto* p = rec.message->get_if<Proposal>()) {
          auto embed = [&](const MessagePtr& m) {
            if (printed.insert(m->id()).second) out << prefix << "embed " << codec::to_text(*m) << "\n";
          };
          embed(make_block_message(p->block));
          for (const auto& m : p->proposed_view) embed(m);
        } else {
          printed.insert(rec.message->id());
        }
        out << prefix << "send " << codec::to_text(*rec.message) << "\n";
        break;
      }
      case RecordKind::state: {
        const auto& s = rec.state;
        out << prefix << "state status=" << status_text(s.status) << " canonical=" << s.canonical.hex()
            << " available=" << s.available.hex() << " finalized=" << s.finalized.hex()
            << " justified=" << codec::to_text(s.justified) << "\n";
        break;
      }
      case RecordKind::confirm: {
        const auto& c = rec.confirm;
        out << prefix << "confirm slot=" << c.slot << " fast=" << (c.fast ? c.fast->hex() : "-")
            << " kappa=" << c.kappa_prefix.hex() << " available=" << c.available.hex() << "\n";
        break;
      }
      case RecordKind::event: out << prefix << "event " << rec.text << "\n"; break;
      case RecordKind::note: out << prefix << "note " << rec.text << "\n"; break;
    }
  }
}

std::string Trace::text(bool include_fc) const {
  std::ostringstream ss;
  write(ss, include_fc);
  return ss.str();
}

Trace Trace::read(std::istream& in) {
  Trace t;
  std::unordered_map<MessageId, MessagePtr, DigestHash> known;
  auto resolve = [&](const MessageId& id) -> MessagePtr {
    auto it = known.find(id);
    return it == known.end() ? nullptr : it->second;
  };
  auto remember = [&](const MessagePtr& m) {
    std::vector<MessagePtr> flat;
    append_atomic(m, flat);
    for (const auto& x : flat) known.emplace(x->id(), x);
  };

  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::string_view sv(line);
      auto sp1 = sv.find(' ');
      auto sp2 = sv.find(' ', sp1 + 1);
      auto sp3 = sv.find(' ', sp2 + 1);
      if (sp1 == std::string_view::npos || sp2 == std::string_view::npos) {
        throw DecodeError("short record");
      }
      TraceRecord rec;
      rec.round = to_uint<Round>(sv.substr(0, sp1));
      rec.actor = Actor::parse(sv.substr(sp1 + 1, sp2 - sp1 - 1));
      auto kind = sv.substr(sp2 + 1, sp3 == std::string_view::npos ? std::string_view::npos : sp3 - sp2 - 1);
      auto payload = sp3 == std::string_view::npos ? std::string_view{} : sv.substr(sp3 + 1);

      if (kind == "header") {
        auto kv = kv_map(payload);
        auto& h = t.header;
        h.n = to_uint<std::uint32_t>(need(kv, "n"));
        h.delta = to_uint<Round>(need(kv, "delta"));
        h.gst = to_uint<Round>(need(kv, "gst"));
        h.gat = to_uint<Round>(need(kv, "gat"));
        h.eta = inf_parse(need(kv, "eta"));
        h.tau = inf_parse(need(kv, "tau"));
        h.kappa = to_uint<std::uint64_t>(need(kv, "kappa"));
        h.horizon = to_uint<Slot>(need(kv, "horizon"));
        h.seed = to_uint<std::uint64_t>(need(kv, "seed"));
        if (auto it = kv.find("fc"); it != kv.end()) {
          h.fc_mode = it->second == "rlmd" ? ForkChoiceMode::rlmd : ForkChoiceMode::hfc;
        }
        h.strategy = need(kv, "strategy");
        have_header = true;
        continue;
      }
      if (kind == "embed") {
        remember(codec::from_text(payload, resolve));
        continue;
      }
      if (kind == "send") {
        rec.kind = RecordKind::send;
        rec.message = codec::from_text(payload, resolve);
        remember(rec.message);
      } else if (kind == "state") {
        rec.kind = RecordKind::state;
        auto kv = kv_map(payload);
        rec.state.status = status_parse(need(kv, "status"));
        rec.state.canonical = BlockId::from_hex(need(kv, "canonical"));
        rec.state.available = BlockId::from_hex(need(kv, "available"));
        rec.state.finalized = BlockId::from_hex(need(kv, "finalized"));
        rec.state.justified = codec::checkpoint_from_text(need(kv, "justified"));
      } else if (kind == "confirm") {
        rec.kind = RecordKind::confirm;
        auto kv = kv_map(payload);
        rec.confirm.slot = to_uint<Slot>(need(kv, "slot"));
        if (need(kv, "fast") != "-") rec.confirm.fast = BlockId::from_hex(need(kv, "fast"));
        rec.confirm.kappa_prefix = BlockId::from_hex(need(kv, "kappa"));
        rec.confirm.available = BlockId::from_hex(need(kv, "available"));
      } else if (kind == "event" || kind == "note") {
        rec.kind = kind == "event" ? RecordKind::event : RecordKind::note;
        rec.text = std::string(payload);
      } else {
        throw DecodeError("unknown record kind '" + std::string(kind) + "'");
      }
      t.records.push_back(std::move(rec));
    } catch (const std::invalid_argument& e) {
      throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DecodeError& e) {
      throw DecodeError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw DecodeError("trace has no header record");
  return t;
}

Trace Trace::parse(const std::string& text) {
  std::istringstream ss(text);
  return read(ss);
}

}  // namespace ssf
