// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssf/scenario.hpp"
#include "ssf/validator.hpp"

namespace ssf {

struct TraceHeader {
  std::uint32_t n = 0;
  Round delta = 1;
  Round gst = 0;
  Round gat = 0;
  std::optional<Slot> eta;
  std::optional<Slot> tau;
  std::uint64_t kappa = 0;
  Slot horizon = 0;
  std::uint64_t seed = 0;
  ForkChoiceMode fc_mode = ForkChoiceMode::hfc;
  std::string strategy;

  static TraceHeader from(const Scenario& sc);
  Round slot_length() const { return 4 * delta; }
  Round total_rounds() const { return slot_length() * horizon; }
};

enum class RecordKind { send, state, confirm, event, note };

/// Who produced a record: the world, honest validator i ("v<i>"), or the
/// adversary acting as corrupted validator i ("a<i>").
struct Actor {
  enum class Kind { world, honest, adversary };
  Kind kind = Kind::world;
  ValidatorIndex index = 0;

  std::string str() const;
  static Actor parse(std::string_view s);
  bool operator==(const Actor&) const = default;
};

struct StateSnapshot {
  ValidatorStatus status = ValidatorStatus::active;
  BlockId canonical;
  BlockId available;
  BlockId finalized;
  Checkpoint justified;
};

struct TraceRecord {
  Round round = 0;
  Actor actor;
  RecordKind kind = RecordKind::note;
  MessagePtr message;      // send
  StateSnapshot state;     // state
  ConfirmOutcome confirm;  // confirm
  std::string text;        // event, note
};

/// Line-oriented execution record:
///   <round> <actor> <kind> <payload>
/// Proposals are preceded by "embed" lines carrying any nested message not
/// printed earlier, and reference nested messages by id.
class Trace {
 public:
  TraceHeader header;
  std::vector<TraceRecord> records;

  void write(std::ostream& out, bool include_fc = true) const;
  std::string text(bool include_fc = true) const;

  /// Throws codec::DecodeError on malformed input.
  static Trace read(std::istream& in);
  static Trace parse(const std::string& text);
};

}  // namespace ssf
