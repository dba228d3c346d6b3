// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssf/validator.hpp"

namespace ssf {

/// The validator is asleep for rounds in [from, to).
struct SleepInterval {
  ValidatorIndex validator = 0;
  Round from = 0;
  Round to = 0;
};

struct Corruption {
  ValidatorIndex validator = 0;
  Round round = 0;
};

struct AdversaryConfig {
  std::string strategy = "honest-mirror";
  /// Partitioner: recipient classes. Double-finalizer: the two honest sides.
  std::vector<std::vector<ValidatorIndex>> groups;
  /// Double-finalizer participation windows, inclusive slot ranges.
  std::pair<Slot, Slot> window_a{1, 0};
  std::pair<Slot, Slot> window_b{1, 0};
  /// First slot in which the strategy deviates.
  Slot start_slot = 1;
};

struct Scenario {
  std::string name = "scenario";
  std::uint32_t n = 4;
  Round delta = 1;
  Round gst = 0;
  Round gat = 0;
  std::optional<Slot> eta;
  std::optional<Slot> tau;
  std::uint64_t kappa = 2;
  Slot horizon = 10;
  std::uint64_t seed = 0;
  ForkChoiceMode fc_mode = ForkChoiceMode::hfc;
  ProposerSchedule::Kind proposer_kind = ProposerSchedule::Kind::round_robin;
  std::vector<ValidatorIndex> proposer_list;
  std::vector<SleepInterval> sleep;
  std::vector<Corruption> corruption;
  AdversaryConfig adversary;

  Round slot_length() const { return 4 * delta; }
  Round total_rounds() const { return slot_length() * horizon; }

  /// Human-readable descriptions of violated invariants; empty when valid.
  std::vector<std::string> validate() const;

  ProposerSchedule proposers() const;
  ValidatorParams params_for(ValidatorIndex v) const;

  std::optional<Round> corruption_round(ValidatorIndex v) const;
  bool adversarial(ValidatorIndex v, Round r) const;
  bool awake(ValidatorIndex v, Round r) const;
  /// Honest, awake, and done with the joining protocol.
  bool active(ValidatorIndex v, Round r) const;
  /// Validators ever corrupted within the horizon.
  std::vector<ValidatorIndex> ever_adversarial() const;
};

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

/// Throws ScenarioError on syntax errors or unknown fields. Does not run
/// validate().
Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_yaml(const Scenario& sc);

std::string_view to_string(ForkChoiceMode m);

}  // namespace ssf
