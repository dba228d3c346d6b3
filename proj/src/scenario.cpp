// SPDX-License-Identifier: Apache-2.0
#include "ssf/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ssf {

std::string_view to_string(ForkChoiceMode m) { return m == ForkChoiceMode::hfc ? "hfc" : "rlmd"; }

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : "; ") + x;
  return out;
}

const std::set<std::string> kStrategies{
    "honest-mirror", "silent-proposer", "head-equivocator", "ffg-equivocator",
    "surround-voter", "ack-surrounder",  "partitioner",      "double-finalizer",
};

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> p)
    : std::runtime_error("invalid scenario: " + join(p)), problems(std::move(p)) {}

ProposerSchedule Scenario::proposers() const {
  return ProposerSchedule{proposer_kind, n, seed, proposer_list};
}

ValidatorParams Scenario::params_for(ValidatorIndex) const {
  ValidatorParams p;
  p.delta = delta;
  p.eta = eta;
  p.kappa = kappa;
  p.n = n;
  p.fc_mode = fc_mode;
  p.proposers = proposers();
  return p;
}

std::optional<Round> Scenario::corruption_round(ValidatorIndex v) const {
  std::optional<Round> out;
  for (const auto& c : corruption) {
    if (c.validator == v && (!out || c.round < *out)) out = c.round;
  }
  return out;
}

bool Scenario::adversarial(ValidatorIndex v, Round r) const {
  auto c = corruption_round(v);
  return c && *c <= r;
}

bool Scenario::awake(ValidatorIndex v, Round r) const {
  for (const auto& s : sleep) {
    if (s.validator == v && s.from <= r && r < s.to) return false;
  }
  return true;
}

bool Scenario::active(ValidatorIndex v, Round r) const {
  if (adversarial(v, r) || !awake(v, r)) return false;
  // Start of the current awake stretch.
  Round woke = 0;
  bool slept = false;
  for (const auto& s : sleep) {
    if (s.validator == v && s.to <= r && s.from < s.to && (!slept || s.to > woke)) {
      woke = s.to;
      slept = true;
    }
  }
  if (!slept) return true;
  // Joining completes at the first merge round at or after waking.
  const Round L = slot_length();
  const Round merge_off = 3 * delta;
  Round slot_start = (woke / L) * L;
  Round join = slot_start + merge_off;
  if (join < woke) join += L;
  return r >= join;
}

std::vector<ValidatorIndex> Scenario::ever_adversarial() const {
  std::set<ValidatorIndex> out;
  for (const auto& c : corruption) {
    if (c.round < total_rounds()) out.insert(c.validator);
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> p;
  if (n == 0) p.push_back("n must be at least 1");
  if (delta == 0) p.push_back("delta must be at least 1");
  if (horizon == 0) p.push_back("horizon must be at least 1");
  auto check_index = [&](ValidatorIndex v, const std::string& where) {
    if (v >= n) p.push_back(where + ": validator " + std::to_string(v) + " out of range");
  };
  for (const auto& s : sleep) {
    check_index(s.validator, "sleep");
    if (s.from >= s.to) {
      p.push_back("sleep: empty interval for validator " + std::to_string(s.validator));
    }
    if (s.to > gat) {
      p.push_back("sleep: validator " + std::to_string(s.validator) +
                  " sleeps past GAT (honest validators are awake after GAT)");
    }
    if (auto c = corruption_round(s.validator); c && s.to > *c) {
      p.push_back("sleep: validator " + std::to_string(s.validator) +
                  " is asleep after its corruption (adversarial validators are always awake)");
    }
  }
  std::set<ValidatorIndex> corrupted;
  for (const auto& c : corruption) {
    check_index(c.validator, "corruption");
    if (!corrupted.insert(c.validator).second) {
      p.push_back("corruption: validator " + std::to_string(c.validator) + " listed twice");
    }
  }
  if (proposer_kind == ProposerSchedule::Kind::list) {
    if (proposer_list.empty()) p.push_back("proposer_rule: list kind needs proposers");
    for (auto v : proposer_list) check_index(v, "proposer_rule");
  }
  if (!kStrategies.contains(adversary.strategy)) {
    p.push_back("adversary: unknown strategy '" + adversary.strategy + "'");
  }
  for (const auto& g : adversary.groups) {
    for (auto v : g) check_index(v, "adversary.groups");
  }
  if (adversary.strategy == "double-finalizer") {
    if (adversary.groups.size() != 2) p.push_back("double-finalizer: needs exactly two groups");
    if (corrupted.size() < third(n)) {
      p.push_back("double-finalizer: needs at least ceil(n/3) corrupted validators");
    }
  }
  return p;
}

// ---- YAML ----

namespace {

std::optional<Slot> parse_inf(const YAML::Node& node) {
  if (!node || node.IsNull()) return std::nullopt;
  auto s = node.as<std::string>();
  if (s == "inf" || s == "infinity") return std::nullopt;
  return node.as<Slot>();
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& problems) {
  if (!node.IsMap()) {
    problems.push_back(where + ": expected a mapping");
    return;
  }
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) problems.push_back(where + ": unknown field '" + key + "'");
  }
}

ProposerSchedule::Kind parse_kind(const std::string& s) {
  if (s == "round-robin") return ProposerSchedule::Kind::round_robin;
  if (s == "seeded") return ProposerSchedule::Kind::seeded;
  if (s == "list") return ProposerSchedule::Kind::list;
  throw ScenarioError({"proposer_rule: unknown kind '" + s + "'"});
}

std::string_view kind_name(ProposerSchedule::Kind k) {
  switch (k) {
    case ProposerSchedule::Kind::round_robin: return "round-robin";
    case ProposerSchedule::Kind::seeded: return "seeded";
    case ProposerSchedule::Kind::list: return "list";
  }
  return "round-robin";
}

std::pair<Slot, Slot> parse_window(const YAML::Node& node) {
  if (!node.IsSequence() || node.size() != 2) throw ScenarioError({"adversary window must be [from, to]"});
  return {node[0].as<Slot>(), node[1].as<Slot>()};
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text) {
  Scenario sc;
  std::vector<std::string> problems;
  try {
    YAML::Node root = YAML::Load(yaml_text);
    check_keys(root,
               {"name", "n", "delta", "gst", "gat", "eta", "tau", "kappa", "horizon", "seed", "fc_mode",
                "proposer_rule", "sleep", "corruption", "adversary"},
               "scenario", problems);
    if (!problems.empty()) throw ScenarioError(problems);

    if (root["name"]) sc.name = root["name"].as<std::string>();
    if (root["n"]) sc.n = root["n"].as<std::uint32_t>();
    if (root["delta"]) sc.delta = root["delta"].as<Round>();
    if (root["gst"]) sc.gst = root["gst"].as<Round>();
    if (root["gat"]) sc.gat = root["gat"].as<Round>();
    sc.eta = parse_inf(root["eta"]);
    sc.tau = parse_inf(root["tau"]);
    if (root["kappa"]) sc.kappa = root["kappa"].as<std::uint64_t>();
    if (root["horizon"]) sc.horizon = root["horizon"].as<Slot>();
    if (root["seed"]) sc.seed = root["seed"].as<std::uint64_t>();
    if (root["fc_mode"]) {
      auto m = root["fc_mode"].as<std::string>();
      if (m == "hfc") {
        sc.fc_mode = ForkChoiceMode::hfc;
      } else if (m == "rlmd") {
        sc.fc_mode = ForkChoiceMode::rlmd;
      } else {
        problems.push_back("fc_mode: expected hfc or rlmd");
      }
    }
    if (auto pr = root["proposer_rule"]) {
      check_keys(pr, {"kind", "proposers"}, "proposer_rule", problems);
      if (pr["kind"]) sc.proposer_kind = parse_kind(pr["kind"].as<std::string>());
      if (pr["proposers"]) sc.proposer_list = pr["proposers"].as<std::vector<ValidatorIndex>>();
    }
    if (auto sl = root["sleep"]) {
      for (const auto& e : sl) {
        check_keys(e, {"validator", "from", "to"}, "sleep entry", problems);
        sc.sleep.push_back({e["validator"].as<ValidatorIndex>(), e["from"].as<Round>(), e["to"].as<Round>()});
      }
    }
    if (auto co = root["corruption"]) {
      for (const auto& e : co) {
        check_keys(e, {"validator", "round"}, "corruption entry", problems);
        sc.corruption.push_back({e["validator"].as<ValidatorIndex>(), e["round"].as<Round>()});
      }
    }
    if (auto adv = root["adversary"]) {
      check_keys(adv, {"strategy", "groups", "window_a", "window_b", "start_slot"}, "adversary", problems);
      if (adv["strategy"]) sc.adversary.strategy = adv["strategy"].as<std::string>();
      if (adv["groups"]) sc.adversary.groups = adv["groups"].as<std::vector<std::vector<ValidatorIndex>>>();
      if (adv["window_a"]) sc.adversary.window_a = parse_window(adv["window_a"]);
      if (adv["window_b"]) sc.adversary.window_b = parse_window(adv["window_b"]);
      if (adv["start_slot"]) sc.adversary.start_slot = adv["start_slot"].as<Slot>();
    }
  } catch (const YAML::Exception& e) {
    problems.push_back(std::string("yaml: ") + e.what());
  }
  if (!problems.empty()) throw ScenarioError(problems);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot open " + path.string()});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string to_yaml(const Scenario& sc) {
  YAML::Emitter out;
  auto inf = [&](const std::optional<Slot>& v) {
    if (v) {
      out << *v;
    } else {
      out << "inf";
    }
  };
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << sc.name;
  out << YAML::Key << "n" << YAML::Value << sc.n;
  out << YAML::Key << "delta" << YAML::Value << sc.delta;
  out << YAML::Key << "gst" << YAML::Value << sc.gst;
  out << YAML::Key << "gat" << YAML::Value << sc.gat;
  out << YAML::Key << "eta" << YAML::Value;
  inf(sc.eta);
  out << YAML::Key << "tau" << YAML::Value;
  inf(sc.tau);
  out << YAML::Key << "kappa" << YAML::Value << sc.kappa;
  out << YAML::Key << "horizon" << YAML::Value << sc.horizon;
  out << YAML::Key << "seed" << YAML::Value << sc.seed;
  out << YAML::Key << "fc_mode" << YAML::Value << std::string(to_string(sc.fc_mode));
  out << YAML::Key << "proposer_rule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(kind_name(sc.proposer_kind));
  if (!sc.proposer_list.empty()) {
    out << YAML::Key << "proposers" << YAML::Value << YAML::Flow << sc.proposer_list;
  }
  out << YAML::EndMap;
  out << YAML::Key << "sleep" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : sc.sleep) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "validator" << YAML::Value << s.validator
        << YAML::Key << "from" << YAML::Value << s.from << YAML::Key << "to" << YAML::Value << s.to
        << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "corruption" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : sc.corruption) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "validator" << YAML::Value << c.validator
        << YAML::Key << "round" << YAML::Value << c.round << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "adversary" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "strategy" << YAML::Value << sc.adversary.strategy;
  out << YAML::Key << "groups" << YAML::Value << YAML::Flow << sc.adversary.groups;
  out << YAML::Key << "window_a" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << sc.adversary.window_a.first << sc.adversary.window_a.second << YAML::EndSeq;
  out << YAML::Key << "window_b" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << sc.adversary.window_b.first << sc.adversary.window_b.second << YAML::EndSeq;
  out << YAML::Key << "start_slot" << YAML::Value << sc.adversary.start_slot;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace ssf
