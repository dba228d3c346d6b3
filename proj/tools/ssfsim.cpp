// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run scenarios, check traces, scan for slashable
// behavior. Exit codes: 0 all checks pass, 1 property violation, 2 usage or
// validation error.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ssf/codec.hpp"
#include "ssf/harness.hpp"
#include "ssf/simnet.hpp"
#include "ssf/slasher.hpp"

namespace {

using namespace ssf;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  return Trace::read(in);
}

void print(const std::string& name, const Verdict& v) {
  std::cout << to_string(v.outcome) << " " << name;
  if (!v.detail.empty()) std::cout << ": " << v.detail;
  std::cout << "\n";
}

int cmd_run(const std::string& file, std::optional<std::uint64_t> seed, const std::string& trace_out,
            const std::string& fc) {
  Scenario sc = load_scenario(file);
  if (seed) sc.seed = *seed;
  if (fc == "rlmd") sc.fc_mode = ForkChoiceMode::rlmd;
  else if (fc == "hfc") sc.fc_mode = ForkChoiceMode::hfc;
  Trace tr = run(sc);
  if (!trace_out.empty()) {
    if (trace_out == "-") {
      tr.write(std::cout);
    } else {
      std::ofstream out(trace_out);
      if (!out) throw std::runtime_error("cannot write '" + trace_out + "'");
      tr.write(out);
    }
  }
  auto& log = trace_out == "-" ? std::cerr : std::cout;
  TraceIndex ix(tr);
  log << "scenario " << sc.name << ": n=" << sc.n << " slots=" << sc.horizon << " seed=" << sc.seed
      << " records=" << tr.records.size() << "\n";
  int rc = kOk;
  for (const char* name : {"safety-fin", "prefix", "accountability"}) {
    auto v = run_check(name, ix);
    log << to_string(v.outcome) << " " << name << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    if (v.failed()) rc = kViolation;
  }
  return rc;
}

int cmd_check(const std::string& property, const std::string& trace_file) {
  Trace tr = load_trace(trace_file);
  TraceIndex ix(tr);
  std::vector<std::string> names;
  if (property == "all") names = trace_property_names();
  else names.push_back(property);
  int rc = kOk;
  for (const auto& n : names) {
    auto v = run_check(n, ix);
    print(n, v);
    if (v.failed()) rc = kViolation;
  }
  return rc;
}

int cmd_equivalence(const std::string& file) {
  auto v = check_equivalence(load_scenario(file));
  print("equivalence", v);
  return v.failed() ? kViolation : kOk;
}

int cmd_slash_scan(const std::string& trace_file) {
  Trace tr = load_trace(trace_file);
  std::vector<MessagePtr> pool;
  for (const auto& r : tr.records) {
    if (r.kind == RecordKind::send) pool.push_back(r.message);
  }
  auto found = scan(pool);
  for (const auto& v : found) {
    std::cout << to_string(v.kind) << " offender=" << v.offender << " first=" << v.first->id().hex()
              << " second=" << v.second->id().hex() << "\n";
  }
  std::cout << found.size() << " violation(s)\n";
  return found.empty() ? kOk : kViolation;
}

int cmd_compliance(const std::string& file) {
  Scenario sc = load_scenario(file);
  if (auto problems = sc.validate(); !problems.empty()) throw ScenarioError(problems);
  auto rep = check_compliance(sc);
  for (auto t : rep.failing_slots) std::cout << "slot " << t << ": participation condition fails\n";
  std::cout << "head-vote equivocators: " << rep.head_equivocators.size() << " (limit " << third(sc.n) << ")\n";
  std::cout << (rep.compliant() ? "PASS" : "FAIL") << " compliance\n";
  return rep.compliant() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-slot-finality protocol simulator and checker"};
  app.require_subcommand(1);

  std::string scenario_file, trace_file, trace_out, property, fc;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and check core invariants");
  run_cmd->add_option("scenario", scenario_file, "Scenario YAML file")->required();
  run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--trace", trace_out, "Write the trace to this file ('-' for stdout)");
  run_cmd->add_option("--fc", fc, "Override the fork-choice mode")->check(CLI::IsMember({"hfc", "rlmd"}));

  auto* check_cmd = app.add_subcommand("check", "Evaluate a property over a stored trace");
  check_cmd->add_option("property", property, "Property name or 'all'")->required();
  check_cmd->add_option("--trace", trace_file, "Trace file")->required();

  auto* eq_cmd = app.add_subcommand("equivalence", "Compare runs under both fork-choice modes");
  eq_cmd->add_option("scenario", scenario_file, "Scenario YAML file")->required();

  auto* slash_cmd = app.add_subcommand("slash-scan", "List slashable violations in a trace");
  slash_cmd->add_option("--trace", trace_file, "Trace file")->required();

  auto* comp_cmd = app.add_subcommand("compliance", "Check the participation and equivocation conditions");
  comp_cmd->add_option("scenario", scenario_file, "Scenario YAML file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(scenario_file, seed, trace_out, fc);
    if (*check_cmd) return cmd_check(property, trace_file);
    if (*eq_cmd) return cmd_equivalence(scenario_file);
    if (*slash_cmd) return cmd_slash_scan(trace_file);
    if (*comp_cmd) return cmd_compliance(scenario_file);
  } catch (const ScenarioError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& p : e.problems) std::cerr << "  " << p << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
