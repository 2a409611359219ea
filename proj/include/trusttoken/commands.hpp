// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_COMMANDS_HPP
#define TRUSTTOKEN_COMMANDS_HPP

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trusttoken/config.hpp"
#include "trusttoken/report.hpp"
#include "trusttoken/scenarios.hpp"

namespace trusttoken {

// Exit codes shared by the commands and the CLI wrapper.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAcceptanceFailure = 1;
inline constexpr int kExitValidationError = 2;
inline constexpr int kExitIoError = 3;

namespace cmddetail {

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing output file: " + path);
}

}  // namespace cmddetail

/// The distinct challenges a population run evaluates; drawn from the seed,
/// deduplicated so small challenge spaces still work.
inline std::vector<PufChallenge> population_challenges(uint64_t seed,
                                                       uint32_t count,
                                                       const PufConfig& config) {
  if (count > config.challenge_space()) {
    throw CapacityError("challenge_count exceeds the challenge space");
  }
  std::vector<PufChallenge> out;
  std::set<uint64_t> seen;
  for (uint64_t i = 0; out.size() < count; ++i) {
    const uint64_t v =
        derive_seed(seed, seed_domain::kChallenge, i) & config.challenge_mask();
    if (seen.insert(v).second) out.push_back(PufChallenge{v});
  }
  return out;
}

/// puf-eval: characterize a simulated device population and write the report
/// (metrics plus the raw pairwise-HD sample). Exit 0 iff every metric falls
/// inside the configured acceptance window.
inline int cmd_puf_eval(const RunConfig& cfg, std::ostream& console) {
  cfg.puf.validate();
  const auto challenges = population_challenges(
      cfg.seed, cfg.population.challenge_count, cfg.puf);
  const PufQualityReport q =
      quality_report(cfg.population.device_count, challenges,
                     cfg.population.trial_count, cfg.seed, cfg.puf);
  const bool accepted = puf_accepted(q, cfg.windows);

  const std::string path =
      cfg.output_path.empty() ? "puf_report.txt" : cfg.output_path;
  cmddetail::write_file(path, render_puf_report(cfg, q, accepted));

  console << "puf-eval: " << q.device_count << " devices, "
          << challenges.size() << " challenge(s), " << q.trial_count
          << " trials (seed " << cfg.seed << ")\n";
  console << "  uniqueness  " << format_fixed(q.uniqueness, 6) << "  window ["
          << format_fixed(cfg.windows.uniqueness_lo, 2) << ", "
          << format_fixed(cfg.windows.uniqueness_hi, 2) << "]\n";
  console << "  uniformity  " << format_fixed(q.uniformity, 6) << "  window ["
          << format_fixed(cfg.windows.uniformity_lo, 2) << ", "
          << format_fixed(cfg.windows.uniformity_hi, 2) << "]\n";
  console << "  reliability " << format_fixed(q.reliability, 6) << "  min "
          << format_fixed(cfg.windows.reliability_min, 2) << "\n";
  console << "  hd mass     "
          << format_fixed(hd_mass_in_window(q, cfg.windows.hd_lo, cfg.windows.hd_hi), 6)
          << "  min " << format_fixed(cfg.windows.hd_mass_min, 2) << "\n";
  console << "  report " << path << "\n";
  console << (accepted ? "ACCEPTED" : "REJECTED") << "\n";
  return accepted ? kExitOk : kExitAcceptanceFailure;
}

namespace cmddetail {

/// Applies testing.invert_expectation to a built scenario, if it names it.
inline void apply_testing_overrides(Scenario& scenario,
                                    const TestingOverrides& testing) {
  if (testing.invert_expectation.empty()) return;
  const auto colon = testing.invert_expectation.rfind(':');
  const std::string name = testing.invert_expectation.substr(0, colon);
  if (name != scenario.name) return;
  const size_t index = std::stoull(testing.invert_expectation.substr(colon + 1));
  if (index >= scenario.script.size()) {
    throw ValidationError("testing.invert_expectation: action index " +
                          std::to_string(index) + " out of range for " + name);
  }
  Expectation& e = scenario.script[index].expect;
  e.decision = e.decision == Decision::Granted ? Decision::Denied
                                               : Decision::Granted;
  e.reasons.clear();
}

}  // namespace cmddetail

/// run-scenarios: execute the selected attack/workload scenarios (and the
/// baseline comparison when selected) and write the report. Exit 0 iff every
/// scenario matched its script.
inline int cmd_run_scenarios(const RunConfig& cfg, std::ostream& console) {
  const std::vector<std::string> selected = resolve_scenarios(cfg);

  std::vector<ScenarioOutcome> outcomes;
  std::optional<ComparisonReport> comparison;
  bool all_passed = true;

  for (const auto& name : selected) {
    if (name == "compare_models") {
      comparison = compare_models(cfg.seed, cfg.topology);
      all_passed = all_passed && comparison->passed;
      console << "comparison " << (comparison->passed ? "PASS" : "FAIL")
              << " (baseline breaches " << comparison->baseline_breaches
              << ", trusttoken breaches " << comparison->trusttoken_breaches
              << ")\n";
      continue;
    }
    Scenario scenario = build_scenario(name, cfg.topology);
    cmddetail::apply_testing_overrides(scenario, cfg.testing);
    const ScenarioOutcome outcome = run_scenario(scenario, cfg.seed);
    all_passed = all_passed && outcome.passed;
    console << "scenario " << outcome.name << " "
            << (outcome.passed ? "PASS" : "FAIL") << "\n";
    if (!outcome.passed) {
      for (const auto& a : outcome.per_action) {
        if (!a.matched) {
          console << "  mismatch at action '" << a.label << "': expected "
                  << repdetail::expectation_text(a.expected) << ", observed "
                  << to_string(a.observed_decision) << "/"
                  << to_string(a.observed_reason) << "\n";
        }
      }
    }
    outcomes.push_back(outcome);
  }

  const std::string path =
      cfg.output_path.empty() ? "scenario_report.txt" : cfg.output_path;
  cmddetail::write_file(path, render_scenario_report(cfg, outcomes, comparison));
  console << "report " << path << "\n";
  console << (all_passed ? "ALL PASSED" : "FAILURES PRESENT") << "\n";
  return all_passed ? kExitOk : kExitAcceptanceFailure;
}

/// report: consolidate previously written report files onto stdout.
/// Read-only; order of inputs does not affect the output.
inline int cmd_report(const std::vector<std::string>& inputs,
                      std::ostream& out) {
  if (inputs.empty()) {
    throw ValidationError("report: no input files given");
  }
  std::vector<ParsedReport> reports;
  reports.reserve(inputs.size());
  for (const auto& path : inputs) reports.push_back(load_report(path));
  out << render_consolidated(std::move(reports));
  return kExitOk;
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_COMMANDS_HPP
