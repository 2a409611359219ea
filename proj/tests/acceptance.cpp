// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Every tolerance is pinned here, in code.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "trusttoken/commands.hpp"
#include "trusttoken/report.hpp"
#include "trusttoken/scenarios.hpp"

using namespace trusttoken;

namespace {

namespace fs = std::filesystem;

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Shared population run for criteria 1-4: 100 devices, default config, one
// challenge, 100 noisy trials.
const PufQualityReport& population() {
  static const PufQualityReport report = [] {
    const PufConfig config;
    return quality_report(100, {PufChallenge{0x5A5A}}, 100, 20260809,
                          config);
  }();
  return report;
}

CriterionResult criterion1_uniqueness() {
  const auto start = std::chrono::steady_clock::now();
  const PufQualityReport& q = population();
  const double elapsed = seconds_since(start);
  const bool in_window = q.uniqueness >= 0.45 && q.uniqueness <= 0.55;
  const bool in_time = elapsed < 10.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean pairwise HD %.6f in [0.45, 0.55], %.2fs (< 10s)",
                q.uniqueness, elapsed);
  return {in_window && in_time, buf};
}

CriterionResult criterion2_uniformity() {
  const PufQualityReport& q = population();
  char buf[96];
  std::snprintf(buf, sizeof(buf), "mean fraction of ones %.6f in [0.44, 0.56]",
                q.uniformity);
  return {q.uniformity >= 0.44 && q.uniformity <= 0.56, buf};
}

CriterionResult criterion3_reliability() {
  const PufQualityReport& q = population();
  const bool noisy_ok = q.reliability >= 0.99;

  PufConfig quiet;
  quiet.sigma_noise = 0.0;
  const OscillatorArray device = new_device(424242, quiet);
  const double noiseless = reliability(device, PufChallenge{0x77}, 100, quiet);

  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "mean reliability %.6f (>= 0.99), noiseless %.6f (== 1.0)",
                q.reliability, noiseless);
  return {noisy_ok && noiseless == 1.0, buf};
}

CriterionResult criterion4_hd_distribution() {
  const PufQualityReport& q = population();
  const double mass = hd_mass_in_window(q, 0.40, 0.60);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.4f of pairwise HDs in [0.40, 0.60] (>= 0.95)",
                mass);
  return {mass >= 0.95, buf};
}

CriterionResult criterion5_zero_breach() {
  const auto start = std::chrono::steady_clock::now();
  int breaches = 0, false_denials = 0, failed_scripts = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    for (const auto& name : scenario_names()) {
      const ScenarioOutcome o =
          run_scenario(build_scenario(name, reference_topology()), seed);
      breaches += o.breach_count;
      false_denials += o.false_denial_count;
      if (!o.passed) ++failed_scripts;
    }
  }
  const double elapsed = seconds_since(start);
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "10 seeds x 5 scenarios: %d breaches, %d false denials, "
                "%d script mismatches, %.2fs (< 5s)",
                breaches, false_denials, failed_scripts, elapsed);
  return {breaches == 0 && false_denials == 0 && failed_scripts == 0 &&
              elapsed < 5.0,
          buf};
}

CriterionResult criterion6_baseline_comparison() {
  int runs_ok = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const ComparisonReport r = compare_models(seed);
    if (r.baseline_breaches >= 1 && r.trusttoken_breaches == 0 &&
        r.baseline_false_denials == 0 && r.trusttoken_false_denials == 0) {
      ++runs_ok;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "%d/10 runs: baseline breached (>=1 grant), trusttoken 0 grants",
                runs_ok);
  return {runs_ok == 10, buf};
}

CriterionResult criterion7_mediation_oracle() {
  const auto start = std::chrono::steady_clock::now();

  PufConfig config;
  config.oscillator_count = 8;
  config.response_width = 4;  // 4-bit tokens
  config.challenge_width = 8;

  TopologySpec topo;
  topo.cores = {{IpCoreId{1}, CoreKind::Aes, IntegrityLevel::High},
                {IpCoreId{2}, CoreKind::Des, IntegrityLevel::High},
                {IpCoreId{3}, CoreKind::Trng, IntegrityLevel::Low}};
  topo.apps = {AppId{1}, AppId{2}};
  topo.bindings = {{AppId{1}, IpCoreId{1}}, {AppId{2}, IpCoreId{2}}};

  Fabric fabric = make_fabric(topo);
  Controller controller;
  controller.provision(fabric, new_device(12, config), config, 34);

  const std::vector<SourceId> sources = {
      SourceId::app(AppId{1}), SourceId::app(AppId{2}),
      SourceId::core(IpCoreId{1}), SourceId::core(IpCoreId{2}),
      SourceId::core(IpCoreId{3})};
  const std::vector<IpCoreId> cores = {IpCoreId{1}, IpCoreId{2}, IpCoreId{3}};

  size_t probes = 0, mismatches = 0;
  for (uint64_t token = 0; token < 16; ++token) {
    BitString token_bits(4);
    for (size_t i = 0; i < 4; ++i) token_bits.set(i, (token >> i) & 1);
    for (const auto& source : sources) {
      for (const auto& dest : cores) {
        for (const auto& id : cores) {
          BusTransaction txn;
          txn.source = source;
          txn.dest = dest;
          txn.id_signal = id;
          txn.token_signal = token_bits;

          // Brute-force ground truth, evaluated from the provisioning data.
          bool expected;
          if (controller.table().integrity.at(dest) == IntegrityLevel::Low) {
            expected = true;
          } else {
            const TokenEntry& entry = controller.table().entries.at(dest);
            expected = token_bits == entry.token && id == dest &&
                       entry.allowed_sources.contains(source);
          }

          const bool granted =
              controller.authorize(txn).decision == Decision::Granted;
          if (granted != expected) ++mismatches;
          ++probes;
          controller.reenable_channel(dest);
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu enumerated probes, %zu grant-set mismatches, %.3fs (< 1s)",
                probes, mismatches, elapsed);
  return {mismatches == 0 && elapsed < 1.0, buf};
}

CriterionResult criterion8_determinism() {
  const fs::path dir =
      fs::temp_directory_path() / "ttsim_acceptance_determinism";
  fs::create_directories(dir);
  std::ostringstream sink;

  RunConfig puf_cfg;
  puf_cfg.population.device_count = 30;
  puf_cfg.population.trial_count = 20;
  puf_cfg.output_path = (dir / "puf.txt").string();
  cmd_puf_eval(puf_cfg, sink);
  const std::string puf_first = slurp(dir / "puf.txt");
  cmd_puf_eval(puf_cfg, sink);
  const bool puf_same = slurp(dir / "puf.txt") == puf_first;

  RunConfig scen_cfg;
  scen_cfg.output_path = (dir / "scen.txt").string();
  cmd_run_scenarios(scen_cfg, sink);
  const std::string scen_first = slurp(dir / "scen.txt");
  cmd_run_scenarios(scen_cfg, sink);
  const bool scen_same = slurp(dir / "scen.txt") == scen_first;

  fs::remove_all(dir);
  std::string detail = std::string("puf-eval ") +
                       (puf_same ? "byte-identical" : "DIFFERS") +
                       ", run-scenarios " +
                       (scen_same ? "byte-identical" : "DIFFERS");
  return {puf_same && scen_same, detail};
}

CriterionResult criterion9_cycle_contract() {
  size_t grants = 0, violations = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    for (const auto& name : scenario_names()) {
      const ScenarioOutcome o =
          run_scenario(build_scenario(name, reference_topology()), seed);
      for (const auto& a : o.per_action) {
        if (a.kind == ActionKind::Admin) continue;
        if (a.observed_decision != Decision::Granted) continue;
        ++grants;
        const int expected =
            a.dest_integrity == IntegrityLevel::High ? 2 : 1;
        if (a.observed_cycles != expected) ++violations;
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "%zu grants checked, %zu cycle-count violations (HIGH=2, LOW=1)",
                grants, violations);
  return {grants > 0 && violations == 0, buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<CriterionResult()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "PUF uniqueness", criterion1_uniqueness},
      {2, "PUF randomness/uniformity", criterion2_uniformity},
      {3, "PUF reliability", criterion3_reliability},
      {4, "Hamming-distance distribution", criterion4_hd_distribution},
      {5, "Attack suite zero-breach", criterion5_zero_breach},
      {6, "Baseline comparison", criterion6_baseline_comparison},
      {7, "Mediation oracle", criterion7_mediation_oracle},
      {8, "Determinism", criterion8_determinism},
      {9, "Cycle contract", criterion9_cycle_contract},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    CriterionResult result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    if (!result.pass) ++failures;
    std::printf("%s  criterion %d: %s — %s\n", result.pass ? "PASS" : "FAIL",
                c.id, c.title, result.detail.c_str());
  }
  if (failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("%d criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
