// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "trusttoken/scenarios.hpp"

#include <algorithm>

#include "catch2/catch_amalgamated.hpp"
#include "trusttoken/report.hpp"

using namespace trusttoken;

namespace {

ActionOutcome find_action(const ScenarioOutcome& outcome,
                          const std::string& label) {
  for (const auto& a : outcome.per_action) {
    if (a.label == label) return a;
  }
  FAIL("no action labeled " + label);
  return {};
}

}  // namespace

TEST_CASE("legit_flow grants every honest access") {
  const ScenarioOutcome o = run_scenario(legit_flow(), 1);
  CHECK(o.passed);
  CHECK(o.breach_count == 0);
  CHECK(o.false_denial_count == 0);
  for (const auto& a : o.per_action) {
    CHECK(a.observed_decision == Decision::Granted);
    CHECK(a.observed_cycles == 2);  // reference cores are all HIGH
  }
}

TEST_CASE("case1_id_spoof blocks the credential replay") {
  const ScenarioOutcome o = run_scenario(case1_id_spoof(), 1);
  CHECK(o.passed);
  CHECK(o.breach_count == 0);
  CHECK(o.false_denial_count == 0);

  CHECK(find_action(o, "spoof-foreign-id-and-token").observed_reason ==
        Reason::TokenMismatch);
  CHECK(find_action(o, "spoof-correct-id-foreign-token").observed_reason ==
        Reason::ChannelDisabled);
  CHECK(find_action(o, "victim-channel-latched").observed_reason ==
        Reason::ChannelDisabled);
  CHECK(find_action(o, "attacker-own-channel-still-up").observed_decision ==
        Decision::Granted);

  // The audit log records exactly the denied transactions.
  LogFilter denied;
  denied.decision = Decision::Denied;
  size_t denied_logged = 0;
  for (const auto& e : o.log_excerpt) {
    if (denied.matches(e)) ++denied_logged;
  }
  size_t denied_observed = 0;
  for (const auto& a : o.per_action) {
    if (a.kind == ActionKind::Transaction &&
        a.observed_decision == Decision::Denied) {
      ++denied_observed;
    }
  }
  CHECK(denied_logged == denied_observed);
}

TEST_CASE("case2_access_control_tamper ignores presented protection bits") {
  const ScenarioOutcome o = run_scenario(case2_access_control_tamper(), 1);
  CHECK(o.passed);
  CHECK(o.breach_count == 0);
  CHECK(o.false_denial_count == 0);

  CHECK(find_action(o, "forge-integrity-low-on-protected").observed_reason ==
        Reason::TokenMismatch);
  const ActionOutcome low = find_action(o, "forge-integrity-high-on-low");
  CHECK(low.observed_decision == Decision::Granted);
  CHECK(low.observed_cycles == 1);
}

TEST_CASE("case3_integrity_tamper requires the token for downgrades") {
  const ScenarioOutcome o = run_scenario(case3_integrity_tamper(), 1);
  CHECK(o.passed);
  CHECK(o.breach_count == 0);
  CHECK(o.false_denial_count == 0);

  CHECK(find_action(o, "tamper-no-token").observed_reason ==
        Reason::IntegrityTamper);
  CHECK(find_action(o, "tamper-garbage-token").observed_reason ==
        Reason::IntegrityTamper);
  const ActionOutcome open_access = find_action(o, "low-core-open-access");
  CHECK(open_access.observed_decision == Decision::Granted);
  CHECK(open_access.observed_cycles == 1);
  CHECK(find_action(o, "protection-rearmed").observed_reason ==
        Reason::TokenMismatch);
}

TEST_CASE("trojan_leak is caught by the source binding") {
  const ScenarioOutcome o = run_scenario(trojan_leak(), 1);
  CHECK(o.passed);
  CHECK(o.breach_count == 0);
  CHECK(o.false_denial_count == 0);

  CHECK(find_action(o, "trojan-overwrite-foreign-channel").observed_reason ==
        Reason::BindingViolation);
  CHECK(find_action(o, "trojan-self-access").observed_decision ==
        Decision::Granted);
  CHECK(find_action(o, "target-recovers-for-bound-app").observed_decision ==
        Decision::Granted);
}

TEST_CASE("suite-wide properties across seeds") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    for (const auto& name : scenario_names()) {
      const ScenarioOutcome o =
          run_scenario(build_scenario(name, reference_topology()), seed);
      INFO("scenario " << name << " seed " << seed);
      REQUIRE(o.passed);
      REQUIRE(o.breach_count == 0);
      REQUIRE(o.false_denial_count == 0);
    }
  }
}

TEST_CASE("scenario outcomes are deterministic in the seed") {
  const Scenario s = case1_id_spoof();
  const RunConfig cfg;
  const std::vector<ScenarioOutcome> a = {run_scenario(s, 9)};
  const std::vector<ScenarioOutcome> b = {run_scenario(s, 9)};
  CHECK(render_scenario_report(cfg, a, std::nullopt) ==
        render_scenario_report(cfg, b, std::nullopt));

  // A different seed provisions different tokens (visible on the honest
  // transactions in the log) even though the adjudicated decisions are the
  // same either way.
  const std::vector<ScenarioOutcome> c = {run_scenario(s, 10)};
  REQUIRE_FALSE(a[0].log_excerpt.empty());
  CHECK(a[0].log_excerpt[0].transaction.token_signal !=
        c[0].log_excerpt[0].transaction.token_signal);
}

TEST_CASE("scenario validation happens before execution") {
  SECTION("missing roles in the topology") {
    TopologySpec t = reference_topology();
    t.cores.erase(t.cores.begin() + 3);  // drop the RSA core
    CHECK_THROWS_AS(case1_id_spoof(t), ValidationError);
  }

  SECTION("empty name or script") {
    Scenario s;
    s.topology = reference_topology();
    CHECK_THROWS_AS(run_scenario(s, 1), ValidationError);
    s.name = "x";
    CHECK_THROWS_AS(run_scenario(s, 1), ValidationError);
  }

  SECTION("action referencing an unknown core") {
    Scenario s = legit_flow();
    s.script.push_back({"bogus", ActionClass::Demo,
                        TxnAction{SourceId::app(AppId{1}), IpCoreId{99}},
                        {Decision::Denied, {}}});
    CHECK_THROWS_AS(run_scenario(s, 1), ValidationError);
  }

  SECTION("action with an undeclared source") {
    Scenario s = legit_flow();
    s.script.push_back({"bogus-src", ActionClass::Demo,
                        TxnAction{SourceId::app(AppId{99}), IpCoreId{1}},
                        {Decision::Denied, {}}});
    CHECK_THROWS_AS(run_scenario(s, 1), ValidationError);
  }
}

TEST_CASE("compare_models reproduces the protection-bit weakness") {
  const ComparisonReport r = compare_models(1);
  CHECK(r.passed);
  CHECK(r.baseline_breaches >= 1);
  CHECK(r.trusttoken_breaches == 0);
  CHECK(r.baseline_false_denials == 0);
  CHECK(r.trusttoken_false_denials == 0);

  bool saw_forged = false;
  for (const auto& a : r.actions) {
    if (a.forged) {
      saw_forged = true;
      CHECK(a.baseline == Decision::Granted);    // vulnerability reproduced
      CHECK(a.trusttoken == Decision::Denied);   // attack stopped
    } else {
      CHECK(a.baseline == Decision::Granted);
      CHECK(a.trusttoken == Decision::Granted);
    }
  }
  CHECK(saw_forged);

  for (uint64_t seed = 2; seed <= 5; ++seed) {
    REQUIRE(compare_models(seed).passed);
  }
}

TEST_CASE("cycle contract holds across the bundled suite") {
  for (const auto& name : scenario_names()) {
    const ScenarioOutcome o =
        run_scenario(build_scenario(name, reference_topology()), 4);
    for (const auto& a : o.per_action) {
      if (a.kind == ActionKind::Admin) continue;
      if (a.observed_decision != Decision::Granted) continue;
      INFO("scenario " << name << " action " << a.label);
      REQUIRE(a.observed_cycles ==
              (a.dest_integrity == IntegrityLevel::High ? 2 : 1));
    }
  }
}
