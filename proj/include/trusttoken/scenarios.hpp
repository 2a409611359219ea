// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_SCENARIOS_HPP
#define TRUSTTOKEN_SCENARIOS_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trusttoken/baseline.hpp"
#include "trusttoken/controller.hpp"
#include "trusttoken/fabric.hpp"
#include "trusttoken/puf.hpp"

namespace trusttoken {

// ---------------------------------------------------------------------------
// Scenario scripting model
//
// Scripts are symbolic: tokens and ids are named by role (the destination's
// correct token, some other core's token, garbage, absent) and resolved
// against the freshly provisioned fabric when the scenario runs. Honest
// actions go through present_transaction; everything else is constructed
// directly, which is exactly what a bus-level adversary can do.

/// How an action is adjudicated by the suite-wide properties. Attack actions
/// count as breaches when granted; honest actions count as false denials
/// when denied; demo actions document behavior (authorized downgrades,
/// accesses to unprotected LOW cores, administrative recovery) and are held
/// only to their per-action expectation.
enum class ActionClass : uint8_t { Honest, Attack, Demo };

enum class ActionKind : uint8_t { Transaction, Tamper, Admin };

enum class TokenSpec : uint8_t {
  Wrapper,         // honest: copy whatever the destination wrapper holds
  Absent,          // no token presented
  Garbage,         // random bits of the right width
  CorrectForDest,  // the destination's real token (forged id/source paths)
  OfCore,          // another core's token, lifted from its wrapper
};

enum class IdSpec : uint8_t { Dest, OfCore };

struct TxnAction {
  SourceId source;
  IpCoreId dest;
  BusOp op = BusOp::Read;
  uint32_t address = 0;
  uint32_t data = 0;
  TokenSpec token_spec = TokenSpec::Wrapper;
  IpCoreId token_core;  // used when token_spec == OfCore
  IdSpec id_spec = IdSpec::Dest;
  IpCoreId id_core;     // used when id_spec == OfCore
  std::optional<IntegrityLevel> presented_integrity;  // forged when set
};

struct TamperAction {
  IpCoreId target;
  IntegrityLevel new_level = IntegrityLevel::Low;
  TokenSpec token_spec = TokenSpec::Absent;  // Absent/Garbage/CorrectForDest
};

struct AdminAction {
  IpCoreId reenable;  // scenario teardown: lift a latched channel
};

struct Expectation {
  Decision decision = Decision::Granted;
  std::vector<Reason> reasons;  // empty: any reason acceptable

  bool matches(Decision d, Reason r) const {
    if (d != decision) return false;
    if (reasons.empty()) return true;
    return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
  }
};

struct Action {
  std::string label;
  ActionClass cls = ActionClass::Honest;
  std::variant<TxnAction, TamperAction, AdminAction> body;
  Expectation expect;
};

struct Scenario {
  std::string name;
  TopologySpec topology;
  PufConfig puf;  // provisioning parameters
  std::vector<Action> script;
};

struct ActionOutcome {
  std::string label;
  ActionClass cls = ActionClass::Honest;
  ActionKind kind = ActionKind::Transaction;
  Expectation expected;
  Decision observed_decision = Decision::Denied;
  Reason observed_reason = Reason::Ok;
  int observed_cycles = 0;
  IntegrityLevel dest_integrity = IntegrityLevel::High;  // before the action
  bool matched = false;
};

struct ScenarioOutcome {
  std::string name;
  bool passed = false;
  std::vector<ActionOutcome> per_action;
  std::vector<EventLogEntry> log_excerpt;
  int breach_count = 0;        // attack actions that were granted
  int false_denial_count = 0;  // honest actions that were denied
};

// ---------------------------------------------------------------------------
// Topology role resolution

namespace detail {

inline uint64_t name_hash(const std::string& name) {
  uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline const CoreSpec* find_core_of_kind(const TopologySpec& topology,
                                         CoreKind kind) {
  for (const auto& c : topology.cores) {
    if (c.kind == kind) return &c;
  }
  return nullptr;
}

inline CoreSpec require_core_of_kind(const TopologySpec& topology,
                                     CoreKind kind, const std::string& who) {
  const CoreSpec* c = find_core_of_kind(topology, kind);
  if (c == nullptr) {
    throw ValidationError(who + ": topology has no " +
                          std::string(to_string(kind)) + " core");
  }
  return *c;
}

inline std::optional<AppId> app_bound_to(const TopologySpec& topology,
                                         IpCoreId core) {
  for (const auto& [app, bound] : topology.bindings) {
    if (bound == core) return app;
  }
  return std::nullopt;
}

inline AppId require_bound_app(const TopologySpec& topology, IpCoreId core,
                               const std::string& who) {
  auto app = app_bound_to(topology, core);
  if (!app) {
    throw ValidationError(who + ": no application bound to core " +
                          std::to_string(core.value));
  }
  return *app;
}

inline std::optional<AppId> unbound_app(const TopologySpec& topology) {
  for (const auto& app : topology.apps) {
    bool bound = false;
    for (const auto& [a, _] : topology.bindings) {
      if (a == app) bound = true;
    }
    if (!bound) return app;
  }
  return std::nullopt;
}

inline uint8_t next_free_core_id(const TopologySpec& topology) {
  uint8_t max = 0;
  for (const auto& c : topology.cores) max = std::max(max, c.id.value);
  return static_cast<uint8_t>(max + 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario execution

namespace detail {

inline void validate_scenario(const Scenario& s) {
  if (s.name.empty()) throw ValidationError("scenario has no name");
  if (s.script.empty()) {
    throw ValidationError("scenario " + s.name + " has an empty script");
  }
  std::set<uint8_t> core_ids;
  for (const auto& c : s.topology.cores) core_ids.insert(c.id.value);
  std::set<uint8_t> app_ids;
  for (const auto& a : s.topology.apps) app_ids.insert(a.value);

  auto check_core = [&](IpCoreId id, const std::string& what) {
    if (!core_ids.contains(id.value)) {
      throw ValidationError("scenario " + s.name + ": " + what +
                            " references unknown core " +
                            std::to_string(id.value));
    }
  };
  auto check_source = [&](SourceId src, const std::string& what) {
    const bool known = src.kind == SourceId::Kind::App
                           ? app_ids.contains(src.value)
                           : core_ids.contains(src.value);
    if (!known) {
      throw ValidationError("scenario " + s.name + ": " + what +
                            " has undeclared source " + to_string(src));
    }
  };

  for (const auto& action : s.script) {
    if (action.label.empty()) {
      throw ValidationError("scenario " + s.name + " has an unlabeled action");
    }
    if (const auto* txn = std::get_if<TxnAction>(&action.body)) {
      check_core(txn->dest, action.label);
      check_source(txn->source, action.label);
      if (txn->token_spec == TokenSpec::OfCore)
        check_core(txn->token_core, action.label);
      if (txn->id_spec == IdSpec::OfCore)
        check_core(txn->id_core, action.label);
    } else if (const auto* tamper = std::get_if<TamperAction>(&action.body)) {
      check_core(tamper->target, action.label);
    } else if (const auto* admin = std::get_if<AdminAction>(&action.body)) {
      check_core(admin->reenable, action.label);
    }
  }
}

inline std::optional<BitString> resolve_token(
    TokenSpec spec, IpCoreId dest, IpCoreId token_core, const Fabric& fabric,
    const Controller& controller, const PufConfig& config, Rng& garbage_rng) {
  switch (spec) {
    case TokenSpec::Wrapper:
      return fabric.wrapper(dest).stored_token;
    case TokenSpec::Absent:
      return std::nullopt;
    case TokenSpec::Garbage:
      return BitString::random(config.response_width, garbage_rng);
    case TokenSpec::CorrectForDest: {
      auto it = controller.table().entries.find(dest);
      if (it == controller.table().entries.end()) return std::nullopt;
      return it->second.token;
    }
    case TokenSpec::OfCore:
      return fabric.wrapper(token_core).stored_token;
  }
  return std::nullopt;
}

}  // namespace detail

/// Executes one scenario on a fresh fabric and controller. Deterministic in
/// (scenario, seed): the PUF device, provisioning challenges and any garbage
/// tokens all derive from the seed and the scenario name.
inline ScenarioOutcome run_scenario(const Scenario& scenario, uint64_t seed) {
  detail::validate_scenario(scenario);

  const uint64_t tag = detail::name_hash(scenario.name);
  Fabric fabric = make_fabric(scenario.topology);
  const OscillatorArray device = new_device(
      derive_seed(seed, seed_domain::kScenarioDevice, tag), scenario.puf);
  Controller controller;
  controller.provision(fabric, device, scenario.puf,
                       derive_seed(seed, seed_domain::kScenarioProvision, tag));
  Rng garbage_rng(derive_seed(seed, seed_domain::kScenarioGarbage, tag));

  ScenarioOutcome outcome;
  outcome.name = scenario.name;

  uint64_t tick = 0;
  for (const auto& action : scenario.script) {
    ActionOutcome record;
    record.label = action.label;
    record.cls = action.cls;
    record.expected = action.expect;

    if (const auto* txn_spec = std::get_if<TxnAction>(&action.body)) {
      record.kind = ActionKind::Transaction;
      record.dest_integrity = controller.table().integrity.at(txn_spec->dest);

      BusTransaction txn;
      const bool honest = txn_spec->token_spec == TokenSpec::Wrapper &&
                          txn_spec->id_spec == IdSpec::Dest &&
                          !txn_spec->presented_integrity;
      if (honest) {
        txn = present_transaction(txn_spec->source, txn_spec->dest,
                                  txn_spec->op, txn_spec->address,
                                  txn_spec->data,
                                  fabric.wrapper(txn_spec->dest));
      } else {
        txn.source = txn_spec->source;
        txn.dest = txn_spec->dest;
        txn.op = txn_spec->op;
        txn.address = txn_spec->address;
        txn.data = txn_spec->data;
        txn.token_signal = detail::resolve_token(
            txn_spec->token_spec, txn_spec->dest, txn_spec->token_core, fabric,
            controller, scenario.puf, garbage_rng);
        txn.id_signal = txn_spec->id_spec == IdSpec::Dest ? txn_spec->dest
                                                          : txn_spec->id_core;
        txn.ar_integrity = txn_spec->presented_integrity.value_or(
            fabric.wrapper(txn_spec->dest).ar_integrity);
      }
      const TransactionResult result =
          controller.handle_transaction(fabric, txn, tick);
      record.observed_decision = result.decision;
      record.observed_reason = result.reason;
      record.observed_cycles = result.cycles;
    } else if (const auto* tamper = std::get_if<TamperAction>(&action.body)) {
      record.kind = ActionKind::Tamper;
      record.dest_integrity = controller.table().integrity.at(tamper->target);

      const std::optional<BitString> presented = detail::resolve_token(
          tamper->token_spec, tamper->target, tamper->target, fabric,
          controller, scenario.puf, garbage_rng);
      const AuthorizationDecision decision = controller.set_integrity(
          fabric, tamper->target, tamper->new_level, presented);
      record.observed_decision = decision.decision;
      record.observed_reason = decision.reason;
      record.observed_cycles = decision.cycles;
    } else {
      const auto& admin = std::get<AdminAction>(action.body);
      record.kind = ActionKind::Admin;
      record.dest_integrity = controller.table().integrity.at(admin.reenable);
      controller.reenable_channel(admin.reenable);
      record.observed_decision = Decision::Granted;
      record.observed_reason = Reason::Ok;
      record.observed_cycles = 0;
    }

    record.matched =
        record.expected.matches(record.observed_decision, record.observed_reason);
    if (action.cls == ActionClass::Attack &&
        record.observed_decision == Decision::Granted) {
      ++outcome.breach_count;
    }
    if (action.cls == ActionClass::Honest &&
        record.observed_decision == Decision::Denied) {
      ++outcome.false_denial_count;
    }
    outcome.per_action.push_back(std::move(record));
    ++tick;
  }

  outcome.log_excerpt = controller.log();
  outcome.passed = std::all_of(outcome.per_action.begin(),
                               outcome.per_action.end(),
                               [](const ActionOutcome& a) { return a.matched; });
  return outcome;
}

// ---------------------------------------------------------------------------
// Bundled scenarios
//
// Roles are resolved by core kind so the scripts survive reasonable topology
// edits: the attacker application is whichever app is bound to the TRNG and
// the victim is the RSA core.

/// Every declared binding exercised honestly, READ and WRITE.
inline Scenario legit_flow(const TopologySpec& topology = reference_topology()) {
  Scenario s;
  s.name = "legit_flow";
  s.topology = topology;
  for (const auto& [app, core] : topology.bindings) {
    const std::string who =
        "app" + std::to_string(app.value) + "-core" + std::to_string(core.value);
    s.script.push_back({who + "-read", ActionClass::Honest,
                        TxnAction{SourceId::app(app), core, BusOp::Read, 0x10,
                                  0},
                        {Decision::Granted, {Reason::Ok}}});
    s.script.push_back({who + "-write", ActionClass::Honest,
                        TxnAction{SourceId::app(app), core, BusOp::Write, 0x10,
                                  0xDA7A0000u | app.value},
                        {Decision::Granted, {Reason::Ok}}});
  }
  return s;
}

/// An application configured for one secured core replays that core's
/// credentials against a victim core. The controller checks the presented
/// token and id against its own records and blocks every attempt; the
/// victim's channel latches disabled on the first mismatch.
inline Scenario case1_id_spoof(
    const TopologySpec& topology = reference_topology()) {
  Scenario s;
  s.name = "case1_id_spoof";
  s.topology = topology;
  const CoreSpec victim =
      detail::require_core_of_kind(topology, CoreKind::Rsa, s.name);
  const CoreSpec owned =
      detail::require_core_of_kind(topology, CoreKind::Trng, s.name);
  const AppId victim_app = detail::require_bound_app(topology, victim.id, s.name);
  const AppId attacker = detail::require_bound_app(topology, owned.id, s.name);

  s.script.push_back({"victim-honest-read", ActionClass::Honest,
                      TxnAction{SourceId::app(victim_app), victim.id,
                                BusOp::Read, 0x20, 0},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"attacker-own-channel", ActionClass::Honest,
                      TxnAction{SourceId::app(attacker), owned.id, BusOp::Read,
                                0x20, 0},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back(
      {"spoof-foreign-id-and-token", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x20, 0,
                 TokenSpec::OfCore, owned.id, IdSpec::OfCore, owned.id},
       {Decision::Denied, {Reason::TokenMismatch}}});
  s.script.push_back(
      {"spoof-correct-id-foreign-token", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x20, 0,
                 TokenSpec::OfCore, owned.id, IdSpec::Dest},
       {Decision::Denied, {Reason::ChannelDisabled}}});
  s.script.push_back({"teardown-reenable-victim", ActionClass::Demo,
                      AdminAction{victim.id},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back(
      {"spoof-after-reenable", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x20, 0,
                 TokenSpec::OfCore, owned.id, IdSpec::Dest},
       {Decision::Denied, {Reason::TokenMismatch}}});
  s.script.push_back({"victim-channel-latched", ActionClass::Demo,
                      TxnAction{SourceId::app(victim_app), victim.id,
                                BusOp::Read, 0x20, 0},
                      {Decision::Denied, {Reason::ChannelDisabled}}});
  s.script.push_back({"attacker-own-channel-still-up", ActionClass::Honest,
                      TxnAction{SourceId::app(attacker), owned.id, BusOp::Read,
                                0x24, 0},
                      {Decision::Granted, {Reason::Ok}}});
  return s;
}

/// Bus-level manipulation of the protection-style signals. The presented
/// ar_integrity bit is forged both ways; the controller's decisions follow
/// its own table, so the HIGH core still demands a token and the LOW core
/// stays open regardless of the forged bit.
inline Scenario case2_access_control_tamper(
    const TopologySpec& topology = reference_topology()) {
  Scenario s;
  s.name = "case2_access_control_tamper";
  s.topology = topology;

  // The script needs an unprotected core; append one if the topology has
  // none, bound to an otherwise idle app when available.
  const CoreSpec* low = nullptr;
  for (const auto& c : s.topology.cores) {
    if (c.integrity == IntegrityLevel::Low) low = &c;
  }
  if (low == nullptr) {
    CoreSpec demo{IpCoreId{detail::next_free_core_id(s.topology)},
                  CoreKind::Des, IntegrityLevel::Low};
    s.topology.cores.push_back(demo);
    if (auto idle = detail::unbound_app(s.topology)) {
      s.topology.bindings.emplace_back(*idle, demo.id);
    }
    low = &s.topology.cores.back();
  }
  const IpCoreId low_id = low->id;

  const CoreSpec victim =
      detail::require_core_of_kind(s.topology, CoreKind::Rsa, s.name);
  const AppId victim_app =
      detail::require_bound_app(s.topology, victim.id, s.name);
  const CoreSpec owned =
      detail::require_core_of_kind(s.topology, CoreKind::Trng, s.name);
  const AppId attacker =
      detail::require_bound_app(s.topology, owned.id, s.name);

  s.script.push_back({"victim-honest-read", ActionClass::Honest,
                      TxnAction{SourceId::app(victim_app), victim.id,
                                BusOp::Read, 0x30, 0},
                      {Decision::Granted, {Reason::Ok}}});
  if (auto low_app = detail::app_bound_to(s.topology, low_id)) {
    s.script.push_back({"low-core-honest-read", ActionClass::Honest,
                        TxnAction{SourceId::app(*low_app), low_id, BusOp::Read,
                                  0x30, 0},
                        {Decision::Granted, {Reason::Ok}}});
  }
  s.script.push_back(
      {"forge-integrity-low-on-protected", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x30, 0,
                 TokenSpec::Garbage, {}, IdSpec::Dest, {},
                 IntegrityLevel::Low},
       {Decision::Denied, {Reason::TokenMismatch}}});
  s.script.push_back(
      {"forge-integrity-high-on-low", ActionClass::Demo,
       TxnAction{SourceId::app(attacker), low_id, BusOp::Read, 0x30, 0,
                 TokenSpec::Garbage, {}, IdSpec::Dest, {},
                 IntegrityLevel::High},
       {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"teardown-reenable-victim", ActionClass::Demo,
                      AdminAction{victim.id},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"victim-honest-after-attack", ActionClass::Honest,
                      TxnAction{SourceId::app(victim_app), victim.id,
                                BusOp::Read, 0x34, 0},
                      {Decision::Granted, {Reason::Ok}}});
  return s;
}

/// Runtime attempts to flip a core's integrity level. Without the core's
/// token the transition is refused and access stays token-checked; with the
/// token the downgrade is honored, and a later upgrade provisions a fresh
/// token that re-arms the protection.
inline Scenario case3_integrity_tamper(
    const TopologySpec& topology = reference_topology()) {
  Scenario s;
  s.name = "case3_integrity_tamper";
  s.topology = topology;
  const CoreSpec victim =
      detail::require_core_of_kind(topology, CoreKind::Rsa, s.name);
  const AppId victim_app = detail::require_bound_app(topology, victim.id, s.name);
  const CoreSpec owned =
      detail::require_core_of_kind(topology, CoreKind::Trng, s.name);
  const AppId attacker = detail::require_bound_app(topology, owned.id, s.name);

  s.script.push_back({"tamper-no-token", ActionClass::Attack,
                      TamperAction{victim.id, IntegrityLevel::Low,
                                   TokenSpec::Absent},
                      {Decision::Denied, {Reason::IntegrityTamper}}});
  s.script.push_back({"tamper-garbage-token", ActionClass::Attack,
                      TamperAction{victim.id, IntegrityLevel::Low,
                                   TokenSpec::Garbage},
                      {Decision::Denied, {Reason::IntegrityTamper}}});
  s.script.push_back({"victim-still-protected-honest", ActionClass::Honest,
                      TxnAction{SourceId::app(victim_app), victim.id,
                                BusOp::Read, 0x40, 0},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back(
      {"garbage-access-still-checked", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x40, 0,
                 TokenSpec::Garbage},
       {Decision::Denied, {Reason::TokenMismatch}}});
  s.script.push_back({"teardown-reenable-victim", ActionClass::Demo,
                      AdminAction{victim.id},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"authorized-downgrade", ActionClass::Demo,
                      TamperAction{victim.id, IntegrityLevel::Low,
                                   TokenSpec::CorrectForDest},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back(
      {"low-core-open-access", ActionClass::Demo,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x44, 0,
                 TokenSpec::Garbage},
       {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"controller-upgrade-reprovisions", ActionClass::Demo,
                      TamperAction{victim.id, IntegrityLevel::High,
                                   TokenSpec::Absent},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back(
      {"protection-rearmed", ActionClass::Attack,
       TxnAction{SourceId::app(attacker), victim.id, BusOp::Read, 0x44, 0,
                 TokenSpec::Garbage},
       {Decision::Denied, {Reason::TokenMismatch}}});
  return s;
}

/// A trojan inside a wrapped core emits unsolicited writes toward another
/// core's channel. The channel presents its own (correct) credentials, so
/// the attempt survives the token and id checks and is caught by the
/// source binding.
inline Scenario trojan_leak(const TopologySpec& topology = reference_topology()) {
  Scenario s;
  s.name = "trojan_leak";
  s.topology = topology;
  const CoreSpec host =
      detail::require_core_of_kind(topology, CoreKind::Aes, s.name);
  const CoreSpec target =
      detail::require_core_of_kind(topology, CoreKind::Des, s.name);
  const AppId host_app = detail::require_bound_app(topology, host.id, s.name);
  const AppId target_app = detail::require_bound_app(topology, target.id, s.name);

  s.script.push_back({"host-serves-bound-app", ActionClass::Honest,
                      TxnAction{SourceId::app(host_app), host.id, BusOp::Read,
                                0x50, 0},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"trojan-self-access", ActionClass::Honest,
                      TxnAction{SourceId::core(host.id), host.id, BusOp::Write,
                                0x50, 0x7107A900u},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"trojan-overwrite-foreign-channel", ActionClass::Attack,
                      TxnAction{SourceId::core(host.id), target.id,
                                BusOp::Write, 0x50, 0xBAD0DA7Au,
                                TokenSpec::CorrectForDest},
                      {Decision::Denied, {Reason::BindingViolation}}});
  s.script.push_back({"trojan-retry-latched", ActionClass::Attack,
                      TxnAction{SourceId::core(host.id), target.id,
                                BusOp::Write, 0x54, 0xBAD0DA7Au,
                                TokenSpec::CorrectForDest},
                      {Decision::Denied, {Reason::ChannelDisabled}}});
  s.script.push_back({"teardown-reenable-target", ActionClass::Demo,
                      AdminAction{target.id},
                      {Decision::Granted, {Reason::Ok}}});
  s.script.push_back({"target-recovers-for-bound-app", ActionClass::Honest,
                      TxnAction{SourceId::app(target_app), target.id,
                                BusOp::Read, 0x54, 0},
                      {Decision::Granted, {Reason::Ok}}});
  return s;
}

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "legit_flow", "case1_id_spoof", "case2_access_control_tamper",
      "case3_integrity_tamper", "trojan_leak"};
  return names;
}

inline Scenario build_scenario(const std::string& name,
                               const TopologySpec& topology) {
  if (name == "legit_flow") return legit_flow(topology);
  if (name == "case1_id_spoof") return case1_id_spoof(topology);
  if (name == "case2_access_control_tamper")
    return case2_access_control_tamper(topology);
  if (name == "case3_integrity_tamper") return case3_integrity_tamper(topology);
  if (name == "trojan_leak") return trojan_leak(topology);
  throw ValidationError("unknown scenario: " + name);
}

// ---------------------------------------------------------------------------
// Baseline comparison

struct ComparisonActionRecord {
  std::string label;
  bool forged = false;
  Decision baseline = Decision::Denied;
  Decision trusttoken = Decision::Denied;
};

struct ComparisonReport {
  std::vector<ComparisonActionRecord> actions;
  int baseline_breaches = 0;
  int trusttoken_breaches = 0;
  int baseline_false_denials = 0;
  int trusttoken_false_denials = 0;
  bool passed = false;
};

/// Runs the honest workload plus the protection-bit tamper against both
/// models. The baseline's decision depends only on the presented bit, so the
/// forged request lands; the token controller refuses it.
inline ComparisonReport compare_models(
    uint64_t seed, const TopologySpec& topology = reference_topology()) {
  const PufConfig config;
  Fabric fabric = make_fabric(topology);
  const uint64_t tag = detail::name_hash("compare_models");
  Controller controller;
  controller.provision(
      fabric, new_device(derive_seed(seed, seed_domain::kScenarioDevice, tag),
                         config),
      config, derive_seed(seed, seed_domain::kScenarioProvision, tag));
  TrustZoneBaseline baseline = TrustZoneBaseline::make(topology);
  Rng garbage_rng(derive_seed(seed, seed_domain::kScenarioGarbage, tag));

  ComparisonReport report;
  uint64_t tick = 0;
  auto run_honest = [&](AppId app, IpCoreId core) {
    ComparisonActionRecord rec;
    rec.label = "honest-app" + std::to_string(app.value) + "-core" +
                std::to_string(core.value);
    rec.forged = false;
    // Honest initiators drive the protection bit the peripheral expects.
    rec.baseline = baseline
                       .handle({SourceId::app(app), core, BusOp::Read, 0x60, 0,
                                /*prot_secure=*/true})
                       .decision;
    const BusTransaction txn = present_transaction(
        SourceId::app(app), core, BusOp::Read, 0x60, 0, fabric.wrapper(core));
    rec.trusttoken = controller.handle_transaction(fabric, txn, tick++).decision;
    if (rec.baseline == Decision::Denied) ++report.baseline_false_denials;
    if (rec.trusttoken == Decision::Denied) ++report.trusttoken_false_denials;
    report.actions.push_back(rec);
  };
  for (const auto& [app, core] : topology.bindings) run_honest(app, core);

  const CoreSpec victim =
      detail::require_core_of_kind(topology, CoreKind::Rsa, "compare_models");
  SourceId attacker = SourceId::app(AppId{0});
  if (auto idle = detail::unbound_app(topology)) {
    attacker = SourceId::app(*idle);
  } else if (!topology.apps.empty()) {
    attacker = SourceId::app(topology.apps.front());
  }

  ComparisonActionRecord tamper;
  tamper.label = "awprot-tamper-" + to_string(attacker) + "-core" +
                 std::to_string(victim.id.value);
  tamper.forged = true;
  tamper.baseline = baseline
                        .handle({attacker, victim.id, BusOp::Write, 0x60,
                                 0xF0F0F0F0u, /*prot_secure=*/true})
                        .decision;
  BusTransaction forged;
  forged.source = attacker;
  forged.dest = victim.id;
  forged.op = BusOp::Write;
  forged.address = 0x60;
  forged.data = 0xF0F0F0F0u;
  forged.id_signal = victim.id;
  forged.token_signal = BitString::random(config.response_width, garbage_rng);
  forged.ar_integrity = IntegrityLevel::Low;  // forged protection claim
  tamper.trusttoken =
      controller.handle_transaction(fabric, forged, tick++).decision;
  if (tamper.baseline == Decision::Granted) ++report.baseline_breaches;
  if (tamper.trusttoken == Decision::Granted) ++report.trusttoken_breaches;
  report.actions.push_back(tamper);

  report.passed = report.baseline_breaches >= 1 &&
                  report.trusttoken_breaches == 0 &&
                  report.baseline_false_denials == 0 &&
                  report.trusttoken_false_denials == 0;
  return report;
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_SCENARIOS_HPP
