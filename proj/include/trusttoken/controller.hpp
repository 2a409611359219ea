// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_CONTROLLER_HPP
#define TRUSTTOKEN_CONTROLLER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trusttoken/fabric.hpp"
#include "trusttoken/puf.hpp"

namespace trusttoken {

enum class ChannelState : uint8_t { Enabled, Disabled };

/// One provisioned core: its token, the challenge that produced it, and the
/// sources allowed to reach its channel.
struct TokenEntry {
  BitString token;
  PufChallenge challenge;
  std::set<SourceId> allowed_sources;
};

/// The controller's authoritative view. Authorization consults only this
/// table, never signals presented on the bus; entries are written by
/// provisioning and by authorized integrity transitions, never by authorize.
struct TokenTable {
  std::map<IpCoreId, TokenEntry> entries;            // HIGH-integrity cores
  std::map<IpCoreId, ChannelState> channel_state;    // every core
  std::map<IpCoreId, IntegrityLevel> integrity;      // every core
};

struct AuthorizationDecision {
  Decision decision = Decision::Denied;
  Reason reason = Reason::ChannelDisabled;
  int cycles = 0;  // 2 for HIGH-integrity targets, 1 for LOW
};

/// Append-only audit record. `decision` is absent exactly when the
/// transaction failed routing rather than authorization; `error` then holds
/// the diagnostic.
struct EventLogEntry {
  uint64_t sequence_no = 0;
  uint64_t tick = 0;
  BusTransaction transaction;
  std::optional<AuthorizationDecision> decision;
  std::string error;
};

struct LogFilter {
  std::optional<Decision> decision;
  std::optional<Reason> reason;
  std::optional<IpCoreId> dest;

  bool matches(const EventLogEntry& e) const {
    if (dest && e.transaction.dest != *dest) return false;
    if (decision && (!e.decision || e.decision->decision != *decision))
      return false;
    if (reason && (!e.decision || e.decision->reason != *reason))
      return false;
    return true;
  }
};

/// "sequence tick source dest decision reason" — one line per record, the
/// format the scenario and CLI reports embed.
inline std::string format_log_entry(const EventLogEntry& e) {
  std::string line = std::to_string(e.sequence_no) + " " +
                     std::to_string(e.tick) + " " +
                     to_string(e.transaction.source) + " core:" +
                     std::to_string(e.transaction.dest.value) + " ";
  if (e.decision) {
    line += std::string(to_string(e.decision->decision)) + " " +
            to_string(e.decision->reason);
  } else {
    line += "ERROR ROUTING";
  }
  return line;
}

/// The Central TrustToken Controller. Provisions PUF-derived tokens at
/// runtime, adjudicates every transaction against its token table and
/// bindings, manages integrity transitions, latches channels closed on
/// violations, and logs everything. One instance per fabric; all calls must
/// be externally ordered (single-threaded contract).
class Controller {
 public:
  /// Runtime token provisioning (trusted setup). For every HIGH-integrity
  /// core, in ascending id order: derive a challenge from (core id, seed),
  /// evaluate it noiselessly on the central PUF device, and store the
  /// response as the core's token, retrying with the next derived challenge
  /// until tokens are pairwise distinct. The token is also written into the
  /// core's wrapper. Allowed sources are the fabric's declared bindings for
  /// that core plus the core itself; every channel starts ENABLED.
  const TokenTable& provision(Fabric& fabric, const OscillatorArray& device,
                              const PufConfig& config,
                              uint64_t derivation_seed) {
    config.validate();
    table_ = TokenTable{};
    log_.clear();
    device_ = device;
    config_ = config;
    derivation_seed_ = derivation_seed;

    const auto ids = fabric.core_ids();
    uint64_t high_count = 0;
    for (IpCoreId id : ids) {
      if (fabric.wrapper(id).core.integrity == IntegrityLevel::High)
        ++high_count;
    }
    if (high_count > config.challenge_space()) {
      throw CapacityError("more HIGH-integrity cores than distinct challenges");
    }

    for (IpCoreId id : ids) {
      TrustWrapper& w = fabric.wrapper(id);
      table_.integrity[id] = w.core.integrity;
      table_.channel_state[id] = ChannelState::Enabled;
      if (w.core.integrity == IntegrityLevel::High) {
        provision_core(fabric, id);
      }
    }
    return table_;
  }

  /// Per-transaction authorization. Checks run in a fixed order so reason
  /// codes are deterministic:
  ///   (a) destination channel enabled, else CHANNEL_DISABLED;
  ///   (b) destination integrity LOW -> granted, 1 cycle, no further checks;
  ///   (c) presented token equals the stored token, else TOKEN_MISMATCH;
  ///   (d) presented id equals the destination id, else ID_MISMATCH;
  ///   (e) source is an allowed source, else BINDING_VIOLATION.
  /// A TOKEN_MISMATCH or BINDING_VIOLATION denial latches the destination
  /// channel DISABLED until an administrative re-enable. Presented
  /// ar_integrity is ignored; the table is authoritative.
  AuthorizationDecision authorize(const BusTransaction& txn) {
    auto level_it = table_.integrity.find(txn.dest);
    if (level_it == table_.integrity.end()) {
      throw RoutingError("destination core " + std::to_string(txn.dest.value) +
                         " is not part of the provisioned fabric");
    }
    const IntegrityLevel level = level_it->second;
    const int cycles = level == IntegrityLevel::High ? 2 : 1;

    if (table_.channel_state.at(txn.dest) == ChannelState::Disabled) {
      return {Decision::Denied, Reason::ChannelDisabled, cycles};
    }
    if (level == IntegrityLevel::Low) {
      return {Decision::Granted, Reason::Ok, 1};
    }

    const auto entry_it = table_.entries.find(txn.dest);
    const bool token_ok = entry_it != table_.entries.end() &&
                          txn.token_signal.has_value() &&
                          *txn.token_signal == entry_it->second.token;
    if (!token_ok) {
      table_.channel_state[txn.dest] = ChannelState::Disabled;
      return {Decision::Denied, Reason::TokenMismatch, cycles};
    }
    if (txn.id_signal != txn.dest) {
      return {Decision::Denied, Reason::IdMismatch, cycles};
    }
    if (!entry_it->second.allowed_sources.contains(txn.source)) {
      table_.channel_state[txn.dest] = ChannelState::Disabled;
      return {Decision::Denied, Reason::BindingViolation, cycles};
    }
    return {Decision::Granted, Reason::Ok, cycles};
  }

  /// Runtime integrity transition. Changing a HIGH core requires presenting
  /// its token; failures return INTEGRITY_TAMPER and leave everything
  /// untouched. Transitions from LOW are controller-internal (trusted
  /// invocation) and a LOW->HIGH transition provisions a fresh token for the
  /// core. Grants update the core and its wrapper mirror.
  AuthorizationDecision set_integrity(Fabric& fabric, IpCoreId target,
                                      IntegrityLevel new_level,
                                      const std::optional<BitString>& presented_token) {
    auto level_it = table_.integrity.find(target);
    if (level_it == table_.integrity.end() || !fabric.has_core(target)) {
      throw RoutingError("integrity change for unknown core " +
                         std::to_string(target.value));
    }
    const IntegrityLevel current = level_it->second;
    const int cycles = current == IntegrityLevel::High ? 2 : 1;

    if (current == IntegrityLevel::High) {
      const auto entry_it = table_.entries.find(target);
      const bool token_ok = entry_it != table_.entries.end() &&
                            presented_token.has_value() &&
                            *presented_token == entry_it->second.token;
      if (!token_ok) {
        return {Decision::Denied, Reason::IntegrityTamper, cycles};
      }
    }

    TrustWrapper& w = fabric.wrapper(target);
    w.core.integrity = new_level;
    w.ar_integrity = new_level;
    table_.integrity[target] = new_level;
    if (current == IntegrityLevel::Low && new_level == IntegrityLevel::High) {
      provision_core(fabric, target);
      table_.channel_state[target] = ChannelState::Enabled;
    }
    return {Decision::Granted, Reason::Ok, cycles};
  }

  /// Full mediation of one transaction: authorize, execute the stub on a
  /// grant, and append exactly one audit record. Routing failures are logged
  /// and rethrown.
  TransactionResult handle_transaction(Fabric& fabric,
                                       const BusTransaction& txn,
                                       uint64_t tick) {
    AuthorizationDecision decision;
    try {
      decision = authorize(txn);
    } catch (const RoutingError& e) {
      log_.push_back({next_sequence(), tick, txn, std::nullopt, e.what()});
      throw;
    }

    TransactionResult result;
    result.decision = decision.decision;
    result.reason = decision.reason;
    result.cycles = decision.cycles;
    if (decision.decision == Decision::Granted) {
      result.data_out = ip_compute(fabric.wrapper(txn.dest).core, txn.op,
                                   txn.address, txn.data);
    }
    log_.push_back({next_sequence(), tick, txn, decision, ""});
    return result;
  }

  /// Matching audit records in sequence order; never mutates.
  std::vector<EventLogEntry> query_log(const LogFilter& filter = {}) const {
    std::vector<EventLogEntry> out;
    for (const auto& e : log_) {
      if (filter.matches(e)) out.push_back(e);
    }
    return out;
  }

  const std::vector<EventLogEntry>& log() const { return log_; }
  const TokenTable& table() const { return table_; }

  /// Administrative recovery from denial latching. Invoked only by scenario
  /// teardown; the protocol itself never re-enables a latched channel.
  void reenable_channel(IpCoreId id) {
    auto it = table_.channel_state.find(id);
    if (it == table_.channel_state.end()) {
      throw RoutingError("re-enable for unknown core " +
                         std::to_string(id.value));
    }
    it->second = ChannelState::Enabled;
  }

 private:
  uint64_t next_sequence() const { return log_.size(); }

  PufChallenge derive_challenge(IpCoreId core, uint64_t attempt) const {
    const uint64_t raw =
        derive_seed(derivation_seed_, seed_domain::kProvision,
                    (uint64_t{core.value} << 32) | attempt);
    return PufChallenge{raw & config_.challenge_mask()};
  }

  /// Derives challenges for one core until its noiseless response is
  /// distinct from every token already in the table, then installs it in the
  /// table and the core's wrapper.
  void provision_core(Fabric& fabric, IpCoreId id) {
    std::set<uint64_t> tried;
    const uint64_t space = config_.challenge_space();
    // Generous attempt backstop: derivation is pseudorandom, so covering a
    // small challenge space takes a coupon-collector number of draws.
    const uint64_t max_attempts = space < (uint64_t{1} << 32) ? space * 64 + 64
                                                              : ~uint64_t{0};
    for (uint64_t attempt = 0;; ++attempt) {
      if (tried.size() >= space || attempt >= max_attempts) {
        throw CapacityError("challenge space exhausted while provisioning core " +
                            std::to_string(id.value));
      }
      const PufChallenge challenge = derive_challenge(id, attempt);
      if (!tried.insert(challenge.value).second) continue;
      const PufResponse token = evaluate_noiseless(*device_, challenge, config_);
      bool collision = false;
      for (const auto& [other, entry] : table_.entries) {
        if (other != id && entry.token == token) {
          collision = true;
          break;
        }
      }
      if (collision) continue;

      TokenEntry entry;
      entry.token = token;
      entry.challenge = challenge;
      entry.allowed_sources.insert(SourceId::core(id));  // self-access is bound
      for (const auto& [app, core] : fabric.bindings()) {
        if (core == id) entry.allowed_sources.insert(SourceId::app(app));
      }
      table_.entries[id] = std::move(entry);
      fabric.wrapper(id).stored_token = token;
      return;
    }
  }

  TokenTable table_;
  std::vector<EventLogEntry> log_;
  // Provisioning context, retained so LOW->HIGH transitions can derive fresh
  // tokens from the same central device.
  std::optional<OscillatorArray> device_;
  PufConfig config_;
  uint64_t derivation_seed_ = 0;
};

}  // namespace trusttoken

#endif  // TRUSTTOKEN_CONTROLLER_HPP
