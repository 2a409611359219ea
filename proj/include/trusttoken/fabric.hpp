// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_FABRIC_HPP
#define TRUSTTOKEN_FABRIC_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trusttoken/bits.hpp"
#include "trusttoken/errors.hpp"
#include "trusttoken/rng.hpp"

namespace trusttoken {

// ---------------------------------------------------------------------------
// Identities and wire enums

struct IpCoreId {
  uint8_t value = 0;
  auto operator<=>(const IpCoreId&) const = default;
};

struct AppId {
  uint8_t value = 0;
  auto operator<=>(const AppId&) const = default;
};

/// A transaction initiator: either a software application or another core.
struct SourceId {
  enum class Kind : uint8_t { App, Core };
  Kind kind = Kind::App;
  uint8_t value = 0;

  static SourceId app(AppId id) { return {Kind::App, id.value}; }
  static SourceId core(IpCoreId id) { return {Kind::Core, id.value}; }
  auto operator<=>(const SourceId&) const = default;
};

inline std::string to_string(SourceId s) {
  return (s.kind == SourceId::Kind::App ? "app:" : "core:") +
         std::to_string(s.value);
}

enum class CoreKind : uint8_t { Aes, Des, Trng, Rsa };
enum class IntegrityLevel : uint8_t { High, Low };
enum class BusOp : uint8_t { Read, Write };
enum class Decision : uint8_t { Granted, Denied };

enum class Reason : uint8_t {
  Ok,
  TokenMismatch,
  IdMismatch,
  BindingViolation,
  ChannelDisabled,
  IntegrityTamper,
};

inline const char* to_string(CoreKind k) {
  switch (k) {
    case CoreKind::Aes: return "AES";
    case CoreKind::Des: return "DES";
    case CoreKind::Trng: return "TRNG";
    case CoreKind::Rsa: return "RSA";
  }
  return "?";
}

inline const char* to_string(IntegrityLevel l) {
  return l == IntegrityLevel::High ? "HIGH" : "LOW";
}

inline const char* to_string(BusOp op) {
  return op == BusOp::Read ? "READ" : "WRITE";
}

inline const char* to_string(Decision d) {
  return d == Decision::Granted ? "GRANTED" : "DENIED";
}

inline const char* to_string(Reason r) {
  switch (r) {
    case Reason::Ok: return "OK";
    case Reason::TokenMismatch: return "TOKEN_MISMATCH";
    case Reason::IdMismatch: return "ID_MISMATCH";
    case Reason::BindingViolation: return "BINDING_VIOLATION";
    case Reason::ChannelDisabled: return "CHANNEL_DISABLED";
    case Reason::IntegrityTamper: return "INTEGRITY_TAMPER";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// IP core stubs
//
// The four evaluation cores are behavioral stand-ins: AES/DES/RSA apply a
// fixed invertible 32-bit mixing permutation keyed by (kind, core id); the
// TRNG is a seeded counter generator. Protocol decisions never depend on
// what these compute, only on whether they were allowed to compute.

struct IpCore {
  IpCoreId id;
  CoreKind kind = CoreKind::Aes;
  IntegrityLevel integrity = IntegrityLevel::High;
  uint32_t state = 0;         // last written word (TRNG: generator seed)
  uint64_t trng_counter = 0;  // TRNG sequence position
  uint64_t compute_calls = 0; // mediation instrumentation
};

namespace detail {

constexpr uint32_t mul_inverse_u32(uint32_t a) {
  // Newton iteration; a must be odd.
  uint32_t x = a;
  for (int i = 0; i < 5; ++i) x *= 2u - a * x;
  return x;
}

constexpr uint32_t unshift_right_xor(uint32_t y, unsigned s) {
  uint32_t x = y;
  for (unsigned applied = s; applied < 32; applied += s) x = y ^ (x >> s);
  return x;
}

inline constexpr uint32_t kMixMul1 = 0x85EBCA6Bu;  // murmur3 finalizer pair
inline constexpr uint32_t kMixMul2 = 0xC2B2AE35u;
inline constexpr uint32_t kMixMul1Inv = mul_inverse_u32(kMixMul1);
inline constexpr uint32_t kMixMul2Inv = mul_inverse_u32(kMixMul2);

constexpr uint32_t mix32(uint32_t x) {
  x ^= x >> 16;
  x *= kMixMul1;
  x ^= x >> 13;
  x *= kMixMul2;
  x ^= x >> 16;
  return x;
}

constexpr uint32_t unmix32(uint32_t x) {
  x = unshift_right_xor(x, 16);
  x *= kMixMul2Inv;
  x = unshift_right_xor(x, 13);
  x *= kMixMul1Inv;
  x = unshift_right_xor(x, 16);
  return x;
}

/// Pre/post whitening keys so distinct cores realize distinct permutations.
constexpr std::pair<uint32_t, uint32_t> stub_keys(CoreKind kind, IpCoreId id) {
  const uint64_t k = mix64((uint64_t{static_cast<uint8_t>(kind)} << 8) |
                           uint64_t{id.value});
  return {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

}  // namespace detail

/// The keyed mixing permutation used by the AES/DES/RSA stubs.
constexpr uint32_t ip_mix(CoreKind kind, IpCoreId id, uint32_t x) {
  const auto [k1, k2] = detail::stub_keys(kind, id);
  return detail::mix32(x ^ k1) ^ k2;
}

/// Inverse of ip_mix: ip_unmix(kind, id, ip_mix(kind, id, x)) == x.
constexpr uint32_t ip_unmix(CoreKind kind, IpCoreId id, uint32_t y) {
  const auto [k1, k2] = detail::stub_keys(kind, id);
  return detail::unmix32(y ^ k2) ^ k1;
}

/// Stub computation. WRITE stores data as the new internal state; READ (and
/// WRITE, after updating) returns the keyed mix of (state ^ address). The
/// TRNG instead walks a seeded counter sequence: every access yields the next
/// element, and WRITE reseeds it.
inline uint32_t ip_compute(IpCore& core, BusOp op, uint32_t address,
                           uint32_t data) {
  ++core.compute_calls;
  if (core.kind == CoreKind::Trng) {
    if (op == BusOp::Write) {
      core.state = data;
      core.trng_counter = 0;
    }
    const uint64_t raw = mix64(derive_seed(core.state, seed_domain::kTrngStub,
                                           core.trng_counter++));
    return static_cast<uint32_t>(raw);
  }
  if (op == BusOp::Write) core.state = data;
  return ip_mix(core.kind, core.id, core.state ^ address);
}

// ---------------------------------------------------------------------------
// TrustWrapper and bus transactions

/// Security shell around one core. Carries the core's provisioned token and
/// mirrors its integrity level; honest transactions copy these signals
/// verbatim onto the bus. The token is written only during provisioning.
struct TrustWrapper {
  IpCore core;
  std::optional<BitString> stored_token;
  IntegrityLevel ar_integrity = IntegrityLevel::High;
};

/// One APB-style access request extended with the identity, token and
/// integrity signals. Presented signals may disagree with ground truth;
/// that disagreement is exactly what the attack scenarios exploit, so
/// construction is deliberately unchecked.
struct BusTransaction {
  SourceId source;
  IpCoreId dest;
  BusOp op = BusOp::Read;
  uint32_t address = 0;
  uint32_t data = 0;
  IpCoreId id_signal;
  std::optional<BitString> token_signal;
  IntegrityLevel ar_integrity = IntegrityLevel::High;
};

struct TransactionResult {
  Decision decision = Decision::Denied;
  Reason reason = Reason::ChannelDisabled;
  std::optional<uint32_t> data_out;  // present iff granted
  int cycles = 0;                    // authorization latency
};

/// Honest path: the wrapper presents its stored signals unmodified. An
/// unprovisioned HIGH wrapper emits an absent token, which the controller
/// will deny downstream.
inline BusTransaction present_transaction(SourceId source, IpCoreId dest,
                                          BusOp op, uint32_t address,
                                          uint32_t data,
                                          const TrustWrapper& wrapper) {
  BusTransaction txn;
  txn.source = source;
  txn.dest = dest;
  txn.op = op;
  txn.address = address;
  txn.data = data;
  txn.id_signal = wrapper.core.id;
  txn.token_signal = wrapper.stored_token;
  txn.ar_integrity = wrapper.ar_integrity;
  return txn;
}

// ---------------------------------------------------------------------------
// Fabric

struct CoreSpec {
  IpCoreId id;
  CoreKind kind = CoreKind::Aes;
  IntegrityLevel integrity = IntegrityLevel::High;
};

struct TopologySpec {
  std::vector<CoreSpec> cores;
  std::vector<AppId> apps;
  std::vector<std::pair<AppId, IpCoreId>> bindings;  // app -> designated core
};

/// The four wrapped evaluation cores, five applications, app i bound to
/// core i for 1..4 and app 5 left unbound.
inline TopologySpec reference_topology() {
  TopologySpec t;
  t.cores = {{IpCoreId{1}, CoreKind::Aes, IntegrityLevel::High},
             {IpCoreId{2}, CoreKind::Des, IntegrityLevel::High},
             {IpCoreId{3}, CoreKind::Trng, IntegrityLevel::High},
             {IpCoreId{4}, CoreKind::Rsa, IntegrityLevel::High}};
  t.apps = {AppId{1}, AppId{2}, AppId{3}, AppId{4}, AppId{5}};
  t.bindings = {{AppId{1}, IpCoreId{1}},
                {AppId{2}, IpCoreId{2}},
                {AppId{3}, IpCoreId{3}},
                {AppId{4}, IpCoreId{4}}};
  return t;
}

/// The multi-tenant surface: wrapped cores, declared applications and the
/// intended app->core bindings. Cores start unwrapped in the sense that no
/// token is stored until provisioning. Single-threaded by contract.
class Fabric {
 public:
  static Fabric make(const TopologySpec& spec) {
    Fabric f;
    f.spec_ = spec;
    for (const auto& core_spec : spec.cores) {
      if (f.wrappers_.contains(core_spec.id)) {
        throw TopologyError("duplicate core id " +
                            std::to_string(core_spec.id.value));
      }
      TrustWrapper w;
      w.core.id = core_spec.id;
      w.core.kind = core_spec.kind;
      w.core.integrity = core_spec.integrity;
      w.ar_integrity = core_spec.integrity;
      f.wrappers_.emplace(core_spec.id, std::move(w));
    }
    std::set<uint8_t> app_ids;
    for (const auto& app : spec.apps) {
      if (!app_ids.insert(app.value).second) {
        throw TopologyError("duplicate app id " + std::to_string(app.value));
      }
    }
    for (const auto& [app, core] : spec.bindings) {
      if (!app_ids.contains(app.value)) {
        throw TopologyError("binding references undeclared app " +
                            std::to_string(app.value));
      }
      if (!f.wrappers_.contains(core)) {
        throw TopologyError("binding references undeclared core " +
                            std::to_string(core.value));
      }
    }
    return f;
  }

  bool has_core(IpCoreId id) const { return wrappers_.contains(id); }

  TrustWrapper& wrapper(IpCoreId id) {
    auto it = wrappers_.find(id);
    if (it == wrappers_.end()) {
      throw RoutingError("no core with id " + std::to_string(id.value));
    }
    return it->second;
  }

  const TrustWrapper& wrapper(IpCoreId id) const {
    auto it = wrappers_.find(id);
    if (it == wrappers_.end()) {
      throw RoutingError("no core with id " + std::to_string(id.value));
    }
    return it->second;
  }

  /// Core ids in ascending order; iteration order is deterministic.
  std::vector<IpCoreId> core_ids() const {
    std::vector<IpCoreId> ids;
    ids.reserve(wrappers_.size());
    for (const auto& [id, _] : wrappers_) ids.push_back(id);
    return ids;
  }

  const std::vector<AppId>& apps() const { return spec_.apps; }
  const std::vector<std::pair<AppId, IpCoreId>>& bindings() const {
    return spec_.bindings;
  }

  /// Total stub invocations across all cores; the mediation tests compare
  /// this against the number of granted transactions.
  uint64_t compute_calls() const {
    uint64_t n = 0;
    for (const auto& [_, w] : wrappers_) n += w.core.compute_calls;
    return n;
  }

 private:
  TopologySpec spec_;
  std::map<IpCoreId, TrustWrapper> wrappers_;
};

inline Fabric make_fabric(const TopologySpec& spec) {
  return Fabric::make(spec);
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_FABRIC_HPP
