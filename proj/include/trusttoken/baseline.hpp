// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_BASELINE_HPP
#define TRUSTTOKEN_BASELINE_HPP

#include <cstdint>
#include <map>

#include "trusttoken/fabric.hpp"

namespace trusttoken {

/// AWPROT-style request against the baseline interconnect: the only security
/// signal is a single presented protection bit.
struct BaselineTransaction {
  SourceId source;
  IpCoreId dest;
  BusOp op = BusOp::Read;
  uint32_t address = 0;
  uint32_t data = 0;
  bool prot_secure = false;  // presented protection bit
};

/// TrustZone-style comparison model. Protection lives entirely in the
/// interconnect's check of the presented protection bit: a secure-only core
/// accepts any transaction whose bit claims to be secure. There is no token
/// state anywhere, which is precisely the weakness the comparison exercises
/// (any initiator that can drive the bus can also drive the bit).
class TrustZoneBaseline {
 public:
  static TrustZoneBaseline make(const TopologySpec& spec) {
    TrustZoneBaseline b;
    for (const auto& core_spec : spec.cores) {
      if (b.cores_.contains(core_spec.id)) {
        throw TopologyError("duplicate core id " +
                            std::to_string(core_spec.id.value));
      }
      IpCore core;
      core.id = core_spec.id;
      core.kind = core_spec.kind;
      core.integrity = core_spec.integrity;
      // HIGH-integrity cores map onto secure-only peripherals.
      b.secure_only_[core_spec.id] =
          core_spec.integrity == IntegrityLevel::High;
      b.cores_.emplace(core_spec.id, core);
    }
    return b;
  }

  TransactionResult handle(const BaselineTransaction& txn) {
    auto it = cores_.find(txn.dest);
    if (it == cores_.end()) {
      throw RoutingError("no core with id " + std::to_string(txn.dest.value));
    }
    TransactionResult result;
    if (secure_only_.at(txn.dest) && !txn.prot_secure) {
      result.decision = Decision::Denied;
      result.reason = Reason::IntegrityTamper;
      result.cycles = 1;
      return result;
    }
    result.decision = Decision::Granted;
    result.reason = Reason::Ok;
    result.cycles = 1;
    result.data_out = ip_compute(it->second, txn.op, txn.address, txn.data);
    return result;
  }

 private:
  std::map<IpCoreId, IpCore> cores_;
  std::map<IpCoreId, bool> secure_only_;
};

}  // namespace trusttoken

#endif  // TRUSTTOKEN_BASELINE_HPP
