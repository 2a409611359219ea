// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_CONFIG_HPP
#define TRUSTTOKEN_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trusttoken/errors.hpp"
#include "trusttoken/fabric.hpp"
#include "trusttoken/puf.hpp"
#include "trusttoken/scenarios.hpp"

namespace trusttoken {

struct PopulationConfig {
  uint32_t device_count = 100;
  uint32_t challenge_count = 1;
  uint32_t trial_count = 100;
  bool operator==(const PopulationConfig&) const = default;
};

/// Exit-code windows for puf-eval. Defaults bracket the silicon figures the
/// simulator is tuned against; all of them are config-overridable.
struct AcceptanceWindows {
  double uniqueness_lo = 0.45;
  double uniqueness_hi = 0.55;
  double uniformity_lo = 0.44;
  double uniformity_hi = 0.56;
  double reliability_min = 0.99;
  double hd_lo = 0.40;
  double hd_hi = 0.60;
  double hd_mass_min = 0.95;
  bool operator==(const AcceptanceWindows&) const = default;
};

/// Test-only hooks. invert_expectation = "<scenario>:<action index>" flips
/// one scripted expectation so failure surfacing can be exercised end to end.
struct TestingOverrides {
  std::string invert_expectation;
  bool operator==(const TestingOverrides&) const = default;
};

/// Everything a run needs. The seed is always present (default 42) so no
/// wall-clock entropy can leak in; reports echo the effective config and that
/// echo re-parses to an identical run.
struct RunConfig {
  PufConfig puf;
  PopulationConfig population;
  TopologySpec topology = reference_topology();
  std::vector<std::string> scenarios{"all"};
  uint64_t seed = 42;
  std::string output_path;  // empty: per-command default
  AcceptanceWindows windows;
  TestingOverrides testing;
};

namespace cfgdetail {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& key, const std::string& what) {
  throw ValidationError("config: " + key + ": " + what);
}

inline void require_keys(const json& j, const std::string& prefix,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) known = true;
    }
    if (!known) {
      throw ValidationError("config: unknown key: " +
                            (prefix.empty() ? key : prefix + "." + key));
    }
  }
}

inline uint64_t get_u64(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) fail(key, "expected an unsigned integer");
  return j.get<uint64_t>();
}

inline uint32_t get_u32(const json& j, const std::string& key) {
  const uint64_t v = get_u64(j, key);
  if (v > 0xFFFFFFFFull) fail(key, "value out of range");
  return static_cast<uint32_t>(v);
}

inline uint8_t get_u8(const json& j, const std::string& key) {
  const uint64_t v = get_u64(j, key);
  if (v > 0xFF) fail(key, "value out of range (ids are 8-bit)");
  return static_cast<uint8_t>(v);
}

inline double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "expected a number");
  return j.get<double>();
}

inline std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) fail(key, "expected a string");
  return j.get<std::string>();
}

inline CoreKind parse_kind(const std::string& s, const std::string& key) {
  if (s == "AES") return CoreKind::Aes;
  if (s == "DES") return CoreKind::Des;
  if (s == "TRNG") return CoreKind::Trng;
  if (s == "RSA") return CoreKind::Rsa;
  fail(key, "expected one of AES/DES/TRNG/RSA");
}

inline IntegrityLevel parse_integrity(const std::string& s,
                                      const std::string& key) {
  if (s == "HIGH") return IntegrityLevel::High;
  if (s == "LOW") return IntegrityLevel::Low;
  fail(key, "expected HIGH or LOW");
}

inline void parse_window_pair(const json& j, const std::string& key,
                              double& lo, double& hi) {
  if (!j.is_array() || j.size() != 2) fail(key, "expected [lo, hi]");
  lo = get_real(j[0], key);
  hi = get_real(j[1], key);
  if (lo < 0.0 || hi > 1.0 || lo > hi) fail(key, "expected 0 <= lo <= hi <= 1");
}

}  // namespace cfgdetail

/// Parses and fully validates a config document. Unknown keys, type
/// mismatches and invariant violations raise ValidationError naming the
/// offending key. An empty document yields all defaults.
inline RunConfig parse_config(const std::string& text) {
  using cfgdetail::fail;
  using cfgdetail::json;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config: expected a JSON object");

  RunConfig cfg;
  cfgdetail::require_keys(doc, "", {"seed", "output", "puf", "population",
                                    "topology", "scenarios", "windows",
                                    "testing"});

  if (doc.contains("seed")) cfg.seed = cfgdetail::get_u64(doc["seed"], "seed");
  if (doc.contains("output"))
    cfg.output_path = cfgdetail::get_string(doc["output"], "output");

  if (doc.contains("puf")) {
    const json& p = doc["puf"];
    if (!p.is_object()) fail("puf", "expected an object");
    cfgdetail::require_keys(p, "puf",
                            {"oscillator_count", "response_width",
                             "challenge_width", "nominal_frequency",
                             "sigma_process", "sigma_noise"});
    if (p.contains("oscillator_count"))
      cfg.puf.oscillator_count =
          cfgdetail::get_u32(p["oscillator_count"], "puf.oscillator_count");
    if (p.contains("response_width"))
      cfg.puf.response_width =
          cfgdetail::get_u32(p["response_width"], "puf.response_width");
    if (p.contains("challenge_width"))
      cfg.puf.challenge_width =
          cfgdetail::get_u32(p["challenge_width"], "puf.challenge_width");
    if (p.contains("nominal_frequency"))
      cfg.puf.nominal_frequency =
          cfgdetail::get_real(p["nominal_frequency"], "puf.nominal_frequency");
    if (p.contains("sigma_process"))
      cfg.puf.sigma_process =
          cfgdetail::get_real(p["sigma_process"], "puf.sigma_process");
    if (p.contains("sigma_noise"))
      cfg.puf.sigma_noise =
          cfgdetail::get_real(p["sigma_noise"], "puf.sigma_noise");
  }
  try {
    cfg.puf.validate();
  } catch (const ConfigError& e) {
    throw ValidationError(std::string("config: puf: ") + e.what());
  }

  if (doc.contains("population")) {
    const json& p = doc["population"];
    if (!p.is_object()) fail("population", "expected an object");
    cfgdetail::require_keys(p, "population",
                            {"device_count", "challenge_count", "trial_count"});
    if (p.contains("device_count"))
      cfg.population.device_count =
          cfgdetail::get_u32(p["device_count"], "population.device_count");
    if (p.contains("challenge_count"))
      cfg.population.challenge_count = cfgdetail::get_u32(
          p["challenge_count"], "population.challenge_count");
    if (p.contains("trial_count"))
      cfg.population.trial_count =
          cfgdetail::get_u32(p["trial_count"], "population.trial_count");
  }
  if (cfg.population.device_count < 2)
    fail("population.device_count", "need at least 2 devices");
  if (cfg.population.challenge_count < 1)
    fail("population.challenge_count", "need at least 1 challenge");
  if (cfg.population.challenge_count > cfg.puf.challenge_space())
    fail("population.challenge_count", "exceeds the challenge space");
  if (cfg.population.trial_count < 2)
    fail("population.trial_count", "need at least 2 trials");

  if (doc.contains("topology")) {
    const json& t = doc["topology"];
    if (!t.is_object()) fail("topology", "expected an object");
    cfgdetail::require_keys(t, "topology", {"cores", "apps", "bindings"});
    cfg.topology = TopologySpec{};
    if (t.contains("cores")) {
      if (!t["cores"].is_array()) fail("topology.cores", "expected an array");
      for (const auto& c : t["cores"]) {
        if (!c.is_object()) fail("topology.cores", "expected objects");
        cfgdetail::require_keys(c, "topology.cores", {"id", "kind", "integrity"});
        if (!c.contains("id") || !c.contains("kind"))
          fail("topology.cores", "each core needs id and kind");
        CoreSpec spec;
        spec.id = IpCoreId{cfgdetail::get_u8(c["id"], "topology.cores.id")};
        spec.kind = cfgdetail::parse_kind(
            cfgdetail::get_string(c["kind"], "topology.cores.kind"),
            "topology.cores.kind");
        spec.integrity =
            c.contains("integrity")
                ? cfgdetail::parse_integrity(
                      cfgdetail::get_string(c["integrity"],
                                            "topology.cores.integrity"),
                      "topology.cores.integrity")
                : IntegrityLevel::High;
        cfg.topology.cores.push_back(spec);
      }
    }
    if (t.contains("apps")) {
      if (!t["apps"].is_array()) fail("topology.apps", "expected an array");
      for (const auto& a : t["apps"]) {
        cfg.topology.apps.push_back(
            AppId{cfgdetail::get_u8(a, "topology.apps")});
      }
    }
    if (t.contains("bindings")) {
      if (!t["bindings"].is_array())
        fail("topology.bindings", "expected an array");
      for (const auto& b : t["bindings"]) {
        if (!b.is_array() || b.size() != 2)
          fail("topology.bindings", "expected [app, core] pairs");
        cfg.topology.bindings.emplace_back(
            AppId{cfgdetail::get_u8(b[0], "topology.bindings.app")},
            IpCoreId{cfgdetail::get_u8(b[1], "topology.bindings.core")});
      }
    }
  }
  try {
    make_fabric(cfg.topology);
  } catch (const TopologyError& e) {
    throw ValidationError(std::string("config: topology: ") + e.what());
  }

  if (doc.contains("scenarios")) {
    const json& s = doc["scenarios"];
    cfg.scenarios.clear();
    if (s.is_string()) {
      cfg.scenarios.push_back(s.get<std::string>());
    } else if (s.is_array()) {
      for (const auto& name : s) {
        cfg.scenarios.push_back(cfgdetail::get_string(name, "scenarios"));
      }
    } else {
      fail("scenarios", "expected a name, \"all\", or an array of names");
    }
  }
  for (const auto& name : cfg.scenarios) {
    if (name == "all" || name == "compare_models") continue;
    const auto& known = scenario_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      fail("scenarios", "unknown scenario: " + name);
    }
  }

  if (doc.contains("windows")) {
    const json& w = doc["windows"];
    if (!w.is_object()) fail("windows", "expected an object");
    cfgdetail::require_keys(w, "windows",
                            {"uniqueness", "uniformity", "reliability_min",
                             "hd_window", "hd_mass_min"});
    if (w.contains("uniqueness"))
      cfgdetail::parse_window_pair(w["uniqueness"], "windows.uniqueness",
                                   cfg.windows.uniqueness_lo,
                                   cfg.windows.uniqueness_hi);
    if (w.contains("uniformity"))
      cfgdetail::parse_window_pair(w["uniformity"], "windows.uniformity",
                                   cfg.windows.uniformity_lo,
                                   cfg.windows.uniformity_hi);
    if (w.contains("reliability_min")) {
      cfg.windows.reliability_min =
          cfgdetail::get_real(w["reliability_min"], "windows.reliability_min");
      if (cfg.windows.reliability_min < 0.0 || cfg.windows.reliability_min > 1.0)
        fail("windows.reliability_min", "expected a fraction in [0,1]");
    }
    if (w.contains("hd_window"))
      cfgdetail::parse_window_pair(w["hd_window"], "windows.hd_window",
                                   cfg.windows.hd_lo, cfg.windows.hd_hi);
    if (w.contains("hd_mass_min")) {
      cfg.windows.hd_mass_min =
          cfgdetail::get_real(w["hd_mass_min"], "windows.hd_mass_min");
      if (cfg.windows.hd_mass_min < 0.0 || cfg.windows.hd_mass_min > 1.0)
        fail("windows.hd_mass_min", "expected a fraction in [0,1]");
    }
  }

  if (doc.contains("testing")) {
    const json& t = doc["testing"];
    if (!t.is_object()) fail("testing", "expected an object");
    cfgdetail::require_keys(t, "testing", {"invert_expectation"});
    if (t.contains("invert_expectation")) {
      cfg.testing.invert_expectation = cfgdetail::get_string(
          t["invert_expectation"], "testing.invert_expectation");
      const auto colon = cfg.testing.invert_expectation.rfind(':');
      if (colon == std::string::npos) {
        fail("testing.invert_expectation", "expected \"<scenario>:<index>\"");
      }
      const std::string name = cfg.testing.invert_expectation.substr(0, colon);
      const auto& known = scenario_names();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        fail("testing.invert_expectation", "unknown scenario: " + name);
      }
      const std::string idx = cfg.testing.invert_expectation.substr(colon + 1);
      if (idx.empty() ||
          idx.find_first_not_of("0123456789") != std::string::npos) {
        fail("testing.invert_expectation", "index must be a number");
      }
    }
  }

  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Canonical single-line JSON whose key order is fixed; identical configs
/// serialize to identical bytes and the result re-parses to an equal config.
inline std::string serialize_config(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["seed"] = cfg.seed;
  if (!cfg.output_path.empty()) doc["output"] = cfg.output_path;
  doc["puf"] = {{"oscillator_count", cfg.puf.oscillator_count},
                {"response_width", cfg.puf.response_width},
                {"challenge_width", cfg.puf.challenge_width},
                {"nominal_frequency", cfg.puf.nominal_frequency},
                {"sigma_process", cfg.puf.sigma_process},
                {"sigma_noise", cfg.puf.sigma_noise}};
  doc["population"] = {{"device_count", cfg.population.device_count},
                       {"challenge_count", cfg.population.challenge_count},
                       {"trial_count", cfg.population.trial_count}};
  nlohmann::ordered_json cores = nlohmann::ordered_json::array();
  for (const auto& c : cfg.topology.cores) {
    cores.push_back({{"id", c.id.value},
                     {"kind", to_string(c.kind)},
                     {"integrity", to_string(c.integrity)}});
  }
  nlohmann::ordered_json apps = nlohmann::ordered_json::array();
  for (const auto& a : cfg.topology.apps) apps.push_back(a.value);
  nlohmann::ordered_json bindings = nlohmann::ordered_json::array();
  for (const auto& [a, c] : cfg.topology.bindings) {
    bindings.push_back({a.value, c.value});
  }
  doc["topology"] = {{"cores", cores}, {"apps", apps}, {"bindings", bindings}};
  doc["scenarios"] = cfg.scenarios;
  doc["windows"] = {
      {"uniqueness", {cfg.windows.uniqueness_lo, cfg.windows.uniqueness_hi}},
      {"uniformity", {cfg.windows.uniformity_lo, cfg.windows.uniformity_hi}},
      {"reliability_min", cfg.windows.reliability_min},
      {"hd_window", {cfg.windows.hd_lo, cfg.windows.hd_hi}},
      {"hd_mass_min", cfg.windows.hd_mass_min}};
  if (!cfg.testing.invert_expectation.empty()) {
    doc["testing"] = {{"invert_expectation", cfg.testing.invert_expectation}};
  }
  return doc.dump();
}

/// Expands "all" and validates names; result preserves selection order with
/// duplicates removed. "compare_models" selects the baseline comparison.
inline std::vector<std::string> resolve_scenarios(const RunConfig& cfg) {
  std::vector<std::string> out;
  auto push_unique = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end())
      out.push_back(name);
  };
  for (const auto& name : cfg.scenarios) {
    if (name == "all") {
      for (const auto& n : scenario_names()) push_unique(n);
      push_unique("compare_models");
    } else if (name == "compare_models") {
      push_unique(name);
    } else {
      const auto& known = scenario_names();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ValidationError("unknown scenario: " + name);
      }
      push_unique(name);
    }
  }
  return out;
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_CONFIG_HPP
