// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#ifndef TRUSTTOKEN_REPORT_HPP
#define TRUSTTOKEN_REPORT_HPP

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trusttoken/config.hpp"
#include "trusttoken/controller.hpp"
#include "trusttoken/puf.hpp"
#include "trusttoken/scenarios.hpp"

namespace trusttoken {

// Reports are line-oriented text: a fixed header, then bracketed sections.
// Every number is printed through a fixed-width format so identical runs
// produce identical bytes.

inline constexpr const char* kReportMagic = "ttsim-report v1";

/// Fixed 9-decimal rendering; never locale-dependent.
inline std::string format_fixed(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline double hd_mass_in_window(const PufQualityReport& q, double lo,
                                double hi) {
  if (q.pairwise_hd.empty()) return 0.0;
  size_t inside = 0;
  for (double v : q.pairwise_hd) {
    if (v >= lo && v <= hi) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(q.pairwise_hd.size());
}

inline bool puf_accepted(const PufQualityReport& q,
                         const AcceptanceWindows& w) {
  return q.uniqueness >= w.uniqueness_lo && q.uniqueness <= w.uniqueness_hi &&
         q.uniformity >= w.uniformity_lo && q.uniformity <= w.uniformity_hi &&
         q.reliability >= w.reliability_min &&
         hd_mass_in_window(q, w.hd_lo, w.hd_hi) >= w.hd_mass_min;
}

// ---------------------------------------------------------------------------
// Rendering

namespace repdetail {

inline const char* class_name(ActionClass c) {
  switch (c) {
    case ActionClass::Honest: return "honest";
    case ActionClass::Attack: return "attack";
    case ActionClass::Demo: return "demo";
  }
  return "?";
}

inline const char* kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::Transaction: return "txn";
    case ActionKind::Tamper: return "tamper";
    case ActionKind::Admin: return "admin";
  }
  return "?";
}

inline std::string expectation_text(const Expectation& e) {
  std::string s = to_string(e.decision);
  if (!e.reasons.empty()) {
    s += "/";
    for (size_t i = 0; i < e.reasons.size(); ++i) {
      if (i > 0) s += "|";
      s += to_string(e.reasons[i]);
    }
  }
  return s;
}

}  // namespace repdetail

inline std::string render_puf_report(const RunConfig& cfg,
                                     const PufQualityReport& q,
                                     bool accepted) {
  std::ostringstream out;
  out << kReportMagic << "\n";
  out << "kind puf-eval\n";
  out << "seed " << cfg.seed << "\n";
  out << "config " << serialize_config(cfg) << "\n";
  out << "[metrics]\n";
  out << "devices " << q.device_count << "\n";
  out << "challenges " << cfg.population.challenge_count << "\n";
  out << "trials " << q.trial_count << "\n";
  out << "uniqueness " << format_fixed(q.uniqueness) << "\n";
  out << "uniformity " << format_fixed(q.uniformity) << "\n";
  out << "reliability " << format_fixed(q.reliability) << "\n";
  out << "hd_in_window "
      << format_fixed(hd_mass_in_window(q, cfg.windows.hd_lo, cfg.windows.hd_hi))
      << "\n";
  out << "window_uniqueness " << format_fixed(cfg.windows.uniqueness_lo) << " "
      << format_fixed(cfg.windows.uniqueness_hi) << "\n";
  out << "window_uniformity " << format_fixed(cfg.windows.uniformity_lo) << " "
      << format_fixed(cfg.windows.uniformity_hi) << "\n";
  out << "window_reliability_min " << format_fixed(cfg.windows.reliability_min)
      << "\n";
  out << "window_hd " << format_fixed(cfg.windows.hd_lo) << " "
      << format_fixed(cfg.windows.hd_hi) << " "
      << format_fixed(cfg.windows.hd_mass_min) << "\n";
  out << "accepted " << (accepted ? 1 : 0) << "\n";
  out << "[pairwise_hd]\n";
  for (double v : q.pairwise_hd) out << format_fixed(v) << "\n";
  out << "[end]\n";
  return out.str();
}

inline std::string render_scenario_report(
    const RunConfig& cfg, const std::vector<ScenarioOutcome>& outcomes,
    const std::optional<ComparisonReport>& comparison) {
  std::ostringstream out;
  out << kReportMagic << "\n";
  out << "kind run-scenarios\n";
  out << "seed " << cfg.seed << "\n";
  out << "config " << serialize_config(cfg) << "\n";

  bool overall = true;
  out << "[summary]\n";
  for (const auto& o : outcomes) {
    overall = overall && o.passed;
    out << "scenario " << o.name << " passed " << (o.passed ? 1 : 0)
        << " actions " << o.per_action.size() << " breaches "
        << o.breach_count << " false_denials " << o.false_denial_count << "\n";
  }
  if (comparison) {
    overall = overall && comparison->passed;
    out << "comparison passed " << (comparison->passed ? 1 : 0)
        << " baseline_breaches " << comparison->baseline_breaches
        << " trusttoken_breaches " << comparison->trusttoken_breaches << "\n";
  }
  out << "overall " << (overall ? 1 : 0) << "\n";

  for (const auto& o : outcomes) {
    out << "[scenario " << o.name << "]\n";
    for (size_t i = 0; i < o.per_action.size(); ++i) {
      const auto& a = o.per_action[i];
      out << "action " << i << " kind " << repdetail::kind_name(a.kind)
          << " class " << repdetail::class_name(a.cls) << " label " << a.label
          << " expected " << repdetail::expectation_text(a.expected)
          << " observed " << to_string(a.observed_decision) << "/"
          << to_string(a.observed_reason) << " cycles " << a.observed_cycles
          << " integrity " << to_string(a.dest_integrity) << " match "
          << (a.matched ? 1 : 0) << "\n";
    }
    out << "[log " << o.name << "]\n";
    for (const auto& e : o.log_excerpt) out << format_log_entry(e) << "\n";
  }
  if (comparison) {
    out << "[comparison]\n";
    for (size_t i = 0; i < comparison->actions.size(); ++i) {
      const auto& a = comparison->actions[i];
      out << "action " << i << " forged " << (a.forged ? 1 : 0) << " label "
          << a.label << " baseline " << to_string(a.baseline) << " trusttoken "
          << to_string(a.trusttoken) << "\n";
    }
  }
  out << "[end]\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Parsing (for the report subcommand)

struct ParsedReport {
  std::string filename;
  std::string kind;
  uint64_t seed = 0;
  std::string config_json;
  std::map<std::string, std::vector<std::string>> sections;  // name -> lines
  std::string raw;
};

inline ParsedReport parse_report_text(const std::string& text,
                                      const std::string& filename) {
  auto malformed = [&](const std::string& what) -> ValidationError {
    return ValidationError(filename + ": " + what);
  };

  std::istringstream in(text);
  std::string line;
  ParsedReport report;
  report.filename = filename;
  report.raw = text;

  if (!std::getline(in, line) || line != kReportMagic) {
    throw malformed("not a ttsim report (bad magic line)");
  }
  if (!std::getline(in, line) || line.rfind("kind ", 0) != 0) {
    throw malformed("missing kind line");
  }
  report.kind = line.substr(5);
  if (report.kind != "puf-eval" && report.kind != "run-scenarios") {
    throw malformed("unknown report kind: " + report.kind);
  }
  if (!std::getline(in, line) || line.rfind("seed ", 0) != 0) {
    throw malformed("missing seed line");
  }
  try {
    report.seed = std::stoull(line.substr(5));
  } catch (const std::exception&) {
    throw malformed("bad seed value");
  }
  if (!std::getline(in, line) || line.rfind("config ", 0) != 0) {
    throw malformed("missing config line");
  }
  report.config_json = line.substr(7);

  std::string section;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "[end]") {
      ended = true;
      break;
    }
    if (!line.empty() && line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      report.sections[section];  // record even if empty
      continue;
    }
    if (section.empty()) throw malformed("content before first section");
    report.sections[section].push_back(line);
  }
  if (!ended) throw malformed("missing [end] marker");
  return report;
}

inline ParsedReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read report file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report_text(buf.str(), path);
}

namespace repdetail {

/// "key v1 v2 ..." -> values for key, from a metrics-style section.
inline std::optional<std::vector<std::string>> section_values(
    const std::vector<std::string>& lines, const std::string& key) {
  for (const auto& line : lines) {
    if (line.rfind(key + " ", 0) == 0) {
      std::istringstream in(line.substr(key.size() + 1));
      std::vector<std::string> values;
      std::string v;
      while (in >> v) values.push_back(v);
      return values;
    }
  }
  return std::nullopt;
}

}  // namespace repdetail

/// Order-independent consolidation: inputs are sorted by (kind, seed,
/// content) before rendering, so any permutation of the same files prints
/// identical bytes.
inline std::string render_consolidated(std::vector<ParsedReport> reports) {
  std::sort(reports.begin(), reports.end(),
            [](const ParsedReport& a, const ParsedReport& b) {
              if (a.kind != b.kind) return a.kind < b.kind;
              if (a.seed != b.seed) return a.seed < b.seed;
              return a.raw < b.raw;
            });

  std::ostringstream out;
  out << "ttsim consolidated report\n";
  out << "inputs " << reports.size() << "\n";
  for (const auto& r : reports) {
    out << "== " << r.kind << " seed " << r.seed << " ==\n";
    if (r.kind == "puf-eval") {
      auto metrics = r.sections.find("metrics");
      if (metrics == r.sections.end()) {
        throw ValidationError(r.filename + ": puf-eval report without metrics");
      }
      const auto& lines = metrics->second;
      auto value = [&](const std::string& key) -> std::string {
        auto v = repdetail::section_values(lines, key);
        if (!v || v->empty()) {
          throw ValidationError(r.filename + ": missing metric: " + key);
        }
        return (*v)[0];
      };
      auto window = [&](const std::string& key) {
        auto v = repdetail::section_values(lines, key);
        if (!v || v->size() < 2) {
          throw ValidationError(r.filename + ": missing window: " + key);
        }
        return *v;
      };
      const auto wu = window("window_uniqueness");
      const auto wf = window("window_uniformity");
      const auto wh = window("window_hd");
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%-12s %s  window [%s, %s]\n",
                    "uniqueness", value("uniqueness").c_str(), wu[0].c_str(),
                    wu[1].c_str());
      out << buf;
      std::snprintf(buf, sizeof(buf), "%-12s %s  window [%s, %s]\n",
                    "uniformity", value("uniformity").c_str(), wf[0].c_str(),
                    wf[1].c_str());
      out << buf;
      std::snprintf(buf, sizeof(buf), "%-12s %s  min %s\n", "reliability",
                    value("reliability").c_str(),
                    value("window_reliability_min").c_str());
      out << buf;
      std::snprintf(buf, sizeof(buf), "%-12s %s  window [%s, %s] min-mass %s\n",
                    "hd_in_window", value("hd_in_window").c_str(),
                    wh[0].c_str(), wh[1].c_str(),
                    wh.size() > 2 ? wh[2].c_str() : "?");
      out << buf;
      out << "accepted " << (value("accepted") == "1" ? "yes" : "no") << "\n";
    } else {
      auto summary = r.sections.find("summary");
      if (summary == r.sections.end()) {
        throw ValidationError(r.filename +
                              ": run-scenarios report without summary");
      }
      for (const auto& line : summary->second) {
        std::istringstream in(line);
        std::string tag;
        in >> tag;
        if (tag == "scenario") {
          std::string name, kw, passed;
          in >> name >> kw >> passed;
          char buf[128];
          std::snprintf(buf, sizeof(buf), "%-30s %s\n", name.c_str(),
                        passed == "1" ? "PASS" : "FAIL");
          out << buf;
        } else if (tag == "comparison") {
          auto fields = repdetail::section_values(summary->second, "comparison");
          std::string passed = fields && !fields->empty() ? (*fields)[1] : "0";
          std::string bb = fields && fields->size() >= 4 ? (*fields)[3] : "?";
          std::string tb = fields && fields->size() >= 6 ? (*fields)[5] : "?";
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "%-30s %s  (baseline breaches %s, trusttoken breaches %s)\n",
                        "comparison", passed == "1" ? "PASS" : "FAIL",
                        bb.c_str(), tb.c_str());
          out << buf;
        } else if (tag == "overall") {
          std::string flag;
          in >> flag;
          out << "overall " << (flag == "1" ? "PASS" : "FAIL") << "\n";
        }
      }
    }
  }
  return out.str();
}

}  // namespace trusttoken

#endif  // TRUSTTOKEN_REPORT_HPP
