// Copyright ttsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0
//
// ttsim — deterministic simulator of the TrustToken secure-SoC protocol:
// PUF characterization, attack-scenario evaluation and report consolidation.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trusttoken/commands.hpp"

namespace {

using namespace trusttoken;

RunConfig effective_config(const std::string& config_path,
                           const std::optional<uint64_t>& seed_override,
                           const std::string& out_override) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  if (!out_override.empty()) cfg.output_path = out_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttsim: TrustToken secure-SoC protocol simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::string out_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (JSON)");
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_option("--out", out_override, "override the report path");
  };

  CLI::App* puf_eval = app.add_subcommand(
      "puf-eval", "characterize a simulated PUF device population");
  add_common(puf_eval);

  CLI::App* run_scenarios = app.add_subcommand(
      "run-scenarios", "run the attack/workload scenario suite");
  add_common(run_scenarios);

  CLI::App* report = app.add_subcommand(
      "report", "consolidate previously written report files");
  std::vector<std::string> report_inputs;
  report->add_option("inputs", report_inputs, "report files to consolidate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidationError;
  }

  try {
    if (puf_eval->parsed()) {
      return cmd_puf_eval(
          effective_config(config_path, seed_override, out_override),
          std::cout);
    }
    if (run_scenarios->parsed()) {
      return cmd_run_scenarios(
          effective_config(config_path, seed_override, out_override),
          std::cout);
    }
    return cmd_report(report_inputs, std::cout);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitIoError;
  }
}
