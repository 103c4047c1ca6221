#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "scenario.hpp"

namespace nlsync::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitBlowUp = 4,
};

std::string version();

/// JSON array: one entry per equilibrium (point, eigenvalues as [re, im]
/// pairs, stable flag, residual).
nlohmann::ordered_json equilibria_report(const ScenarioConfig& cfg);
nlohmann::ordered_json lyapunov_report(const ScenarioConfig& cfg);
/// Throws ConfigError("u3_sup") when neither u3_sup nor a manifest is given.
nlohmann::ordered_json stability_report(const ScenarioConfig& cfg);

int cmd_equilibria(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_ode(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_lyapunov(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sync(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_stability_check(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nlsync::cli
