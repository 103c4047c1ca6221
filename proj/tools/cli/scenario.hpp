#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nlsync/model.hpp"
#include "nlsync/ode_sim.hpp"
#include "nlsync/pde.hpp"

namespace nlsync::cli {

/// A malformed or inconsistent configuration entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config error: " + key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using IcProfile = std::array<CosineProfile, 3>;

struct ScenarioConfig {
  Params params;
  Grid1D grid;
  StepperConfig stepper;
  State3 u0{{0.349, 0.0, -0.3}};
  IcProfile master_ic;
  IcProfile slave_ic;
  double t_end = 200.0;
  bool controls_on = true;
  std::size_t snapshot_count = 200;
  std::optional<std::filesystem::path> output_dir;
  std::optional<double> u3_sup;
  std::optional<std::filesystem::path> manifest;
  LyapunovOptions lyapunov;
  std::string preset = "none";

  ScenarioConfig();
  std::filesystem::path out_or_default() const { return output_dir.value_or("out"); }
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ScenarioConfig preset(const std::string& name);

IcProfile paper_master_ic();
IcProfile paper_slave_ic();

/// Parses a flat `key = value` file; `#` starts a comment, blank lines are
/// ignored. Throws ConfigError (key "config") on malformed lines, IoError if
/// the file cannot be read.
KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::filesystem::path& path);

/// Applies one entry. Keys use underscores (`grid_n`, `t_end`, ...).
void apply_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Resolves the effective configuration: preset (last `preset` entry wins),
/// then file entries, then flag entries. Validates the result and writes
/// Neumann-compatibility warnings to `warnings`.
ScenarioConfig resolve_config(const KeyValues& file_entries, const KeyValues& flag_entries,
                              std::ostream* warnings = nullptr);

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& cfg);

/// Wavenumbers whose cosine is not Neumann-compatible on [0, L].
std::vector<std::string> neumann_warnings(const ScenarioConfig& cfg);

nlohmann::ordered_json to_json(const ScenarioConfig& cfg);

}  // namespace nlsync::cli
