#include "scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "io.hpp"

namespace nlsync::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_tokens(const std::string& value) {
  std::string spaced = value;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, x);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError(key, "cannot parse '" + raw + "' as a number");
  return x;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, "cannot parse '" + raw + "' as a non-negative integer");
  return x;
}

// Accepts plain numbers and multiples of pi: "1.5", "pi", "0.5pi", "3pi/5".
double parse_wavenumber(const std::string& key, const std::string& raw) {
  const auto at = raw.find("pi");
  if (at == std::string::npos) return parse_number(key, raw);
  const std::string coeff = raw.substr(0, at);
  const std::string rest = raw.substr(at + 2);
  double value = std::numbers::pi;
  if (!coeff.empty()) value *= (coeff == "-" ? -1.0 : parse_number(key, coeff));
  if (!rest.empty()) {
    if (rest.front() != '/') throw ConfigError(key, "cannot parse wavenumber '" + raw + "'");
    const double den = parse_number(key, rest.substr(1));
    if (den == 0.0) throw ConfigError(key, "zero denominator in '" + raw + "'");
    value /= den;
  }
  return value;
}

bool parse_switch(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ConfigError(key, "expected on|off, got '" + raw + "'");
}

IcProfile parse_ic(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "paper-master") return paper_master_ic();
  if (s == "paper-slave") return paper_slave_ic();
  const auto tok = split_tokens(s);
  if (tok.size() != 6)
    throw ConfigError(key, "expected a preset name or six values 'base omega' x3, got '" + raw + "'");
  IcProfile ic;
  for (std::size_t j = 0; j < 3; ++j)
    ic[j] = CosineProfile{parse_number(key, tok[2 * j]), parse_wavenumber(key, tok[2 * j + 1])};
  return ic;
}

State3 parse_state(const std::string& key, const std::string& raw) {
  if (trim(raw) == "paper") return State3{{0.349, 0.0, -0.3}};
  const auto tok = split_tokens(raw);
  if (tok.size() != 3) throw ConfigError(key, "expected three values, got '" + raw + "'");
  return State3{{parse_number(key, tok[0]), parse_number(key, tok[1]), parse_number(key, tok[2])}};
}

std::string scheme_name(DiffusionScheme s) {
  return s == DiffusionScheme::CrankNicolson ? "crank-nicolson" : "backward-euler";
}

}  // namespace

IcProfile paper_master_ic() {
  constexpr double pi = std::numbers::pi;
  return {CosineProfile{0.349, pi / 2}, CosineProfile{0.0, pi / 2}, CosineProfile{-0.3, pi / 2}};
}

IcProfile paper_slave_ic() {
  constexpr double pi = std::numbers::pi;
  return {CosineProfile{0.7, 3 * pi / 5}, CosineProfile{0.15, 2 * pi / 5},
          CosineProfile{0.7, 7 * pi / 10}};
}

ScenarioConfig::ScenarioConfig() : master_ic(paper_master_ic()), slave_ic(paper_slave_ic()) {}

std::vector<std::string> preset_names() { return {"paper-ode", "paper-lyapunov", "paper-sync"}; }

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.preset = name;
  if (name == "none") return cfg;
  if (name == "paper-ode") {
    cfg.t_end = 200.0;
  } else if (name == "paper-lyapunov") {
    cfg.t_end = 5000.0;
  } else if (name == "paper-sync") {
    cfg.t_end = 40.0;
    cfg.params.k = 5.0;
    cfg.grid = Grid1D{10.0, 201};
    cfg.stepper = StepperConfig{1e-3, DiffusionScheme::CrankNicolson};
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  return cfg;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(body.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) throw ConfigError("config", "line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "preset") {
    cfg.preset = trim(value);
  } else if (key == "a") {
    cfg.params.a = parse_number(key, value);
  } else if (key == "alpha") {
    cfg.params.alpha = parse_number(key, value);
  } else if (key == "k") {
    cfg.params.k = parse_number(key, value);
  } else if (key == "d1") {
    cfg.params.d1 = parse_number(key, value);
  } else if (key == "d2") {
    cfg.params.d2 = parse_number(key, value);
  } else if (key == "d3") {
    cfg.params.d3 = parse_number(key, value);
  } else if (key == "grid_n") {
    cfg.grid.n = parse_count(key, value);
  } else if (key == "length") {
    cfg.grid.length = parse_number(key, value);
  } else if (key == "dt") {
    cfg.stepper.dt = parse_number(key, value);
  } else if (key == "t_end") {
    cfg.t_end = parse_number(key, value);
  } else if (key == "scheme") {
    const std::string s = trim(value);
    if (s == "cn" || s == "crank-nicolson")
      cfg.stepper.scheme = DiffusionScheme::CrankNicolson;
    else if (s == "be" || s == "backward-euler")
      cfg.stepper.scheme = DiffusionScheme::BackwardEuler;
    else
      throw ConfigError(key, "expected crank-nicolson|backward-euler, got '" + value + "'");
  } else if (key == "u0") {
    cfg.u0 = parse_state(key, value);
  } else if (key == "master_ic") {
    cfg.master_ic = parse_ic(key, value);
  } else if (key == "slave_ic") {
    cfg.slave_ic = parse_ic(key, value);
  } else if (key == "controls") {
    cfg.controls_on = parse_switch(key, value);
  } else if (key == "snapshot_count") {
    cfg.snapshot_count = parse_count(key, value);
  } else if (key == "out") {
    if (trim(value).empty()) throw ConfigError(key, "empty output directory");
    cfg.output_dir = trim(value);
  } else if (key == "u3_sup") {
    cfg.u3_sup = parse_number(key, value);
  } else if (key == "manifest") {
    cfg.manifest = trim(value);
  } else if (key == "transient") {
    cfg.lyapunov.transient = parse_number(key, value);
  } else if (key == "reortho_interval") {
    cfg.lyapunov.reortho_interval = parse_number(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

ScenarioConfig resolve_config(const KeyValues& file_entries, const KeyValues& flag_entries,
                              std::ostream* warnings) {
  std::string preset_name = "none";
  for (const auto* entries : {&file_entries, &flag_entries})
    for (const auto& [k, v] : *entries)
      if (k == "preset") preset_name = trim(v);

  ScenarioConfig cfg = preset(preset_name);
  for (const auto* entries : {&file_entries, &flag_entries})
    for (const auto& [k, v] : *entries)
      if (k != "preset") apply_entry(cfg, k, v);

  validate(cfg);
  if (warnings)
    for (const auto& w : neumann_warnings(cfg)) *warnings << "warning: " << w << '\n';
  return cfg;
}

void validate(const ScenarioConfig& cfg) {
  const Params& p = cfg.params;
  if (p.k < 0.0) throw ConfigError("k", "must be >= 0");
  if (p.d1 <= 0.0) throw ConfigError("d1", "must be > 0");
  if (p.d2 <= 0.0) throw ConfigError("d2", "must be > 0");
  if (p.d3 <= 0.0) throw ConfigError("d3", "must be > 0");
  if (cfg.grid.n < 3) throw ConfigError("grid_n", "must be >= 3");
  if (!(cfg.grid.length > 0.0)) throw ConfigError("length", "must be > 0");
  if (!(cfg.stepper.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  if (!(cfg.t_end >= cfg.stepper.dt)) throw ConfigError("t_end", "must be >= dt");
  if (cfg.snapshot_count < 1) throw ConfigError("snapshot_count", "must be >= 1");
  if (cfg.lyapunov.transient < 0.0) throw ConfigError("transient", "must be >= 0");
  if (!(cfg.lyapunov.reortho_interval > 0.0)) throw ConfigError("reortho_interval", "must be > 0");
  if (cfg.u3_sup && *cfg.u3_sup < 0.0) throw ConfigError("u3_sup", "must be >= 0");
}

std::vector<std::string> neumann_warnings(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  const double L = cfg.grid.length;
  const auto check = [&](const char* which, const IcProfile& ic) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (ic[j].base == 0.0 || ic[j].amplitude == 0.0) continue;
      const double s = std::sin(ic[j].omega * L);
      if (std::abs(s) > 1e-9) {
        out.push_back(std::string(which) + " component " + std::to_string(j + 1) +
                      ": wavenumber " + format_double(ic[j].omega) +
                      " is not Neumann-compatible on length " + format_double(L));
      }
    }
  };
  check("master_ic", cfg.master_ic);
  check("slave_ic", cfg.slave_ic);
  return out;
}

nlohmann::ordered_json to_json(const ScenarioConfig& cfg) {
  const auto ic_json = [](const IcProfile& ic) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : ic)
      arr.push_back({{"base", c.base}, {"omega", c.omega}, {"amplitude", c.amplitude}});
    return arr;
  };
  nlohmann::ordered_json j;
  j["preset"] = cfg.preset;
  j["params"] = {{"a", cfg.params.a},   {"alpha", cfg.params.alpha}, {"k", cfg.params.k},
                 {"d1", cfg.params.d1}, {"d2", cfg.params.d2},       {"d3", cfg.params.d3}};
  j["grid"] = {{"length", cfg.grid.length}, {"n", cfg.grid.n}};
  j["stepper"] = {{"dt", cfg.stepper.dt}, {"scheme", scheme_name(cfg.stepper.scheme)}};
  j["t_end"] = cfg.t_end;
  j["u0"] = {cfg.u0[0], cfg.u0[1], cfg.u0[2]};
  j["master_ic"] = ic_json(cfg.master_ic);
  j["slave_ic"] = ic_json(cfg.slave_ic);
  j["controls"] = cfg.controls_on ? "on" : "off";
  j["snapshot_count"] = cfg.snapshot_count;
  j["lyapunov"] = {{"transient", cfg.lyapunov.transient},
                   {"reortho_interval", cfg.lyapunov.reortho_interval}};
  return j;
}

}  // namespace nlsync::cli
