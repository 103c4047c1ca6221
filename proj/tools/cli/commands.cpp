#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <vector>

#include "CLI11.hpp"
#include "io.hpp"
#include "nlsync/model.hpp"
#include "nlsync/ode_sim.hpp"
#include "nlsync/sync.hpp"

#ifndef NLSYNC_VERSION
#define NLSYNC_VERSION "0.0.0"
#endif

namespace nlsync::cli {

using ojson = nlohmann::ordered_json;

std::string version() { return NLSYNC_VERSION; }

namespace {

constexpr double kSyncTolerance = 1e-3;
constexpr std::size_t kMaxReportedMode = 64;
constexpr const char* kManifestSchema = "nlsync-manifest/1";

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson complex_pairs(const Complex3& z) {
  ojson arr = ojson::array();
  for (const auto& c : z) arr.push_back({c.real(), c.imag()});
  return arr;
}

// Collects output files and writes manifest.json last.
class Manifest {
 public:
  Manifest(std::string command, const ScenarioConfig& cfg)
      : start_(utc_now()) {
    body_["schema"] = kManifestSchema;
    body_["command"] = std::move(command);
    body_["version"] = version();
    body_["status"] = "complete";
    body_["config"] = to_json(cfg);
  }

  void output(const std::string& file, std::size_t rows) {
    outputs_.push_back({{"file", file}, {"rows", rows}});
  }
  ojson& operator[](const char* key) { return extra_[key]; }

  void write(const std::filesystem::path& dir) {
    ojson j = body_;
    j["wall_time"] = {{"start", start_}, {"end", utc_now()}};
    j["outputs"] = outputs_;
    for (auto& [k, v] : extra_.items()) j[k] = v;
    write_text_file(dir / "manifest.json", dump(j));
  }

 private:
  std::string start_;
  ojson body_;
  ojson outputs_ = ojson::array();
  ojson extra_ = ojson::object();
};

void emit_report(const ScenarioConfig& cfg, const ojson& report, const char* file,
                 std::ostream& out) {
  const std::string text = dump(report);
  out << text;
  if (cfg.output_dir) {
    OutputLock lock(*cfg.output_dir);
    write_text_file(*cfg.output_dir / file, text);
  }
}

std::vector<double> axis_samples(double sup, std::size_t count) {
  if (sup == 0.0) return {0.0};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = -sup + 2.0 * sup * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

ojson read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("manifest", "cannot read " + path.string());
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", "invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string snapshot_name(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu.csv", prefix, index);
  return buf;
}

std::size_t write_field(const std::filesystem::path& path, const Field3& f) {
  CsvWriter csv(path, {"x", "c1", "c2", "c3"});
  for (std::size_t i = 0; i < f.grid.n; ++i)
    csv.row({f.grid.x(i), f.c[0][i], f.c[1][i], f.c[2][i]});
  csv.close();
  return csv.rows();
}

}  // namespace

ojson equilibria_report(const ScenarioConfig& cfg) {
  ojson arr = ojson::array();
  for (const auto& eq : find_equilibria(cfg.params)) {
    arr.push_back({{"point", {eq.point[0], eq.point[1], eq.point[2]}},
                   {"eigenvalues", complex_pairs(eq.eigenvalues)},
                   {"stable", eq.stable},
                   {"residual", eq.residual}});
  }
  return arr;
}

ojson lyapunov_report(const ScenarioConfig& cfg) {
  const LyapunovSpectrum spec =
      lyapunov_spectrum(cfg.u0, cfg.params, cfg.stepper.dt, cfg.t_end, cfg.lyapunov);
  const double sum = spec.exponents[0] + spec.exponents[1] + spec.exponents[2];
  return ojson{{"exponents", {spec.exponents[0], spec.exponents[1], spec.exponents[2]}},
               {"horizon", spec.horizon},
               {"sum", sum},
               {"divergence", divergence(cfg.params)},
               {"dt", cfg.stepper.dt},
               {"transient", cfg.lyapunov.transient},
               {"reortho_interval", cfg.lyapunov.reortho_interval},
               {"u0", {cfg.u0[0], cfg.u0[1], cfg.u0[2]}}};
}

ojson stability_report(const ScenarioConfig& cfg) {
  std::array<double, 3> box{0.0, 0.0, 0.0};
  std::string source;
  if (cfg.u3_sup) {
    box[2] = *cfg.u3_sup;
    source = "flag";
  } else if (cfg.manifest) {
    const ojson m = read_json(*cfg.manifest);
    if (!m.contains("u3_sup") || !m["u3_sup"].is_number())
      throw ConfigError("manifest", "no numeric u3_sup in " + cfg.manifest->string());
    box[2] = m["u3_sup"].get<double>();
    if (m.contains("master_sup") && m["master_sup"].is_array() && m["master_sup"].size() == 3) {
      box[0] = m["master_sup"][0].get<double>();
      box[1] = m["master_sup"][1].get<double>();
    }
    source = cfg.manifest->string();
  } else {
    throw ConfigError("u3_sup", "provide --u3-sup or --manifest from a previous run");
  }

  const ConditionReport cond = check_condition_313(box[2], cfg.grid, cfg.params);
  const auto s1 = axis_samples(box[0], 5);
  const auto s2 = axis_samples(box[1], 5);
  const auto s3 = axis_samples(box[2], 5);

  ojson modes = ojson::array();
  bool all_stable = true;
  const std::size_t last = std::min(cfg.grid.n - 1, kMaxReportedMode);
  for (std::size_t i = 0; i <= last; ++i) {
    bool stable = true;
    double max_trace = -INFINITY, max_det = -INFINITY, max_comp = -INFINITY;
    std::size_t samples = 0;
    for (double a : s1)
      for (double b : s2)
        for (double c : s3) {
          const auto cert = hurwitz_certificate(mode_matrix(i, State3{{a, b, c}}, cfg.grid, cfg.params));
          stable = stable && cert.stable;
          max_trace = std::max(max_trace, cert.trace);
          max_det = std::max(max_det, cert.det);
          max_comp = std::max(max_comp, cert.compound_det);
          ++samples;
        }
    all_stable = all_stable && stable;
    modes.push_back({{"i", i},
                     {"lambda", neumann_eigenvalue(i, cfg.grid)},
                     {"stable", stable},
                     {"max_trace", max_trace},
                     {"max_det", max_det},
                     {"max_compound_det", max_comp},
                     {"samples", samples}});
  }

  return ojson{{"u3_sup", box[2]},
               {"u_box", {box[0], box[1], box[2]}},
               {"source", source},
               {"k", cfg.params.k},
               {"lhs", cond.lhs},
               {"rhs", cond.rhs},
               {"satisfied", cond.satisfied},
               {"k_min", cond.k_min},
               {"all_modes_stable", all_stable},
               {"modes", modes}};
}

int cmd_equilibria(const ScenarioConfig& cfg, std::ostream& out, std::ostream&) {
  emit_report(cfg, equilibria_report(cfg), "equilibria.json", out);
  return kExitOk;
}

int cmd_lyapunov(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.t_end < 1000.0)
    err << "warning: t_end = " << format_double(cfg.t_end)
        << " is short; exponents typically need t_end >= 1000\n";
  emit_report(cfg, lyapunov_report(cfg), "lyapunov.json", out);
  return kExitOk;
}

int cmd_stability_check(const ScenarioConfig& cfg, std::ostream& out, std::ostream&) {
  emit_report(cfg, stability_report(cfg), "stability.json", out);
  return kExitOk;
}

int cmd_ode(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto dir = cfg.out_or_default();
  OutputLock lock(dir);
  Manifest manifest("ode", cfg);
  try {
    const OdeRun run = integrate_ode(cfg.u0, cfg.params, cfg.stepper.dt, cfg.t_end);
    CsvWriter csv(dir / "states.csv", {"t", "u1", "u2", "u3"});
    std::array<double, 3> sup{};
    for (std::size_t i = 0; i < run.t.size(); ++i) {
      const State3& u = run.states[i];
      csv.row({run.t[i], u[0], u[1], u[2]});
      for (std::size_t j = 0; j < 3; ++j) sup[j] = std::max(sup[j], std::abs(u[j]));
    }
    csv.close();
    manifest.output("states.csv", csv.rows());
    manifest["failure_time"] = nullptr;
    manifest["u3_sup"] = sup[2];
    manifest["master_sup"] = {sup[0], sup[1], sup[2]};
    manifest.write(dir);
    out << "wrote " << csv.rows() << " rows to " << (dir / "states.csv").string() << '\n';
    return kExitOk;
  } catch (const DivergenceError& e) {
    manifest["status"] = "failed";
    manifest["failure_time"] = e.time();
    manifest["failure_message"] = e.what();
    manifest.write(dir);
    err << "error: " << e.what() << '\n';
    return kExitBlowUp;
  }
}

int cmd_sync(const ScenarioConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto dir = cfg.out_or_default();
  OutputLock lock(dir);
  Manifest manifest("sync", cfg);

  const Field3 master = make_field(cfg.grid, cfg.master_ic);
  const Field3 slave = make_field(cfg.grid, cfg.slave_ic);

  std::vector<std::pair<std::string, std::size_t>> snapshots;
  SyncOptions opts;
  opts.snapshot_count = cfg.snapshot_count;
  opts.on_snapshot = [&](std::size_t index, double, const Field3& u, const Field3& v) {
    const std::string mname = snapshot_name("master", index);
    const std::string sname = snapshot_name("slave", index);
    snapshots.emplace_back(mname, write_field(dir / mname, u));
    snapshots.emplace_back(sname, write_field(dir / sname, v));
  };

  const SyncResult res =
      run_master_slave(master, slave, cfg.params, cfg.stepper, cfg.t_end, cfg.controls_on, opts);

  const SyncTrace& tr = res.trace;
  CsvWriter csv(dir / "trace.csv",
                {"t", "err_sup", "V", "I_term", "J_term", "cond313_lhs", "cond313_rhs"});
  for (std::size_t i = 0; i < tr.size(); ++i) {
    csv.row({tr.t[i], tr.err_sup[i], tr.V[i], tr.I_term[i], tr.J_term[i], tr.cond313_lhs[i],
             tr.cond313_rhs[i]});
  }
  csv.close();

  manifest.output("trace.csv", csv.rows());
  for (const auto& [name, rows] : snapshots) manifest.output(name, rows);
  manifest["status"] = res.completed ? "complete" : "failed";
  manifest["controls"] = cfg.controls_on ? "on" : "off";
  manifest["synchronized"] = res.synchronized(kSyncTolerance);
  manifest["sync_tolerance"] = kSyncTolerance;
  manifest["final_err_sup"] = tr.err_sup.empty() ? 0.0 : tr.err_sup.back();
  manifest["failure_time"] = res.failure_time ? ojson(*res.failure_time) : ojson(nullptr);
  if (!res.completed) manifest["failure_message"] = res.failure_message;
  manifest["u3_sup"] = res.master_sup[2];
  manifest["master_sup"] = {res.master_sup[0], res.master_sup[1], res.master_sup[2]};
  manifest.write(dir);

  if (!res.completed) {
    err << "error: run blew up at t = " << format_double(*res.failure_time) << ": "
        << res.failure_message << '\n';
    return kExitBlowUp;
  }
  out << "wrote " << csv.rows() << " trace rows and " << snapshots.size()
      << " snapshots to " << dir.string() << "; final err_sup = "
      << format_double(tr.err_sup.back()) << '\n';
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Newton-Leipnik reaction-diffusion synchronization toolkit", "nlsync"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  KeyValues flags;

  static const std::vector<std::pair<std::string, std::string>> kFlags = {
      {"--preset", "preset"},
      {"--a", "a"},
      {"--alpha", "alpha"},
      {"--k", "k"},
      {"--d1", "d1"},
      {"--d2", "d2"},
      {"--d3", "d3"},
      {"--grid-n", "grid_n"},
      {"--length", "length"},
      {"--dt", "dt"},
      {"--t-end", "t_end"},
      {"--scheme", "scheme"},
      {"--u0", "u0"},
      {"--master-ic", "master_ic"},
      {"--slave-ic", "slave_ic"},
      {"--controls", "controls"},
      {"--snapshot-count", "snapshot_count"},
      {"--out", "out"},
      {"--u3-sup", "u3_sup"},
      {"--manifest", "manifest"},
      {"--transient", "transient"},
      {"--reortho-interval", "reortho_interval"},
  };

  using Command = int (*)(const ScenarioConfig&, std::ostream&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"equilibria", "Find and classify the equilibria", &cmd_equilibria},
      {"ode", "Integrate the ODE and write states.csv", &cmd_ode},
      {"lyapunov", "Estimate the Lyapunov spectrum", &cmd_lyapunov},
      {"sync", "Run the controlled master/slave PDE pair", &cmd_sync},
      {"stability-check", "Evaluate the mode stability condition", &cmd_stability_check},
  };

  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const auto& [flag, key] : kFlags) {
      sub->add_option_function<std::string>(
             flag, [&flags, key = key](const std::string& v) { flags.emplace_back(key, v); },
             "overrides config key '" + key + "'")
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    sub->callback([&selected, fn = fn] { selected = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const KeyValues file_entries = config_path.empty() ? KeyValues{} : read_config_file(config_path);
    const ScenarioConfig cfg = resolve_config(file_entries, flags, &err);
    return selected(cfg, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace nlsync::cli
