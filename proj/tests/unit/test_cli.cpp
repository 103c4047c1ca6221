#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "io.hpp"
#include "json.hpp"
#include "nlsync/sync.hpp"
#include "scenario.hpp"

namespace nlsync::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

const fs::path kSource = NLSYNC_SOURCE_DIR;

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = fs::temp_directory_path() / ("nlsync-test-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "nlsync");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Subset of JSON Schema used by the shipped manifest schema: type, const,
// enum, required, properties, items.
void check_schema(const json& schema, const json& value, const std::string& where,
                  std::vector<std::string>& errors) {
  const auto type_ok = [&](const std::string& t) {
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "string") return value.is_string();
    if (t == "number") return value.is_number();
    if (t == "integer") return value.is_number_integer();
    if (t == "boolean") return value.is_boolean();
    if (t == "null") return value.is_null();
    return false;
  };
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = type_ok(t.get<std::string>());
    else
      for (const auto& alt : t) ok = ok || type_ok(alt.get<std::string>());
    if (!ok) errors.push_back(where + ": wrong type");
  }
  if (schema.contains("const") && schema["const"] != value) errors.push_back(where + ": const mismatch");
  if (schema.contains("enum")) {
    const auto& e = schema["enum"];
    if (std::find(e.begin(), e.end(), value) == e.end()) errors.push_back(where + ": not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          errors.push_back(where + ": missing " + key.get<std::string>());
    if (schema.contains("properties"))
      for (const auto& [key, sub] : schema["properties"].items())
        if (value.contains(key)) check_schema(sub, value[key], where + "." + key, errors);
  }
  if (value.is_array() && schema.contains("items"))
    for (std::size_t i = 0; i < value.size(); ++i)
      check_schema(schema["items"], value[i], where + "[" + std::to_string(i) + "]", errors);
}

std::vector<std::string> validate_manifest(const fs::path& manifest) {
  const json schema = json::parse(slurp(kSource / "schemas" / "manifest.schema.json"));
  std::vector<std::string> errors;
  check_schema(schema, json::parse(slurp(manifest)), "$", errors);
  return errors;
}

std::string strip_wall_time(const std::string& manifest_text) {
  json j = json::parse(manifest_text);
  j.erase("wall_time");
  return j.dump();
}

// Small sync run: 21 nodes, 50 steps.
std::vector<std::string> small_sync(const fs::path& out) {
  return {"sync", "--preset", "paper-sync", "--grid-n", "21", "--dt", "1e-2", "--t-end", "0.5",
          "--snapshot-count", "3", "--out", out.string()};
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.349), "0.349");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.3), "-0.3");
  EXPECT_EQ(format_double(40.0), "40");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> exponent(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::pow(10.0, exponent(rng)) * (i % 2 ? 1 : -1);
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, x) << s;
  }
}

TEST(CsvWriter, SingleHeaderLfRows) {
  TempDir dir;
  CsvWriter csv(dir / "a.csv", {"t", "x"});
  csv.row({0.0, 0.1});
  csv.row({1.5, -2.0});
  csv.close();
  EXPECT_EQ(csv.rows(), 2u);
  EXPECT_EQ(slurp(dir / "a.csv"), "t,x\n0,0.1\n1.5,-2\n");
}

TEST(CsvWriter, RejectsWrongWidth) {
  TempDir dir;
  CsvWriter csv(dir / "a.csv", {"t", "x"});
  EXPECT_THROW(csv.row({1.0}), std::logic_error);
}

TEST(OutputLock, SecondHolderIsRejected) {
  TempDir dir;
  {
    OutputLock first(dir.path());
    EXPECT_TRUE(fs::exists(dir / OutputLock::kFileName));
    EXPECT_THROW(OutputLock second(dir.path()), IoError);
  }
  EXPECT_FALSE(fs::exists(dir / OutputLock::kFileName));
}

TEST(ParseConfig, CommentsDashesAndBlankLines) {
  const auto kv = parse_config_text("# header\n\n t-end = 5 # trailing\nalpha=0.2\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"t_end", "5"}));
  EXPECT_EQ(kv[1], (std::pair<std::string, std::string>{"alpha", "0.2"}));
  EXPECT_THROW(parse_config_text("alpha 0.2\n"), ConfigError);
}

TEST(ApplyEntry, WavenumberForms) {
  ScenarioConfig cfg;
  apply_entry(cfg, "master_ic", "1 pi  2 0.5pi  3 3pi/5");
  EXPECT_EQ(cfg.master_ic[0].omega, std::numbers::pi);
  EXPECT_EQ(cfg.master_ic[1].omega, 0.5 * std::numbers::pi);
  EXPECT_NEAR(cfg.master_ic[2].omega, 3 * std::numbers::pi / 5, 1e-15);
  EXPECT_EQ(cfg.master_ic[2].base, 3.0);
  apply_entry(cfg, "slave_ic", "paper-slave");
  EXPECT_EQ(cfg.slave_ic[1].base, 0.15);
  EXPECT_THROW(apply_entry(cfg, "slave_ic", "1 2 3"), ConfigError);
  EXPECT_THROW(apply_entry(cfg, "slave_ic", "1 2pix 0 0 0 0"), ConfigError);
}

TEST(ApplyEntry, ErrorsNameTheKey) {
  ScenarioConfig cfg;
  try {
    apply_entry(cfg, "alpha", "abc");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "alpha");
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  EXPECT_THROW(apply_entry(cfg, "nonsense", "1"), ConfigError);
  EXPECT_THROW(apply_entry(cfg, "controls", "maybe"), ConfigError);
  EXPECT_THROW(apply_entry(cfg, "grid_n", "-3"), ConfigError);
}

TEST(ResolveConfig, PrecedenceIsPresetThenFileThenFlags) {
  const KeyValues file{{"k", "7"}, {"t_end", "3"}, {"preset", "paper-sync"}};
  const KeyValues flags{{"k", "9"}};
  const ScenarioConfig cfg = resolve_config(file, flags);
  EXPECT_EQ(cfg.preset, "paper-sync");
  EXPECT_EQ(cfg.params.k, 9.0);
  EXPECT_EQ(cfg.t_end, 3.0);
  EXPECT_EQ(cfg.grid.n, 201u);

  const ScenarioConfig flagged = resolve_config(file, {{"preset", "paper-ode"}});
  EXPECT_EQ(flagged.preset, "paper-ode");
  EXPECT_EQ(flagged.t_end, 3.0);
}

TEST(ResolveConfig, ValidationAndWarnings) {
  EXPECT_THROW(resolve_config({}, {{"dt", "0"}}), ConfigError);
  EXPECT_THROW(resolve_config({}, {{"preset", "nope"}}), ConfigError);
  std::ostringstream warn;
  resolve_config({}, {{"master_ic", "1 1 1 1 1 1"}}, &warn);
  EXPECT_NE(warn.str().find("master_ic"), std::string::npos);
  std::ostringstream quiet;
  resolve_config({}, {{"preset", "paper-sync"}}, &quiet);
  EXPECT_EQ(quiet.str(), "");
}

TEST(Presets, ShippedFilesMatchBuiltIns) {
  for (const std::string name : {"paper-ode", "paper-lyapunov", "paper-sync"}) {
    const auto from_file = resolve_config(read_config_file(kSource / "presets" / (name + ".conf")), {});
    const auto built_in = resolve_config({}, {{"preset", name}});
    EXPECT_EQ(to_json(from_file).dump(), to_json(built_in).dump()) << name;
  }
}

TEST(Cli, VersionHelpAndUsageErrors) {
  EXPECT_EQ(run({"--version"}).code, kExitOk);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, kExitConfig);
  const auto bad = run({"equilibria", "--alpha", "abc"});
  EXPECT_EQ(bad.code, kExitConfig);
  EXPECT_NE(bad.err.find("alpha"), std::string::npos);
  EXPECT_EQ(run({"equilibria", "--config", "/nonexistent/x.conf"}).code, kExitIo);
}

TEST(Cli, EquilibriaReport) {
  const auto r = run({"equilibria"});
  ASSERT_EQ(r.code, kExitOk);
  const json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 5u);
  int origins = 0;
  for (const auto& e : j) {
    ASSERT_EQ(e["eigenvalues"].size(), 3u);
    EXPECT_EQ(e["eigenvalues"][0].size(), 2u);
    origins += e["point"] == json::array({0.0, 0.0, 0.0});
  }
  EXPECT_EQ(origins, 1);
}

TEST(Cli, OdeWritesStatesAndManifest) {
  TempDir dir;
  const auto r = run({"ode", "--preset", "paper-ode", "--t-end", "1.5", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = lines(slurp(dir / "states.csv"));
  ASSERT_EQ(rows.size(), 1u + 1501u);
  EXPECT_EQ(rows[0], "t,u1,u2,u3");
  EXPECT_EQ(rows[1], "0,0.349,0,-0.3");
  EXPECT_EQ(slurp(dir / "states.csv").find('\r'), std::string::npos);
  EXPECT_TRUE(validate_manifest(dir / "manifest.json").empty());
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["outputs"][0]["rows"], 1501);
  EXPECT_FALSE(fs::exists(dir / OutputLock::kFileName));
}

TEST(Cli, OdeRerunIsByteIdentical) {
  TempDir a, b;
  ASSERT_EQ(run({"ode", "--t-end", "2", "--out", a.path().string()}).code, kExitOk);
  ASSERT_EQ(run({"ode", "--t-end", "2", "--out", b.path().string()}).code, kExitOk);
  EXPECT_EQ(slurp(a / "states.csv"), slurp(b / "states.csv"));
  EXPECT_EQ(strip_wall_time(slurp(a / "manifest.json")), strip_wall_time(slurp(b / "manifest.json")));
}

TEST(Cli, LockedOrUnwritableOutputIsAnIoError) {
  TempDir dir;
  std::ofstream(dir / OutputLock::kFileName) << "busy";
  EXPECT_EQ(run({"ode", "--t-end", "0.1", "--out", dir.path().string()}).code, kExitIo);
  EXPECT_EQ(run({"ode", "--t-end", "0.1", "--out", "/proc/nlsync-denied"}).code, kExitIo);
}

TEST(Cli, SyncBundle) {
  TempDir dir;
  const auto r = run(small_sync(dir.path()));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto trace = lines(slurp(dir / "trace.csv"));
  ASSERT_EQ(trace.size(), 1u + 51u);
  EXPECT_EQ(trace[0], "t,err_sup,V,I_term,J_term,cond313_lhs,cond313_rhs");
  for (const char* f : {"master_0000.csv", "slave_0000.csv", "master_0002.csv", "slave_0002.csv"}) {
    const auto snap = lines(slurp(dir / f));
    ASSERT_EQ(snap.size(), 22u) << f;
    EXPECT_EQ(snap[0], "x,c1,c2,c3");
  }
  EXPECT_FALSE(fs::exists(dir / "master_0003.csv"));
  const auto errors = validate_manifest(dir / "manifest.json");
  for (const auto& e : errors) ADD_FAILURE() << e;
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["controls"], "on");
  EXPECT_EQ(m["outputs"].size(), 7u);
}

TEST(Cli, SyncRerunIsByteIdentical) {
  TempDir a, b;
  ASSERT_EQ(run(small_sync(a.path())).code, kExitOk);
  ASSERT_EQ(run(small_sync(b.path())).code, kExitOk);
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json")
      EXPECT_EQ(strip_wall_time(slurp(entry.path())), strip_wall_time(slurp(b / name)));
    else
      EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
  }
}

TEST(Cli, IdenticalInitialDataStaysSynchronized) {
  TempDir dir;
  auto args = small_sync(dir.path());
  args.insert(args.end(), {"--slave-ic", "paper-master"});
  ASSERT_EQ(run(args).code, kExitOk);
  const auto trace = lines(slurp(dir / "trace.csv"));
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto comma = trace[i].find(',');
    const double err = std::stod(trace[i].substr(comma + 1));
    EXPECT_LE(err, 1e-10);
  }
  EXPECT_EQ(json::parse(slurp(dir / "manifest.json"))["synchronized"], true);
}

TEST(Cli, ControlsOffIsNotSynchronized) {
  TempDir dir;
  const auto r = run({"sync", "--preset", "paper-sync", "--grid-n", "41", "--t-end", "5",
                      "--controls", "off", "--snapshot-count", "2", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["controls"], "off");
  EXPECT_EQ(m["synchronized"], false);
  EXPECT_GT(m["final_err_sup"].get<double>(), 1e-3);
}

TEST(Cli, SyncBlowUpKeepsPartialOutputs) {
  TempDir dir;
  const auto r = run({"sync", "--alpha", "50", "--grid-n", "21", "--dt", "1e-2", "--t-end", "100",
                      "--master-ic", "30 0 30 0 30 0", "--slave-ic", "30 0 30 0 30 0",
                      "--controls", "off", "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitBlowUp);
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
  EXPECT_TRUE(validate_manifest(dir / "manifest.json").empty());
  const json m = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m["status"], "failed");
  EXPECT_TRUE(m["failure_time"].is_number());
  EXPECT_FALSE(fs::exists(dir / OutputLock::kFileName));
}

TEST(Cli, StabilityCheckRequiresASource) {
  const auto r = run({"stability-check"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("u3_sup"), std::string::npos);
  EXPECT_EQ(run({"stability-check", "--manifest", "/nonexistent/manifest.json"}).code, kExitConfig);
}

TEST(Cli, StabilityCheckMinimalGain) {
  const auto r = run({"stability-check", "--u3-sup", "0.4", "--d3", "0.1", "--length", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["k_min"].get<double>(), 1241.5, 0.001 * 1241.5);
  EXPECT_EQ(j["satisfied"], false);
  EXPECT_EQ(j["modes"].size(), 65u);
  EXPECT_EQ(j["modes"][64]["i"], 64);
}

TEST(Cli, StabilityCheckSatisfiedImpliesStableModes) {
  // d3 * lambda_1 == 1 on L = 10.
  const double d3 = 1.0 / std::pow(std::numbers::pi / 10.0, 2);
  const auto r = run({"stability-check", "--u3-sup", "0", "--k", "1", "--d3", format_double(d3),
                      "--grid-n", "21"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["satisfied"], true);
  EXPECT_EQ(j["all_modes_stable"], true);
  EXPECT_EQ(j["modes"].size(), 21u);
}

TEST(Cli, StabilityCheckReadsAPriorManifest) {
  TempDir dir;
  ASSERT_EQ(run(small_sync(dir.path())).code, kExitOk);
  const double u3 = json::parse(slurp(dir / "manifest.json"))["u3_sup"].get<double>();
  const auto r = run({"stability-check", "--manifest", (dir / "manifest.json").string(), "--grid-n", "21"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["u3_sup"].get<double>(), u3);
  EXPECT_GT(u3, 0.0);
}

TEST(Cli, ReportsCanBeWrittenToDisk) {
  TempDir dir;
  const auto r = run({"lyapunov", "--t-end", "150", "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const json j = json::parse(slurp(dir / "lyapunov.json"));
  EXPECT_EQ(j["exponents"].size(), 3u);
  EXPECT_EQ(j["divergence"].get<double>(), divergence(Params{}));
  EXPECT_EQ(json::parse(r.out), j);
}

}  // namespace
}  // namespace nlsync::cli
