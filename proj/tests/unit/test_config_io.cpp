#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qdnls/config.hpp"
#include "qdnls/errors.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/io.hpp"
#include "qdnls/run.hpp"

using namespace qdnls;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal(const std::string& command) {
  return {{"command", command}, {"params", {{"alpha", -1}, {"beta", 1}, {"gamma", 1}, {"dim", 1}}}};
}

std::string config_error_path(const json& j) {
  try {
    parse_config(j.dump());
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qdnls_unit_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

#ifdef QDNLS_TOOL_PATH
int shell(const std::string& args) {
  const std::string cmd = std::string(QDNLS_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(minimal("resonance").dump());
  CHECK(c.command == Command::resonance);
  CHECK(c.params == SystemParams(-1, 1, 1, 1));
  CHECK(c.grid.period == doctest::Approx(default_period(1)));
  CHECK(std::holds_alternative<ResonanceSection>(c.experiment));

  json j = minimal("simulate");
  j["params"]["alpha"] = 0;
  CHECK(config_error_path(j) == "params.alpha");
  j = minimal("simulate");
  j["grid"] = {{"n", 100}};
  CHECK(config_error_path(j) == "grid.n");
  j = minimal("simulate");
  j["grid"] = {{"n", 64}, {"spacing", 1}};
  CHECK(config_error_path(j).rfind("grid", 0) == 0);
  j = minimal("simulate");
  j["colour"] = "red";
  CHECK(!config_error_path(j).empty());
  j = minimal("simulate");
  j["params"].erase("gamma");
  CHECK(config_error_path(j).rfind("params", 0) == 0);
  j = minimal("simulate");
  j["solver"] = {{"dt", 2.0}, {"t_end", 1.0}};
  CHECK(config_error_path(j) == "solver.dt");
  j = minimal("simulate");
  j["experiment"] = {{"bilinear", json::object()}};
  CHECK(!config_error_path(j).empty());
  j = minimal("illposed");
  j["experiment"] = {{"illposed", {{"case", "z"}}}};
  CHECK(config_error_path(j) == "experiment.illposed.case");
  CHECK(config_error_path(json::parse("[1]")) != "");
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);

  SUBCASE("seed is mandatory only for randomized commands") {
    CHECK(config_error_path(minimal("bilinear")) == "seed");
    CHECK(config_error_path(minimal("verify")) == "seed");
    CHECK(config_error_path(minimal("simulate")).empty());
    json s = minimal("verify");
    s["seed"] = -3;
    CHECK(config_error_path(s) == "seed");
    s["seed"] = 7;
    CHECK(config_error_path(s).empty());
  }
}

TEST_CASE("config round trip and fingerprint") {
  json j = minimal("bilinear");
  j["seed"] = 123456789012345ULL;
  j["grid"] = {{"n", 512}, {"period", 0.1 + 0.2}};
  j["experiment"] = {{"bilinear", {{"H_list", {8, 16, 32, 64, 128}}, {"trials", 5}}}};
  const RunConfig c = parse_config(j.dump());
  const std::string text = serialize_config(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize_config(parse_config(text)) == text);
  CHECK(config_fingerprint(c).size() == 16);
  RunConfig d = c;
  d.seed += 1;
  CHECK(config_fingerprint(d) != config_fingerprint(c));
  d = c;
  d.out_dir = "elsewhere";
  CHECK(config_fingerprint(d) == config_fingerprint(c));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

  for (const char* cmd : {"simulate", "resonance", "illposed", "scatter", "verify"}) {
    json k = minimal(cmd);
    k["seed"] = 1;
    if (std::string(cmd) == "scatter") k["params"] = {{"alpha", -1}, {"beta", 1}, {"gamma", 1}, {"dim", 2}};
    const RunConfig r = parse_config(k.dump());
    CHECK(parse_config(serialize_config(r)) == r);
  }
}

TEST_CASE("number formatting round trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mant(-1, 1);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::ldexp(mant(rng), ex(rng));
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::strtod(format_double(std::numeric_limits<double>::denorm_min()).c_str(), nullptr) ==
        std::numeric_limits<double>::denorm_min());
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  t.add_row(std::vector<double>{1.5, -2});
  t.add_row(std::vector<std::string>{"x", "y"});
  CHECK(t.rows() == 2);
  CHECK(t.render("00ff") == "a,b\n1.5,-2\nx,y\n# fingerprint=00ff\n");
  CHECK_THROWS(t.add_row(std::vector<double>{1}));
  CHECK(diagnostics_header().size() == diagnostics_cells(DiagnosticsRow{}).size());
}

TEST_CASE("atomic file writes") {
  const fs::path dir = scratch("atomic");
  const fs::path f = dir / "nested" / "x.txt";
  write_file_atomic(f, "first");
  write_file_atomic(f, "second");
  CHECK(read_file(f) == "second");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(f.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
  CHECK_THROWS(read_file(dir / "missing"));
  fs::remove_all(dir);
}

TEST_CASE("snapshot format") {
  const TorusGrid g(2, 16, 3.5);
  const StateTriple s = random_bump_state(g, 9);
  const std::string bytes = encode_snapshot(s);
  CHECK(bytes.compare(0, 7, std::string("QDNLS1\0", 7)) == 0);
  CHECK(bytes.size() == 7 + 4 + 4 + 4 + 8 + 1 + 4 + 6 * 256 * 16);
  const StateTriple back = decode_state(bytes);
  for (int f = 0; f < 3; ++f)
    for (std::size_t i = 0; i < s[f].values().size(); ++i) CHECK(back[f].values()[i] == s[f].values()[i]);

  SpectralField phys = to_physical(s.u);
  const DecodedSnapshot d = decode_snapshot(encode_snapshot(phys));
  CHECK(d.repr == Repr::physical);
  CHECK(d.components == 2);
  CHECK(d.grid == g);
  CHECK(decode_field(encode_snapshot(phys)).values()[5] == phys.values()[5]);

  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 1)), Error);
  CHECK_THROWS_AS(decode_snapshot(bytes + "x"), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
  bad = bytes;
  bad[7] = 2;  // version
  CHECK_THROWS_AS(decode_snapshot(bad), Error);
  CHECK_THROWS_AS(decode_state(encode_snapshot(s.u)), Error);
}

TEST_CASE("runs") {
  SUBCASE("verify passes and writes its table") {
    json j = minimal("verify");
    j["seed"] = 5;
    j["experiment"] = {{"verify", {{"samples", 200}}}};
    RunConfig c = parse_config(j.dump());
    c.out_dir = scratch("verify").string();
    const RunOutcome o = run(c);
    CHECK(o.exit_code == kExitOk);
    CHECK(fs::exists(fs::path(c.out_dir) / "verify.csv"));
    CHECK(fs::exists(fs::path(c.out_dir) / "report.txt"));
    CHECK(parse_config(read_file(fs::path(c.out_dir) / "config.echo")) == c);
  }
  SUBCASE("simulate is deterministic") {
    json j = minimal("simulate");
    j["grid"] = {{"n", 64}};
    j["solver"] = {{"dt", 0.01}, {"t_end", 0.1}};
    j["experiment"] = {{"simulate", {{"snapshot_times", {0.05}}, {"shadow", false}}}};
    RunConfig c = parse_config(j.dump());
    c.out_dir = scratch("sim_a").string();
    CHECK(run(c).exit_code == kExitOk);
    const std::string a = read_file(fs::path(c.out_dir) / "diagnostics.csv");
    const StateTriple mid = decode_state(read_file(fs::path(c.out_dir) / "snap_0001.qdnls"));
    CHECK(mid.grid() == c.torus());
    c.out_dir = scratch("sim_b").string();
    CHECK(run(c).exit_code == kExitOk);
    CHECK(read_file(fs::path(c.out_dir) / "diagnostics.csv") == a);
    CHECK(a.find("# fingerprint=" + config_fingerprint(c)) != std::string::npos);
  }
  SUBCASE("regime gates run before any work") {
    json j = minimal("illposed");
    j["experiment"] = {{"illposed", {{"case", "c"}}}};
    RunConfig c = parse_config(j.dump());
    c.out_dir = scratch("gate").string();
    try {
      run(c);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.path() == "experiment.illposed.case");
    }
    CHECK(!fs::exists(fs::path(c.out_dir) / "illposed.csv"));

    json s = minimal("scatter");
    RunConfig sc = parse_config(s.dump());
    CHECK_THROWS_AS(check_regime_gate(sc), ConfigError);
  }
  SUBCASE("banner names the regime") {
    const std::string b = regime_banner(SystemParams(-1, 1, 1, 1));
    CHECK(!b.empty());
    CHECK(b.find("theta") != std::string::npos);
  }
}

#ifdef QDNLS_TOOL_PATH
TEST_CASE("command line exit codes") {
  const std::string out = scratch("cli").string();
  CHECK(shell("resonance --alpha=-1 --beta=1 --gamma=1 --dim=1 --out " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "resonance.csv"));
  CHECK(shell("resonance --out " + out) == 2);
  CHECK(shell("resonance --alpha=0 --beta=1 --gamma=1 --dim=1 --out " + out) == 2);
  CHECK(shell("illposed --alpha=-1 --beta=1 --gamma=1 --dim=1 --case c --out " + out) == 2);
  CHECK(shell("verify --alpha=-1 --beta=1 --gamma=1 --dim=1 --samples 20 --out " + out) == 2);
  CHECK(shell("verify --alpha=-1 --beta=1 --gamma=1 --dim=1 --samples 20 --seed 4 --out " + out) == 0);
  CHECK(shell("frobnicate") == 2);
  CHECK(shell("simulate --no-such-flag") == 2);
  fs::remove_all(fs::path(out).parent_path());
}
#endif
