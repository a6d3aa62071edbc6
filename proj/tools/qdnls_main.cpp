// qdnls <command> [--config FILE] [--out DIR] [--seed S] [command flags]
//
// Flags override values from the config file. Exit codes: 0 ok, 1 verify
// failure, 2 config error, 3 blow-up, 4 inconclusive fit.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdnls/config.hpp"
#include "qdnls/errors.hpp"
#include "qdnls/run.hpp"

using nlohmann::json;

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta, gamma;
  std::optional<int> dim, n;
  std::optional<double> period, dt, t_end;
  std::vector<double> params;  // alpha beta gamma in one flag

  // command-specific, stored as JSON patches on experiment.<cmd>
  json experiment = json::object();
};

void common_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--alpha", o.alpha);
  sub->add_option("--beta", o.beta);
  sub->add_option("--gamma", o.gamma);
  sub->add_option("--dim", o.dim)->check(CLI::IsMember({1, 2}));
  sub->add_option("--params", o.params, "alpha beta gamma")->expected(3);
  sub->add_option("--n", o.n, "grid points per axis");
  sub->add_option("--period", o.period, "torus period");
  sub->add_option("--dt", o.dt);
  sub->add_option("--t-end", o.t_end);
}

template <class T>
void patch(json& j, const std::string& key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

json merged_config(const std::string& command, const Overrides& o) {
  json j = json::object();
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw qdnls::ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw qdnls::ConfigError("<root>", "must be an object");
    if (j.contains("command") && j["command"] != command)
      throw qdnls::ConfigError("command", "file says " + j["command"].dump() + " but the CLI asked for " + command);
  }
  j["command"] = command;
  auto section = [&](const char* k) -> json& {
    if (!j.contains(k) || !j[k].is_object()) j[k] = json::object();
    return j[k];
  };
  if (!o.params.empty()) {
    section("params")["alpha"] = o.params[0];
    section("params")["beta"] = o.params[1];
    section("params")["gamma"] = o.params[2];
  }
  if (o.alpha || o.beta || o.gamma || o.dim) {
    json& p = section("params");
    patch(p, "alpha", o.alpha);
    patch(p, "beta", o.beta);
    patch(p, "gamma", o.gamma);
    patch(p, "dim", o.dim);
  }
  if (o.n || o.period) {
    json& g = section("grid");
    patch(g, "n", o.n);
    patch(g, "period", o.period);
  }
  if (o.dt || o.t_end) {
    json& s = section("solver");
    patch(s, "dt", o.dt);
    patch(s, "t_end", o.t_end);
  }
  if (!o.experiment.empty()) {
    json& e = section("experiment");
    if (!e.contains(command) || !e[command].is_object()) e[command] = json::object();
    e[command].update(o.experiment);
  }
  patch(j, "seed", o.seed);
  patch(j, "out_dir", o.out);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for a coupled quadratic-derivative Schroedinger system"};
  app.require_subcommand(1);
  Overrides o;

  std::optional<bool> scan;
  std::vector<double> sigma;
  std::optional<std::string> condition;
  std::optional<int> extent;
  std::optional<double> step;
  std::optional<std::string> variant;
  std::optional<double> s_exp, n_min, n_max, T_ill;
  std::optional<double> L, T_bil;
  std::vector<double> h_list;
  std::optional<int> trials, samples;

  auto* sim = app.add_subcommand("simulate", "evolve Gaussian data, write diagnostics and snapshots");
  auto* res = app.add_subcommand("resonance", "resonance discriminants and theorem applicability");
  auto* ill = app.add_subcommand("illposed", "growth of the second Picard iterate on thin boxes");
  auto* bil = app.add_subcommand("bilinear", "Monte Carlo bilinear Strichartz probe");
  auto* sca = app.add_subcommand("scatter", "pullback Cauchy distances along a time ladder");
  auto* ver = app.add_subcommand("verify", "algebraic invariant suite");
  for (auto* sub : {sim, res, ill, bil, sca, ver}) common_flags(sub, o);

  res->add_flag("--scan", scan, "run the modulation scan");
  res->add_option("--sigma", sigma, "s1 s2 s3")->expected(3);
  res->add_option("--condition", condition)->check(CLI::IsMember({"none", "separated", "theta_positive"}));
  res->add_option("--extent", extent);
  res->add_option("--step", step);

  ill->add_option("--case", variant, "a | b | c");
  ill->add_option("--s", s_exp);
  ill->add_option("--n-min", n_min);
  ill->add_option("--n-max", n_max);
  ill->add_option("--T", T_ill);

  bil->add_option("--l", L);
  bil->add_option("--h-list", h_list)->delimiter(',');
  bil->add_option("--trials", trials);
  bil->add_option("--T", T_bil);

  ver->add_option("--samples", samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qdnls::kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  json& e = o.experiment;
  if (scan) e["scan"] = *scan;
  if (!sigma.empty()) e["sigma"] = sigma;
  patch(e, "condition", condition);
  patch(e, "extent", extent);
  patch(e, "step", step);
  patch(e, "case", variant);
  patch(e, "s", s_exp);
  patch(e, "n_min", n_min);
  patch(e, "n_max", n_max);
  if (chosen == ill) patch(e, "T", T_ill);
  patch(e, "L", L);
  if (!h_list.empty()) e["H_list"] = h_list;
  patch(e, "trials", trials);
  if (chosen == bil) patch(e, "T", T_bil);
  patch(e, "samples", samples);

  try {
    const qdnls::RunConfig cfg = qdnls::parse_config(merged_config(command, o).dump());
    const qdnls::RunOutcome out = qdnls::run(cfg);
    std::cout << out.summary;
    return out.exit_code;
  } catch (const qdnls::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return qdnls::kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
