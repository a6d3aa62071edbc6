#include "qdnls/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "qdnls/experiments.hpp"

#include "qdnls/errors.hpp"

namespace qdnls {

using nlohmann::json;

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::resonance: return "resonance";
    case Command::illposed: return "illposed";
    case Command::bilinear: return "bilinear";
    case Command::scatter: return "scatter";
    case Command::verify: return "verify";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view s) noexcept {
  for (Command c : {Command::simulate, Command::resonance, Command::illposed, Command::bilinear,
                    Command::scatter, Command::verify})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// A JSON object being consumed: every key read is ticked off so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  std::string path(const std::string& k) const { return join(path_, k); }

  const json& at(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) throw ConfigError(path(k), "missing mandatory key");
    return j_.at(k);
  }

  double number(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number()) throw ConfigError(path(k), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(k), "must be finite");
    return d;
  }
  double number(const std::string& k, double def) { return has(k) ? number(k) : (seen_.insert(k), def); }

  long long integer(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number_integer()) throw ConfigError(path(k), "must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& k, long long def) {
    return has(k) ? integer(k) : (seen_.insert(k), def);
  }

  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_boolean()) throw ConfigError(path(k), "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_string()) throw ConfigError(path(k), "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const json& v = at(k);
    if (!v.is_array()) throw ConfigError(path(k), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(k) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::array<double, 3> triple(Reader& r, const std::string& k, std::array<double, 3> def) {
  const std::vector<double> v = r.numbers(k, {def.begin(), def.end()});
  if (v.size() != 3) throw ConfigError(r.path(k), "must have exactly 3 entries");
  return {v[0], v[1], v[2]};
}

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path, msg);
}

SystemParams read_params(const json& j) {
  Reader r(j, "params");
  const double a = r.number("alpha"), b = r.number("beta"), g = r.number("gamma");
  const long long d = r.integer("dim");
  r.finish();
  const char* nz = "must be nonzero (alpha, beta, gamma in R \\ {0})";
  require(a != 0, "params.alpha", nz);
  require(b != 0, "params.beta", nz);
  require(g != 0, "params.gamma", nz);
  require(d == 1 || d == 2, "params.dim", "must be 1 or 2");
  return SystemParams(a, b, g, int(d));
}

GridSpec read_grid(const json* j, int dim) {
  GridSpec g;
  g.period = default_period(dim);
  if (!j) return g;
  Reader r(*j, "grid");
  const long long n = r.integer("n", 256);
  g.period = r.number("period", g.period);
  r.finish();
  require(n >= 16 && n <= (1 << 24) && (n & (n - 1)) == 0, "grid.n", "must be a power of two >= 16");
  require(g.period > 0, "grid.period", "must be positive");
  g.n = int(n);
  return g;
}

SolverConfig read_solver(const json* j) {
  SolverConfig s;
  if (!j) return s;
  Reader r(*j, "solver");
  s.dt = r.number("dt", s.dt);
  s.t_end = r.number("t_end", s.t_end);
  s.dealias = r.boolean("dealias", s.dealias);
  const long long me = r.integer("monitor_every", s.monitor_every);
  r.finish();
  require(s.dt > 0, "solver.dt", "must be positive");
  require(s.t_end > 0, "solver.t_end", "must be positive");
  require(s.dt <= s.t_end, "solver.dt", "must not exceed solver.t_end");
  require(me >= 1 && me <= 1'000'000'000, "solver.monitor_every", "must be a positive integer");
  s.monitor_every = int(me);
  return s;
}

ExperimentSection read_section(Command c, const json* j, const RunConfig& cfg) {
  const std::string base = "experiment." + std::string(to_string(c));
  static const json empty = json::object();
  Reader r(j ? *j : empty, base);
  auto p = [&](const char* k) { return base + "." + k; };
  switch (c) {
    case Command::simulate: {
      SimulateSection s;
      s.amplitude = r.number("amplitude", s.amplitude);
      s.width = r.number("width", s.width);
      s.momentum = triple(r, "momentum", s.momentum);
      s.snapshot_times = r.numbers("snapshot_times", {});
      s.shadow = r.boolean("shadow", s.shadow);
      r.finish();
      require(s.amplitude >= 0, p("amplitude"), "must be non-negative");
      require(s.width > 0, p("width"), "must be positive");
      for (double t : s.snapshot_times)
        require(t > 0 && t <= cfg.solver.t_end, p("snapshot_times"), "entries must lie in (0, t_end]");
      return s;
    }
    case Command::resonance: {
      ResonanceSection s;
      s.scan = r.boolean("scan", s.scan);
      s.sigma = triple(r, "sigma", s.sigma);
      s.condition = r.string("condition", s.condition);
      s.ratio = r.number("ratio", s.ratio);
      const long long e = r.integer("extent", s.extent);
      s.step = r.number("step", s.step);
      r.finish();
      for (double x : s.sigma) require(x != 0, p("sigma"), "entries must be nonzero");
      require(s.condition == "none" || s.condition == "separated" || s.condition == "theta_positive",
              p("condition"), "must be none, separated or theta_positive");
      require(s.condition != "separated" || s.ratio >= 4, p("ratio"), "must be at least 4");
      require(e >= 1 && e <= 4096, p("extent"), "must be a positive integer");
      require(s.step > 0, p("step"), "must be positive");
      s.extent = int(e);
      return s;
    }
    case Command::illposed: {
      IllposedSection s;
      s.variant = r.string("case", s.variant);
      s.s = r.number("s", s.s);
      s.n_min = r.number("n_min", s.n_min);
      s.n_max = r.number("n_max", s.n_max);
      s.T = r.number("T", s.T);
      const long long q = r.integer("quad_points", s.quad_points);
      r.finish();
      try {
        parse_illposed_variant(s.variant);
      } catch (const InvalidArgument&) {
        throw ConfigError(p("case"), "must be a, b or c");
      }
      require(is_power_of_two(s.n_min) && s.n_min >= 16, p("n_min"), "must be a power of two >= 16");
      require(is_power_of_two(s.n_max) && s.n_max >= 16 * s.n_min, p("n_max"),
              "must be a power of two with at least 5 dyadic values from n_min");
      require(s.T > 0, p("T"), "must be positive");
      require(q >= 64 && q <= 4096, p("quad_points"), "must be in [64, 4096]");
      s.quad_points = int(q);
      return s;
    }
    case Command::bilinear: {
      BilinearSection s;
      s.L = r.number("L", s.L);
      s.H_list = r.numbers("H_list", s.H_list);
      const long long tr = r.integer("trials", s.trials);
      s.T = r.number("T", s.T);
      s.sigma1 = r.number("sigma1", s.sigma1);
      s.sigma2 = r.number("sigma2", s.sigma2);
      r.finish();
      require(is_power_of_two(s.L), p("L"), "must be a power of two");
      require(!s.H_list.empty(), p("H_list"), "must not be empty");
      for (double H : s.H_list)
        require(is_power_of_two(H) && s.L <= H / 4, p("H_list"), "entries must be powers of two >= 4 L");
      require(tr >= 1 && tr <= 1'000'000, p("trials"), "must be a positive integer");
      require(s.T > 0, p("T"), "must be positive");
      require(s.sigma1 != 0 && s.sigma2 != 0, p("sigma1"), "sigmas must be nonzero");
      s.trials = int(tr);
      return s;
    }
    case Command::scatter: {
      ScatterSection s;
      s.ladder = r.numbers("ladder", s.ladder);
      s.amplitude = r.number("amplitude", s.amplitude);
      s.width = r.number("width", s.width);
      r.finish();
      require(s.ladder.size() >= 3, p("ladder"), "needs at least 3 times");
      for (std::size_t i = 0; i < s.ladder.size(); ++i)
        require(s.ladder[i] > 0 && (i == 0 || s.ladder[i] > s.ladder[i - 1]), p("ladder"),
                "must be positive and strictly increasing");
      require(s.amplitude >= 0, p("amplitude"), "must be non-negative");
      require(s.width > 0, p("width"), "must be positive");
      return s;
    }
    case Command::verify: {
      VerifySection s;
      const long long n = r.integer("samples", s.samples);
      r.finish();
      require(n >= 10 && n <= 10'000'000, p("samples"), "must be in [10, 1e7]");
      s.samples = int(n);
      return s;
    }
  }
  throw ConfigError("command", "unsupported");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, false);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  Reader r(root, "");
  RunConfig cfg;

  const json& cmd = r.at("command");
  if (!cmd.is_string()) throw ConfigError("command", "must be a string");
  const auto c = parse_command(cmd.get<std::string>());
  if (!c) throw ConfigError("command", "must be one of simulate, resonance, illposed, bilinear, scatter, verify");
  cfg.command = *c;

  cfg.params = read_params(r.at("params"));
  cfg.grid = read_grid(r.has("grid") ? &r.at("grid") : nullptr, cfg.params.dim());
  cfg.solver = read_solver(r.has("solver") ? &r.at("solver") : nullptr);

  const bool randomized = cfg.command == Command::bilinear || cfg.command == Command::verify;
  if (r.has("seed") || randomized) {
    const json& s = r.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("seed", "must be a non-negative 64-bit integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (r.has("out_dir")) {
    const json& o = r.at("out_dir");
    if (!o.is_string() || o.get<std::string>().empty()) throw ConfigError("out_dir", "must be a non-empty string");
    cfg.out_dir = o.get<std::string>();
  }

  const json* section = nullptr;
  if (r.has("experiment")) {
    Reader e(r.at("experiment"), "experiment");
    const std::string name(to_string(cfg.command));
    if (e.has(name)) section = &e.at(name);
    e.finish();  // any other command's section is an unknown key here
  }
  cfg.experiment = read_section(cfg.command, section, cfg);
  r.finish();
  return cfg;
}

namespace {

json section_json(const ExperimentSection& s) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SimulateSection>) {
          return {{"amplitude", x.amplitude}, {"width", x.width}, {"momentum", x.momentum},
                  {"snapshot_times", x.snapshot_times}, {"shadow", x.shadow}};
        } else if constexpr (std::is_same_v<T, ResonanceSection>) {
          return {{"scan", x.scan}, {"sigma", x.sigma}, {"condition", x.condition},
                  {"ratio", x.ratio}, {"extent", x.extent}, {"step", x.step}};
        } else if constexpr (std::is_same_v<T, IllposedSection>) {
          return {{"case", x.variant}, {"s", x.s}, {"n_min", x.n_min}, {"n_max", x.n_max},
                  {"T", x.T}, {"quad_points", x.quad_points}};
        } else if constexpr (std::is_same_v<T, BilinearSection>) {
          return {{"L", x.L}, {"H_list", x.H_list}, {"trials", x.trials}, {"T", x.T},
                  {"sigma1", x.sigma1}, {"sigma2", x.sigma2}};
        } else if constexpr (std::is_same_v<T, ScatterSection>) {
          return {{"ladder", x.ladder}, {"amplitude", x.amplitude}, {"width", x.width}};
        } else {
          return {{"samples", x.samples}};
        }
      },
      s);
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["command"] = std::string(to_string(cfg.command));
  j["params"] = {{"alpha", cfg.params.alpha()},
                 {"beta", cfg.params.beta()},
                 {"gamma", cfg.params.gamma()},
                 {"dim", cfg.params.dim()}};
  j["grid"] = {{"n", cfg.grid.n}, {"period", cfg.grid.period}};
  j["solver"] = {{"dt", cfg.solver.dt},
                 {"t_end", cfg.solver.t_end},
                 {"dealias", cfg.solver.dealias},
                 {"monitor_every", cfg.solver.monitor_every}};
  j["experiment"] = {{std::string(to_string(cfg.command)), section_json(cfg.experiment)}};
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_fingerprint(const RunConfig& cfg) {
  RunConfig located = cfg;
  located.out_dir.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_config(located))));
  return buf;
}

}  // namespace qdnls
