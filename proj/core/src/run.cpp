#include "qdnls/run.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "qdnls/errors.hpp"
#include "qdnls/experiments.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/io.hpp"

namespace qdnls {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) { return format_double(x); }

std::string describe(const SobolevThreshold& th) {
  std::string out = th.kind == SobolevThreshold::Kind::at_least ? "well-posed for s " : "not C^2 for s ";
  if (th.kind == SobolevThreshold::Kind::at_least)
    out += th.strict ? "> " : ">= ";
  else
    out += th.strict ? "< " : "<= ";
  out += std::isinf(th.value) ? "inf" : fmt(th.value);
  if (th.homogeneous) out += " (homogeneous)";
  return out;
}

class Artifacts {
 public:
  Artifacts(const RunConfig& cfg) : dir_(cfg.out_dir), fp_(config_fingerprint(cfg)) {
    fs::create_directories(dir_);
  }
  const std::string& fingerprint() const { return fp_; }

  void text(const std::string& name, std::string_view body) {
    write_file_atomic(dir_ / name, body);
    written_.push_back(dir_ / name);
  }
  void csv(const std::string& name, const CsvTable& t) { text(name, t.render(fp_)); }

  std::vector<fs::path> take() { return std::move(written_); }

 private:
  fs::path dir_;
  std::string fp_;
  std::vector<fs::path> written_;
};

CsvTable diagnostics_table(const std::vector<DiagnosticsRow>& rows) {
  CsvTable t(diagnostics_header());
  for (const auto& r : rows) t.add_row(diagnostics_cells(r));
  return t;
}

void write_snapshots(Artifacts& art, const std::vector<Snapshot>& snaps) {
  CsvTable index({"index", "t", "file"});
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::setw(4) << std::setfill('0') << i << ".qdnls";
    art.text(name.str(), encode_snapshot(snaps[i].state));
    index.add_row(std::vector<std::string>{std::to_string(i), fmt(snaps[i].t), name.str()});
  }
  art.csv("snapshots.csv", index);
}

GaussianRecipe recipe_of(const SimulateSection& s) {
  GaussianRecipe r;
  r.amplitude = s.amplitude;
  r.width = s.width;
  r.momentum = s.momentum;
  return r;
}

// Summary lines appended after the regime banner.
struct Body {
  std::ostringstream text;
  int code = kExitOk;
};

void run_simulate(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<SimulateSection>(cfg.experiment);
  const TorusGrid grid = cfg.torus();
  const StateTriple data = gaussian_state(grid, recipe_of(sec));
  EvolveOptions opts;
  opts.checkpoints = sec.snapshot_times;
  const Trajectory tr = evolve(data, cfg.params, cfg.solver, opts);
  art.csv("diagnostics.csv", diagnostics_table(tr.diagnostics));
  write_snapshots(art, tr.snapshots);

  if (tr.blow_up) {
    body.text << "blow-up at t = " << fmt(tr.blow_up->t) << ": " << tr.blow_up->reason << '\n'
              << "last finite mass = " << fmt(tr.blow_up->last_finite.mass) << '\n';
    body.code = kExitBlowUp;
    return;
  }
  const DiagnosticsRow& first = tr.diagnostics.front();
  const DiagnosticsRow& last = tr.diagnostics.back();
  body.text << "t_end = " << fmt(last.t) << '\n'
            << "mass drift (relative) = " << fmt(std::abs(last.mass - first.mass) / first.mass) << '\n'
            << "energy drift / (|H0| + 1) = "
            << fmt(std::abs(last.energy - first.energy) / (std::abs(first.energy) + 1.0)) << '\n';
  if (sec.shadow) {
    SolverConfig half = cfg.solver;
    half.dt /= 2;
    EvolveOptions quiet;
    quiet.diagnostics = false;
    const Trajectory fine = evolve(data, cfg.params, half, quiet);
    if (fine.blow_up) {
      body.text << "shadow run at dt/2 blew up at t = " << fmt(fine.blow_up->t) << '\n';
      body.code = kExitBlowUp;
      return;
    }
    const double est = sobolev_distance(tr.final_state(), fine.final_state(), 0.0);
    body.text << "step-halving error estimate (L2) = " << fmt(est) << '\n';
  }
}

void run_resonance(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<ResonanceSection>(cfg.experiment);
  const ResonanceReport r = compute_m_factors(cfg.params);
  CsvTable t({"quantity", "value"});
  auto row = [&](const std::string& k, double v) { t.add_row(std::vector<std::string>{k, fmt(v)}); };
  row("theta", r.theta);
  row("kappa", r.kappa);
  row("acg_bc", r.acg_bc);
  row("same_sign", r.same_sign ? 1.0 : 0.0);
  if (r.m_factor) row("M", *r.m_factor);
  if (r.m_plus) row("M_plus", *r.m_plus);
  if (r.m_minus) row("M_minus", *r.m_minus);
  if (sec.scan) {
    const SigmaTriple sigma(sec.sigma[0], sec.sigma[1], sec.sigma[2]);
    ScanCondition cond = ScanCondition::none();
    if (sec.condition == "separated") cond = ScanCondition::separated(sec.ratio);
    if (sec.condition == "theta_positive") cond = ScanCondition::theta_positive();
    const double mr = modulation_scan(sigma, cond, sec.extent, sec.step, cfg.params.dim());
    row("scan_min_ratio", mr);
    body.text << "modulation scan (" << sec.condition << ", E = " << sec.extent
              << ", step = " << fmt(sec.step) << "): min ratio = " << fmt(mr) << '\n';
  }
  art.csv("resonance.csv", t);
}

std::vector<double> dyadic_range(double lo, double hi) {
  std::vector<double> out;
  for (double N = lo; N <= hi; N *= 2) out.push_back(N);
  return out;
}

void run_illposed(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<IllposedSection>(cfg.experiment);
  GrowthConfig g;
  g.variant = parse_illposed_variant(sec.variant);
  g.s = sec.s;
  g.N_list = dyadic_range(sec.n_min, sec.n_max);
  g.t_grid = default_t_grid(sec.T);
  g.quad_points = sec.quad_points;
  const FitResult fit = growth_exponent(g, cfg.params);
  CsvTable t({"N", "log_N", "log_R"});
  for (std::size_t i = 0; i < fit.samples.size(); ++i)
    t.add_row(std::vector<double>{g.N_list[i], fit.samples[i].first, fit.samples[i].second});
  art.csv("illposed.csv", t);
  body.text << "case " << to_string(g.variant) << ", s = " << fmt(g.s) << '\n'
            << "slope = " << fmt(fit.slope) << ", intercept = " << fmt(fit.intercept)
            << ", r^2 = " << fmt(fit.r_squared) << '\n';
  if (fit.inconclusive) {
    body.text << "fit inconclusive (r^2 < 0.9)\n";
    body.code = kExitInconclusive;
  }
}

// Smallest power-of-two n >= n0 whose Nyquist wavenumber exceeds 2 H.
int resolving_n(int n0, double period, double H) {
  int n = n0;
  while (!(2.0 * H < TorusGrid(1, n, period).nyquist())) n *= 2;
  return n;
}

void run_bilinear(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<BilinearSection>(cfg.experiment);
  const double H_max = *std::max_element(sec.H_list.begin(), sec.H_list.end());
  const int n = resolving_n(cfg.grid.n, cfg.grid.period, H_max);
  const int d = cfg.params.dim();
  if (std::pow(double(n), d) > double(1 << 22))
    throw ConfigError("experiment.bilinear.H_list",
                      "largest H needs n = " + std::to_string(n) + " per axis, above the 2^22 point budget");
  const TorusGrid grid(d, n, cfg.grid.period);
  CsvTable t({"H", "sup_ratio", "mean_ratio"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double H : sec.H_list) {
    BilinearConfig b;
    b.sigma1 = sec.sigma1;
    b.sigma2 = sec.sigma2;
    b.H = H;
    b.L = sec.L;
    b.trials = sec.trials;
    b.T = sec.T;
    b.seed = mix_seed(cfg.seed, std::uint64_t(H));
    const BilinearResult r = bilinear_ratio(b, grid);
    double mean = 0.0;
    for (double x : r.ratios) mean += x / r.ratios.size();
    t.add_row(std::vector<double>{H, r.sup_ratio, mean});
    lo = std::min(lo, r.sup_ratio);
    hi = std::max(hi, r.sup_ratio);
  }
  art.csv("bilinear.csv", t);
  body.text << "grid n = " << n << " per axis, period = " << fmt(cfg.grid.period) << '\n'
            << "sup_ratio range [" << fmt(lo) << ", " << fmt(hi) << "], max/min = " << fmt(hi / lo)
            << '\n';
}

void run_scatter(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<ScatterSection>(cfg.experiment);
  const TorusGrid grid = cfg.torus();
  GaussianRecipe rec;
  rec.amplitude = sec.amplitude;
  rec.width = sec.width;
  const StateTriple data = gaussian_state(grid, rec);
  SolverConfig solver = cfg.solver;
  solver.t_end = sec.ladder.back();
  EvolveOptions opts;
  opts.checkpoints = sec.ladder;
  const Trajectory tr = evolve(data, cfg.params, solver, opts);
  art.csv("diagnostics.csv", diagnostics_table(tr.diagnostics));
  if (tr.blow_up) {
    body.text << "blow-up at t = " << fmt(tr.blow_up->t) << ": " << tr.blow_up->reason << '\n';
    body.code = kExitBlowUp;
    return;
  }
  const ScatteringProfile prof = scattering_profile(tr.snapshots, cfg.params, sec.ladder);
  CsvTable t({"t_k", "t_k1", "distance"});
  bool decreasing = true;
  for (std::size_t k = 0; k < prof.distances.size(); ++k) {
    t.add_row(std::vector<double>{prof.times[k], prof.times[k + 1], prof.distances[k]});
    if (k && !(prof.distances[k] < prof.distances[k - 1])) decreasing = false;
  }
  art.csv("scatter.csv", t);
  art.text("profile.qdnls", encode_snapshot(prof.profile));
  body.text << "pullback distances " << (decreasing ? "strictly decreasing" : "NOT strictly decreasing")
            << '\n';
}

// Max over random samples of |a - b| in ulps of `scale`.
double ulps(double a, long double b, double scale) {
  const double ulp = std::nextafter(std::abs(scale), std::numeric_limits<double>::infinity()) - std::abs(scale);
  return double(std::abs((long double)a - b) / ulp);
}

void run_verify(const RunConfig& cfg, Artifacts& art, Body& body) {
  const auto& sec = std::get<VerifySection>(cfg.experiment);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<int> lattice(-4, 4);
  auto nonzero = [&] {
    double x;
    do x = coef(rng);
    while (x == 0);
    return x;
  };
  CsvTable t({"check", "value", "tolerance", "pass"});
  bool all = true;
  auto record = [&](const std::string& name, double v, double tol) {
    const bool ok = v <= tol;
    all = all && ok;
    t.add_row(std::vector<std::string>{name, fmt(v), fmt(tol), ok ? "1" : "0"});
    body.text << (ok ? "ok   " : "FAIL ") << name << " = " << fmt(v) << " (tol " << fmt(tol) << ")\n";
  };

  double worst = 0.0;
  for (int i = 0; i < sec.samples; ++i) {
    const double a = nonzero(), b = nonzero(), g = nonzero();
    const long double ref = (long double)a * b * g * (1.0L / a - 1.0L / b - 1.0L / g);
    const double scale = std::abs(b * g) + std::abs(a * b) + std::abs(a * g);
    worst = std::max(worst, ulps(compute_theta(SystemParams(a, b, g, 1)), ref, scale));
  }
  record("theta_identity_ulps", worst, 4.0);

  int counter = 0;
  for (int i = 0; i < sec.samples; ++i) {
    int a, b, g;
    do a = lattice(rng), b = lattice(rng), g = lattice(rng);
    while (a == 0 || b == 0 || g == 0);
    const SystemParams p(a, b, g, 1);
    if (compute_theta(p) >= 0 && compute_kappa(p) == 0) ++counter;
  }
  record("theta_nonneg_kappa_zero_count", counter, 0.0);

  const int trials = std::max(10, sec.samples / 10);
  double res = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double a = nonzero(), b = nonzero();
    res = std::max(res, factorization_check(SystemParams(a, b, a, 1 + i % 2),
                                            FactorizationCase::alpha_eq_gamma, trials,
                                            mix_seed(cfg.seed, 10 + i)));
  }
  record("factor_alpha_eq_gamma", res, 1e-12);
  res = 0.0;
  for (int i = 0; i < 8; ++i) {
    double a = nonzero(), g = nonzero();
    while (std::abs(a - g) < 0.1 || std::abs(std::abs(a) - std::abs(g)) < 0.1) g = nonzero();
    res = std::max(res, factorization_check(theta_zero_params(a, g, 1 + i % 2),
                                            FactorizationCase::theta_zero, trials,
                                            mix_seed(cfg.seed, 20 + i)));
  }
  record("factor_theta_zero", res, 1e-12);
  res = 0.0;
  for (int i = 0; i < 8; ++i) {
    SystemParams p;
    do p = SystemParams(nonzero(), nonzero(), nonzero(), 1 + i % 2);
    while (!compute_m_factors(p).m_plus || std::abs(p.alpha() - p.gamma()) < 0.1);
    res = std::max(res, factorization_check(p, FactorizationCase::theta_negative, trials,
                                            mix_seed(cfg.seed, 30 + i)));
  }
  record("factor_theta_negative", res, 1e-12);
  res = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double s1 = nonzero();
    res = std::max(res, factorization_check(SigmaTriple(s1, -s1, nonzero()), trials,
                                            mix_seed(cfg.seed, 40 + i)));
  }
  record("factor_one_d_sum_zero", res, 1e-12);

  record("config_round_trip", parse_config(serialize_config(cfg)) == cfg ? 0.0 : 1.0, 0.0);

  const TorusGrid grid = cfg.torus();
  GaussianRecipe rec;
  rec.zero_mean = true;
  const StateTriple data = gaussian_state(grid, rec);
  const double sc = cfg.params.critical_exponent();
  const double n0 = sobolev_norm(data, sc, true);
  const double n1 = sobolev_norm(scaling_transform(data, 2.0), sc, true);
  record("scaling_invariance", std::abs(n1 - n0) / n0, 1e-10);

  art.csv("verify.csv", t);
  if (!all) body.code = kExitVerifyFailed;
}

}  // namespace

std::string regime_banner(const SystemParams& p) {
  std::ostringstream o;
  const ResonanceReport r = compute_m_factors(p);
  o << "params: alpha = " << fmt(p.alpha()) << ", beta = " << fmt(p.beta())
    << ", gamma = " << fmt(p.gamma()) << ", dim = " << p.dim() << '\n'
    << "s_c = " << fmt(p.critical_exponent()) << '\n'
    << "theta = " << fmt(r.theta) << ", kappa = " << fmt(r.kappa)
    << ", (alpha - gamma)(beta + gamma) = " << fmt(r.acg_bc) << '\n'
    << "coefficients share a sign: " << (r.same_sign ? "yes" : "no") << '\n';
  if (r.m_factor) o << "M = " << fmt(*r.m_factor) << '\n';
  if (r.m_plus) o << "M+ = " << fmt(*r.m_plus) << ", M- = " << fmt(*r.m_minus) << '\n';
  const RegimeReport reg = classify_regime(p);
  if (reg.theorem_labels.empty()) o << "no theorem applies\n";
  for (TheoremLabel l : reg.theorem_labels)
    o << "  " << to_string(l) << ": " << describe(reg.s_threshold.at(l)) << '\n';
  return o.str();
}

void check_regime_gate(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::illposed: {
      const auto& sec = std::get<IllposedSection>(cfg.experiment);
      try {
        make_illposed_case(parse_illposed_variant(sec.variant), cfg.params, sec.n_min);
      } catch (const InvalidArgument& e) {
        throw ConfigError("experiment.illposed.case", e.what());
      }
      break;
    }
    case Command::scatter:
      if (!classify_regime(cfg.params).contains(TheoremLabel::T1_1_i))
        throw ConfigError("params", "scatter needs dim = 2 and theta > 0");
      break;
    case Command::simulate:
    case Command::resonance:
    case Command::bilinear:
    case Command::verify:
      break;
  }
}

RunOutcome run(const RunConfig& cfg) {
  check_regime_gate(cfg);
  Artifacts art(cfg);
  art.text("config.echo", serialize_config(cfg));
  Body body;
  switch (cfg.command) {
    case Command::simulate: run_simulate(cfg, art, body); break;
    case Command::resonance: run_resonance(cfg, art, body); break;
    case Command::illposed: run_illposed(cfg, art, body); break;
    case Command::bilinear: run_bilinear(cfg, art, body); break;
    case Command::scatter: run_scatter(cfg, art, body); break;
    case Command::verify: run_verify(cfg, art, body); break;
  }
  RunOutcome out;
  out.summary = "command: " + std::string(to_string(cfg.command)) + "\nfingerprint: " + art.fingerprint() +
                "\n" + regime_banner(cfg.params) + "\n" + body.text.str() + "exit code: " +
                std::to_string(body.code) + "\n";
  art.text("report.txt", out.summary);
  out.exit_code = body.code;
  out.artifacts = art.take();
  return out;
}

}  // namespace qdnls
