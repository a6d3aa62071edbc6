#include "qdnls/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft.hpp"
#include "qdnls/errors.hpp"

namespace qdnls {

void SolverConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidArgument("solver.dt must be positive");
  if (!(t_end > 0) || !std::isfinite(t_end)) throw InvalidArgument("solver.t_end must be positive");
  if (dt > t_end) throw InvalidArgument("solver.dt must not exceed solver.t_end");
  if (monitor_every < 1) throw InvalidArgument("solver.monitor_every must be at least 1");
}

bool dealias_keep(const TorusGrid& grid, std::size_t mode) noexcept {
  const int n = grid.n();
  auto ok = [n, &grid](int i) { return 3 * std::abs(grid.signed_index(i)) < n; };
  if (grid.dim() == 1) return ok(int(mode));
  return ok(int(mode / n)) && ok(int(mode % n));
}

FlatState flatten(const StateTriple& s) {
  const std::size_t per = s.grid().size() * s.grid().dim();
  FlatState out(3 * per);
  for (int i = 0; i < 3; ++i) {
    const SpectralField f = to_spectral(s[i]);
    std::copy(f.values().begin(), f.values().end(), out.begin() + i * per);
  }
  return out;
}

StateTriple unflatten(const TorusGrid& grid, std::span<const cplx> flat) {
  const std::size_t per = grid.size() * grid.dim();
  if (flat.size() != 3 * per) throw InvalidArgument("unflatten: length mismatch");
  auto part = [&](int i) {
    auto sub = flat.subspan(i * per, per);
    return SpectralField(grid, Repr::spectral, std::vector<cplx>(sub.begin(), sub.end()));
  };
  return StateTriple(part(0), part(1), part(2));
}

Nonlinearity::Nonlinearity(const TorusGrid& grid, bool dealias)
    : grid_(grid), dealias_(dealias), mask_(grid.size(), 1.0) {
  if (dealias)
    for (std::size_t m = 0; m < grid.size(); ++m) mask_[m] = dealias_keep(grid, m) ? 1.0 : 0.0;
  const std::size_t sz = grid.size();
  u_.resize(sz * grid.dim());
  v_.resize(sz * grid.dim());
  div_.resize(sz);
  prod_.resize(sz);
}

void Nonlinearity::apply(std::span<const cplx> state, std::span<cplx> out) {
  const int d = grid_.dim(), n = grid_.n();
  const std::size_t sz = grid_.size(), per = sz * d;
  if (state.size() != 3 * per || out.size() != 3 * per)
    throw InvalidArgument("nonlinearity: state length does not match grid");
  auto comp = [&](std::span<const cplx> base, int field, int j) {
    return base.subspan(field * per + j * sz, sz);
  };
  auto ocomp = [&](int field, int j) { return out.subspan(field * per + j * sz, sz); };
  auto kx = [&](std::size_t m, int j) {
    if (d == 1) return grid_.derivative_wavenumber(int(m));
    return grid_.derivative_wavenumber(j == 0 ? int(m / n) : int(m % n));
  };

  std::fill(div_.begin(), div_.end(), cplx(0));
  for (int j = 0; j < d; ++j) {
    auto uj = comp(state, 0, j), vj = comp(state, 1, j), wj = comp(state, 2, j);
    std::span<cplx> ub(u_.data() + j * sz, sz), vb(v_.data() + j * sz, sz);
    for (std::size_t m = 0; m < sz; ++m) {
      ub[m] = uj[m] * mask_[m];
      vb[m] = vj[m] * mask_[m];
      div_[m] += cplx(0, kx(m, j)) * wj[m] * mask_[m];
    }
    detail::fft_backward(d, n, ub, ub);
    detail::fft_backward(d, n, vb, vb);
  }
  detail::fft_backward(d, n, div_, div_);

  std::fill(prod_.begin(), prod_.end(), cplx(0));
  const cplx I(0, 1);
  for (int j = 0; j < d; ++j) {
    std::span<const cplx> ub(u_.data() + j * sz, sz), vb(v_.data() + j * sz, sz);
    auto nu = ocomp(0, j), nv = ocomp(1, j);
    for (std::size_t m = 0; m < sz; ++m) {
      nu[m] = I * div_[m] * vb[m];
      nv[m] = I * std::conj(div_[m]) * ub[m];
      prod_[m] += ub[m] * std::conj(vb[m]);
    }
    detail::fft_forward(d, n, nu, nu);
    detail::fft_forward(d, n, nv, nv);
    for (std::size_t m = 0; m < sz; ++m) {
      nu[m] *= mask_[m];
      nv[m] *= mask_[m];
    }
  }
  detail::fft_forward(d, n, prod_, prod_);
  // -i * (i xi_j) = xi_j
  for (int j = 0; j < d; ++j) {
    auto nw = ocomp(2, j);
    for (std::size_t m = 0; m < sz; ++m) nw[m] = kx(m, j) * prod_[m] * mask_[m];
  }
}

StateTriple nonlinearity(const StateTriple& s, bool dealias) {
  Nonlinearity nl(s.grid(), dealias);
  const FlatState in = flatten(s);
  FlatState out(in.size());
  nl.apply(in, out);
  return unflatten(s.grid(), out);
}

IfRk4Stepper::IfRk4Stepper(const SystemParams& p, const TorusGrid& grid, bool dealias)
    : params_(p), grid_(grid), nl_(grid, dealias) {
  if (p.dim() != grid.dim()) throw InvalidArgument("stepper: params and grid dimensions differ");
  const std::size_t total = 3 * grid.size() * grid.dim();
  k1_.resize(total);
  k2_.resize(total);
  k3_.resize(total);
  k4_.resize(total);
  tmp_.resize(total);
}

void IfRk4Stepper::prepare(double h) {
  if (h == cached_h_ && !e_full_.empty()) return;
  const std::size_t sz = grid_.size(), per = sz * grid_.dim();
  e_full_.resize(3 * per);
  e_half_.resize(3 * per);
  const double sig[3] = {params_.alpha(), params_.beta(), params_.gamma()};
  for (int f = 0; f < 3; ++f)
    for (int j = 0; j < grid_.dim(); ++j)
      for (std::size_t m = 0; m < sz; ++m) {
        const double ph = -sig[f] * grid_.xi_sq(m) * h;
        const std::size_t idx = f * per + j * sz + m;
        e_full_[idx] = std::polar(1.0, ph);
        e_half_[idx] = std::polar(1.0, 0.5 * ph);
      }
  cached_h_ = h;
}

void IfRk4Stepper::step(FlatState& u, double h) {
  prepare(h);
  const std::size_t N = u.size();
  const double h2 = 0.5 * h, h6 = h / 6.0;
  const auto& E = e_full_;
  const auto& Eh = e_half_;

  nl_.apply(u, k1_);
  for (std::size_t i = 0; i < N; ++i) tmp_[i] = Eh[i] * (u[i] + h2 * k1_[i]);
  nl_.apply(tmp_, k2_);
  for (std::size_t i = 0; i < N; ++i) tmp_[i] = Eh[i] * u[i] + h2 * k2_[i];
  nl_.apply(tmp_, k3_);
  for (std::size_t i = 0; i < N; ++i) tmp_[i] = E[i] * u[i] + h * Eh[i] * k3_[i];
  nl_.apply(tmp_, k4_);
  for (std::size_t i = 0; i < N; ++i)
    u[i] = E[i] * u[i] + h6 * (E[i] * k1_[i] + 2.0 * Eh[i] * (k2_[i] + k3_[i]) + k4_[i]);
}

StateTriple IfRk4Stepper::step(const StateTriple& s, double h) {
  FlatState x = flatten(s);
  step(x, h);
  return unflatten(s.grid(), x);
}

StateTriple step_ifrk4(const StateTriple& s, const SystemParams& p, double dt, bool dealias) {
  IfRk4Stepper st(p, s.grid(), dealias);
  return st.step(s, dt);
}

namespace {

// Returns an empty string when the state is finite and below the blow-up
// magnitude. The l1 sum of coefficients bounds every grid value, so the
// physical check only runs when that bound is exceeded.
std::string blow_up_reason(const TorusGrid& grid, const FlatState& x) {
  const std::size_t sz = grid.size();
  for (std::size_t c = 0; c * sz < x.size(); ++c) {
    double l1 = 0.0;
    for (std::size_t m = 0; m < sz; ++m) {
      const cplx z = x[c * sz + m];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return "non-finite value";
      l1 += std::abs(z);
    }
    if (l1 > kBlowUpMagnitude) {
      std::vector<cplx> buf(x.begin() + c * sz, x.begin() + (c + 1) * sz);
      detail::fft_backward(grid.dim(), grid.n(), buf, buf);
      for (const auto& z : buf)
        if (std::abs(z) > kBlowUpMagnitude) return "magnitude above 1e8";
    }
  }
  return {};
}

}  // namespace

Trajectory evolve(const StateTriple& data, const SystemParams& p, const SolverConfig& cfg,
                  const EvolveOptions& opts) {
  cfg.validate();
  const TorusGrid grid = data.grid();
  if (grid.dim() != p.dim()) throw InvalidArgument("evolve: params and grid dimensions differ");

  std::vector<double> targets;
  for (double c : opts.checkpoints) {
    if (!(c > 0) || c > cfg.t_end) throw InvalidArgument("evolve: checkpoint outside (0, t_end]");
    targets.push_back(c);
  }
  targets.push_back(cfg.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Trajectory traj;
  FlatState x = flatten(data);
  traj.snapshots.push_back({0.0, unflatten(grid, x)});
  if (opts.diagnostics) traj.diagnostics.push_back(diagnostics_row(traj.snapshots[0].state, p, 0.0));

  IfRk4Stepper stepper(p, grid, cfg.dealias);
  long steps = 0;
  double t = 0.0;
  for (double target : targets) {
    const double start = t;
    long k = 0;
    while (t < target) {
      double h = cfg.dt;
      double next = start + double(k + 1) * cfg.dt;
      // Land exactly on the target; absorb a remainder below 1e-9 dt.
      if (next >= target - 1e-9 * cfg.dt) {
        next = target;
        h = target - t;
      }
      stepper.step(x, h);
      ++k;
      ++steps;
      t = next;
      if (auto why = blow_up_reason(grid, x); !why.empty()) {
        BlowUp b{t, why, traj.diagnostics.empty() ? DiagnosticsRow{} : traj.diagnostics.back()};
        traj.blow_up = b;
        return traj;
      }
      const bool landing = t == target;
      if (opts.diagnostics && (steps % cfg.monitor_every == 0 || (landing && target == cfg.t_end))) {
        const StateTriple s = unflatten(grid, x);
        traj.diagnostics.push_back(diagnostics_row(s, p, t));
      }
    }
    traj.snapshots.push_back({t, unflatten(grid, x)});
  }
  return traj;
}

StateTriple evolve_to(const StateTriple& data, const SystemParams& p, double dt, double t_target,
                      bool dealias) {
  if (!(dt != 0) || !std::isfinite(dt)) throw InvalidArgument("evolve_to: dt must be nonzero");
  if (t_target == 0.0) return data;
  const long steps = std::max(1L, long(std::ceil(std::abs(t_target) / std::abs(dt) - 1e-9)));
  const double h = t_target / double(steps);
  IfRk4Stepper st(p, data.grid(), dealias);
  FlatState x = flatten(data);
  for (long k = 0; k < steps; ++k) st.step(x, h);
  return unflatten(data.grid(), x);
}

namespace {

void propagate_flat(const TorusGrid& grid, const SystemParams& p, std::span<cplx> x, double t) {
  const std::size_t sz = grid.size(), per = sz * grid.dim();
  const double sig[3] = {p.alpha(), p.beta(), p.gamma()};
  for (int f = 0; f < 3; ++f)
    for (int j = 0; j < grid.dim(); ++j)
      free_evolve_inplace(grid, x.subspan(f * per + j * sz, sz), sig[f], t);
}

double flat_distance(const TorusGrid& grid, std::span<const cplx> a, std::span<const cplx> b,
                     double s) {
  const std::size_t sz = grid.size();
  double acc = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double k2 = grid.xi_sq(m % sz);
    acc += std::pow(1.0 + k2, s) * std::norm(a[m] - b[m]);
  }
  return std::sqrt(acc * grid.volume());
}

void check_mesh(std::span<const Snapshot> it, double T) {
  if (it.size() < 9) throw InvalidArgument("duhamel_apply: mesh needs at least 8 intervals");
  const std::size_t m = it.size() - 1;
  const double h = T / double(m);
  for (std::size_t j = 0; j <= m; ++j)
    if (std::abs(it[j].t - double(j) * h) > 1e-9 * (std::abs(T) + 1))
      throw InvalidArgument("duhamel_apply: iterate is not on a uniform mesh over [0, T]");
}

}  // namespace

std::vector<Snapshot> free_solution(const StateTriple& data, const SystemParams& p, double T,
                                    int intervals) {
  if (intervals < 1) throw InvalidArgument("free_solution: intervals must be positive");
  std::vector<Snapshot> out;
  const FlatState x0 = flatten(data);
  for (int j = 0; j <= intervals; ++j) {
    const double t = T * j / intervals;
    FlatState x = x0;
    propagate_flat(data.grid(), p, x, t);
    out.push_back({t, unflatten(data.grid(), x)});
  }
  return out;
}

std::vector<Snapshot> duhamel_apply(std::span<const Snapshot> iterate, const SystemParams& p,
                                    const StateTriple& data, double T, bool dealias) {
  check_mesh(iterate, T);
  const TorusGrid grid = data.grid();
  const std::size_t m = iterate.size() - 1;
  const double h = T / double(m);

  Nonlinearity nl(grid, dealias);
  std::vector<FlatState> G(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const FlatState x = flatten(iterate[j].state);
    G[j].resize(x.size());
    nl.apply(x, G[j]);
    propagate_flat(grid, p, G[j], -iterate[j].t);
  }

  const FlatState x0 = flatten(data);
  const std::size_t N = x0.size();
  // Running composite-Simpson sum over [0, 2k h].
  FlatState even(N, cplx(0));
  std::vector<Snapshot> out;
  out.reserve(m + 1);
  FlatState acc(N);
  for (std::size_t j = 0; j <= m; ++j) {
    if (j >= 2 && j % 2 == 0)
      for (std::size_t i = 0; i < N; ++i)
        even[i] += (h / 3.0) * (G[j - 2][i] + 4.0 * G[j - 1][i] + G[j][i]);
    if (j == 0) {
      std::fill(acc.begin(), acc.end(), cplx(0));
    } else if (j == 1) {
      for (std::size_t i = 0; i < N; ++i)
        acc[i] = (h / 12.0) * (5.0 * G[0][i] + 8.0 * G[1][i] - G[2][i]);
    } else if (j % 2 == 0) {
      acc = even;
    } else {
      // even holds [0, (j-1) h]; redo the tail as Simpson to j-3 plus 3/8.
      FlatState base(N, cplx(0));
      if (j > 3) {
        // [0, (j-3) h] equals even minus the last Simpson panel.
        for (std::size_t i = 0; i < N; ++i)
          base[i] = even[i] - (h / 3.0) * (G[j - 3][i] + 4.0 * G[j - 2][i] + G[j - 1][i]);
      }
      for (std::size_t i = 0; i < N; ++i)
        acc[i] = base[i] + (3.0 * h / 8.0) *
                               (G[j - 3][i] + 3.0 * G[j - 2][i] + 3.0 * G[j - 1][i] + G[j][i]);
    }
    FlatState x(N);
    for (std::size_t i = 0; i < N; ++i) x[i] = x0[i] + acc[i];
    propagate_flat(grid, p, x, iterate[j].t);
    out.push_back({iterate[j].t, unflatten(grid, x)});
  }
  return out;
}

std::string_view to_string(PicardReport::Status s) noexcept {
  switch (s) {
    case PicardReport::Status::converged: return "converged";
    case PicardReport::Status::max_iter_exceeded: return "max_iter_exceeded";
    case PicardReport::Status::expanding: return "expanding";
  }
  return "?";
}

PicardResult picard_fixed_point(const StateTriple& data, const SystemParams& p,
                                const PicardOptions& opts) {
  if (opts.max_iter < 1) throw InvalidArgument("picard: max_iter must be positive");
  if (!(opts.T > 0)) throw InvalidArgument("picard: T must be positive");
  const TorusGrid grid = data.grid();
  const double sc = p.critical_exponent();
  PicardResult res;
  std::vector<Snapshot> cur = free_solution(data, p, opts.T, opts.intervals);
  auto& rep = res.report;
  rep.status = PicardReport::Status::max_iter_exceeded;
  for (int k = 1; k <= opts.max_iter; ++k) {
    std::vector<Snapshot> next = duhamel_apply(cur, p, data, opts.T, opts.dealias);
    double diff = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      const FlatState a = flatten(next[j].state), b = flatten(cur[j].state);
      const double d = flat_distance(grid, a, b, sc);
      diff = std::isfinite(d) ? std::max(diff, d) : std::numeric_limits<double>::infinity();
    }
    rep.iterations = k;
    if (!rep.differences.empty()) rep.ratios.push_back(diff / rep.differences.back());
    rep.differences.push_back(diff);
    cur = std::move(next);
    if (diff < opts.tol) {
      rep.status = PicardReport::Status::converged;
      break;
    }
    if (!std::isfinite(diff) ||
        (opts.stop_on_expansion && rep.differences.size() >= 2 && rep.ratios.back() > 1.0)) {
      rep.status = PicardReport::Status::expanding;
      break;
    }
  }
  res.solution = std::move(cur);
  return res;
}

}  // namespace qdnls
