#include "qdnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "qdnls/errors.hpp"

namespace qdnls {

namespace {

// Physical u . conj v and spectral div w, both without dealiasing.
struct Products {
  std::vector<cplx> prod_hat;  // spectral u . conj v
  std::vector<cplx> div_hat;   // spectral div w
};

Products products(const StateTriple& s) {
  const TorusGrid& g = s.grid();
  const int d = g.dim(), n = g.n();
  const std::size_t sz = g.size();
  const SpectralField u = to_physical(s.u), v = to_physical(s.v);
  const SpectralField w = to_spectral(s.w);
  Products out{std::vector<cplx>(sz), std::vector<cplx>(sz, cplx(0))};
  for (int j = 0; j < d; ++j) {
    auto uj = u.component(j), vj = v.component(j);
    for (std::size_t m = 0; m < sz; ++m) out.prod_hat[m] += uj[m] * std::conj(vj[m]);
    auto wj = w.component(j);
    for (std::size_t m = 0; m < sz; ++m) {
      const double k = d == 1 ? g.derivative_wavenumber(int(m))
                              : g.derivative_wavenumber(j == 0 ? int(m / n) : int(m % n));
      out.div_hat[m] += cplx(0, k) * wj[m];
    }
  }
  detail::fft_forward(d, n, out.prod_hat, out.prod_hat);
  return out;
}

cplx pairing(const TorusGrid& g, std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc = 0;
  for (std::size_t m = 0; m < a.size(); ++m) acc += a[m] * std::conj(b[m]);
  return acc * g.volume();
}

double l2sq(const SpectralField& f) {
  const double n = l2_norm(f);
  return n * n;
}

}  // namespace

double mass(const StateTriple& s) { return 2.0 * l2sq(s.u) + l2sq(s.v) + l2sq(s.w); }

double gradient_sq(const SpectralField& f) {
  const SpectralField g = to_spectral(f);
  const TorusGrid& grid = g.grid();
  double acc = 0.0;
  for (int j = 0; j < g.components(); ++j) {
    auto c = g.component(j);
    for (std::size_t m = 0; m < c.size(); ++m) acc += grid.xi_sq(m) * std::norm(c[m]);
  }
  return acc * grid.volume();
}

double interaction_term(const StateTriple& s) {
  // (w, grad P) = -(div w, P) on the torus; the spectral forms agree
  // exactly because both use the same derivative symbol.
  const Products pr = products(s);
  return -2.0 * pairing(s.grid(), pr.div_hat, pr.prod_hat).real();
}

double energy(const StateTriple& s, const SystemParams& p) {
  return p.alpha() * gradient_sq(s.u) + p.beta() * gradient_sq(s.v) +
         p.gamma() * gradient_sq(s.w) + interaction_term(s);
}

namespace {

double gn_ratio_from(const StateTriple& s, int d, double M, double F) {
  const Products pr = products(s);
  const double num = std::abs(pairing(s.grid(), pr.div_hat, pr.prod_hat));
  if (num == 0.0) return 0.0;
  return num / (std::pow(M, 1.0 - d / 4.0) * std::pow(F, (d + 2) / 4.0));
}

}  // namespace

double gn_interaction_ratio(const StateTriple& s, const SystemParams& p) {
  const double F = gradient_sq(s.u) + gradient_sq(s.v) + gradient_sq(s.w);
  if (!(F > 0)) throw InvalidArgument("gn_interaction_ratio: F must be positive");
  return gn_ratio_from(s, p.dim(), mass(s), F);
}

DiagnosticsRow diagnostics_row(const StateTriple& s, const SystemParams& p, double t) {
  DiagnosticsRow r;
  r.t = t;
  r.mass = mass(s);
  r.grad_sq_u = gradient_sq(s.u);
  r.grad_sq_v = gradient_sq(s.v);
  r.grad_sq_w = gradient_sq(s.w);
  r.F = r.grad_sq_u + r.grad_sq_v + r.grad_sq_w;
  r.energy = p.alpha() * r.grad_sq_u + p.beta() * r.grad_sq_v + p.gamma() * r.grad_sq_w +
             interaction_term(s);
  r.hs_0 = sobolev_norm(s, 0.0);
  r.hs_sc = sobolev_norm(s, p.critical_exponent());
  r.hs_half = sobolev_norm(s, 0.5);
  r.hs_1 = sobolev_norm(s, 1.0);
  r.gn_ratio = r.F > 0 ? gn_ratio_from(s, p.dim(), r.mass, r.F) : 0.0;
  return r;
}

AprioriInputs make_apriori_inputs(const StateTriple& data, const SystemParams& p, double C_gn,
                                  double epsilon) {
  const double a = p.alpha(), b = p.beta(), c = p.gamma();
  const bool pos = a > 0 && b > 0 && c > 0;
  const bool neg = a < 0 && b < 0 && c < 0;
  if (!pos && !neg) throw InvalidArgument("a priori bounds need coefficients of one sign");
  AprioriInputs in;
  in.M0 = mass(data);
  in.H0 = (pos ? 1.0 : -1.0) * energy(data, p);
  in.rho_min = std::min({std::abs(a), std::abs(b), std::abs(c)});
  in.rho_max = std::max({std::abs(a), std::abs(b), std::abs(c)});
  in.C_gn = C_gn;
  in.epsilon = epsilon;
  in.F0 = gradient_sq(data.u) + gradient_sq(data.v) + gradient_sq(data.w);
  return in;
}

std::optional<double> apriori_bound(const AprioriInputs& in, int dim) {
  const double cm = 2.0 * in.C_gn * std::pow(in.M0, 1.0 - dim / 4.0);
  if (!(cm < in.rho_min / 2.0)) return std::nullopt;
  return (in.H0 + cm) / (in.rho_min - cm);
}

std::optional<double> apriori_bound_small_energy(const AprioriInputs& in, int dim) {
  const double e2 = in.epsilon * in.epsilon;
  if (!(e2 > 0)) return std::nullopt;
  if (!(in.F0 < e2 / in.rho_max)) return std::nullopt;
  if (!(in.H0 < 2.0 * e2)) return std::nullopt;
  const double cm = 2.0 * in.C_gn * std::pow(in.M0, 1.0 - dim / 4.0);
  if (!(cm * std::pow(4.0 * e2 / in.rho_min, (dim + 2) / 4.0) < e2)) return std::nullopt;
  return 3.0 * e2 / in.rho_min;
}

double energy_inequality_rhs(const AprioriInputs& in, int dim, double F) {
  const double cm = 2.0 * in.C_gn * std::pow(in.M0, 1.0 - dim / 4.0);
  return (std::abs(in.H0) + cm * std::pow(F, (dim + 2) / 4.0)) / in.rho_min;
}

ScatteringProfile scattering_profile(std::span<const Snapshot> snapshots, const SystemParams& p,
                                     std::span<const double> ladder) {
  std::vector<const Snapshot*> picked;
  if (ladder.empty()) {
    for (const auto& s : snapshots)
      if (s.t > 0) picked.push_back(&s);
  } else {
    for (double t : ladder) {
      auto it = std::find_if(snapshots.begin(), snapshots.end(),
                             [t](const Snapshot& s) { return std::abs(s.t - t) <= 1e-9 * (1 + t); });
      if (it == snapshots.end()) throw InvalidArgument("scattering_profile: ladder time not in trajectory");
      picked.push_back(&*it);
    }
  }
  if (picked.size() < 3) throw InvalidArgument("scattering_profile: need at least 3 ladder points");

  const double sig[3] = {p.alpha(), p.beta(), p.gamma()};
  auto pullback = [&](const Snapshot& s) {
    return StateTriple(free_evolve(s.state.u, sig[0], -s.t), free_evolve(s.state.v, sig[1], -s.t),
                       free_evolve(s.state.w, sig[2], -s.t));
  };
  std::vector<double> times, dist;
  StateTriple prev = pullback(*picked.front());
  times.push_back(picked.front()->t);
  for (std::size_t k = 1; k < picked.size(); ++k) {
    StateTriple cur = pullback(*picked[k]);
    times.push_back(picked[k]->t);
    dist.push_back(sobolev_distance(prev, cur, p.critical_exponent()));
    prev = std::move(cur);
  }
  return ScatteringProfile{std::move(prev), std::move(times), std::move(dist)};
}

}  // namespace qdnls
