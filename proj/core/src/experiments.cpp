#include "qdnls/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "qdnls/errors.hpp"
#include "qdnls/parallel.hpp"

namespace qdnls {

std::string_view to_string(IllposedVariant v) noexcept {
  switch (v) {
    case IllposedVariant::alpha_eq_gamma: return "alpha_eq_gamma";
    case IllposedVariant::theta_zero: return "theta_zero";
    case IllposedVariant::theta_negative: return "theta_negative";
  }
  return "?";
}

IllposedVariant parse_illposed_variant(std::string_view s) {
  if (s == "a" || s == "alpha_eq_gamma") return IllposedVariant::alpha_eq_gamma;
  if (s == "b" || s == "theta_zero") return IllposedVariant::theta_zero;
  if (s == "c" || s == "theta_negative") return IllposedVariant::theta_negative;
  throw InvalidArgument("unknown ill-posedness case '" + std::string(s) + "'");
}

IllposedCase make_illposed_case(IllposedVariant v, const SystemParams& p, double N) {
  if (!(N >= 16)) throw InvalidArgument("illposed: N must be at least 16");
  const ResonanceReport r = compute_m_factors(p);
  const double a = p.alpha(), g = p.gamma();
  const bool a_eq_g = near_zero(a - g, std::max(std::abs(a), std::abs(g)));
  IllposedCase c{v, N, 0.0, {}, {}, {}, p.dim()};
  const double iN = 1.0 / N;
  switch (v) {
    case IllposedVariant::alpha_eq_gamma:
      if (!a_eq_g) throw InvalidArgument("illposed alpha_eq_gamma: needs alpha == gamma");
      c.M = *r.m_factor;
      c.box_f = {N, N + iN};
      c.box_g = {iN, 2 * iN};
      c.box_out = {N + 1.5 * iN, N + 2 * iN};
      break;
    case IllposedVariant::theta_zero: {
      if (a_eq_g || !r.m_factor) throw InvalidArgument("illposed theta_zero: needs theta == 0");
      const double M = *r.m_factor;
      c.M = M;
      c.box_f = {N, N + 1};
      c.box_g = {N / M, N / M + 1 / std::abs(M)};
      c.box_out = {(1 + 1 / M) * N + 0.5, (1 + 1 / M) * N + 1};
      break;
    }
    case IllposedVariant::theta_negative: {
      if (!r.m_plus) throw InvalidArgument("illposed theta_negative: needs theta < 0, alpha != gamma");
      const double M = *r.m_plus;
      c.M = M;
      c.box_f = {N, N + iN};
      c.box_g = {N / M, N / M + iN / std::abs(M)};
      c.box_out = {(1 + 1 / M) * N + 0.5 * iN, (1 + 1 / M) * N + iN};
      break;
    }
  }
  for (const Interval* b : {&c.box_f, &c.box_g, &c.box_out})
    if (b->contains(0.0)) throw InvalidArgument("illposed: a frequency box contains the origin");
  const Interval S = c.sumset();
  if (c.box_out.lo < S.lo || c.box_out.hi > S.hi)
    throw InvalidArgument("illposed: output box leaves the sumset");
  return c;
}

namespace {

double box_hs_norm(const Interval& box, int dim, int q, double s) {
  const QuadratureRule ra = gauss_legendre(q, box.lo, box.hi);
  double acc = 0.0;
  if (dim == 1) {
    for (int i = 0; i < q; ++i) acc += ra.weights[i] * std::pow(1 + ra.nodes[i] * ra.nodes[i], s);
  } else {
    const QuadratureRule rb = gauss_legendre(q, 0.0, 1.0);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        acc += ra.weights[i] * rb.weights[j] *
               std::pow(1 + ra.nodes[i] * ra.nodes[i] + rb.nodes[j] * rb.nodes[j], s);
  }
  return std::sqrt(acc);
}

}  // namespace

double IllposedData::hs_norm_f(double s) const { return box_hs_norm(cas.box_f, cas.dim, quad_points, s); }
double IllposedData::hs_norm_g(double s) const { return box_hs_norm(cas.box_g, cas.dim, quad_points, s); }

IllposedData illposed_data(const IllposedCase& c, int quad_points) {
  if (quad_points < 64) throw InvalidArgument("illposed_data: need at least 64 quadrature points");
  return IllposedData{c, quad_points};
}

std::complex<double> resonance_time_factor(double t, double phi) noexcept {
  const double x = t * phi;
  if (std::abs(x) < 1e-6) return t * std::complex<double>(1.0, -0.5 * x);
  return (1.0 - std::polar(1.0, -x)) / std::complex<double>(0.0, phi);
}

Picard2::Picard2(const IllposedData& data, const SystemParams& p) : data_(data), p_(p) {
  if (data.cas.dim != p.dim()) throw InvalidArgument("picard2: dimension mismatch");
}

namespace {

// Integral over xi1 of K_t(Phi) for every t, at a fixed output xi.
void inner_integrals(const IllposedCase& c, const SystemParams& p, int q, const double* xi,
                     std::span<const double> times, std::vector<std::complex<double>>& out) {
  out.assign(times.size(), 0.0);
  const double lo = std::max(c.box_f.lo, xi[0] - c.box_g.hi);
  const double hi = std::min(c.box_f.hi, xi[0] - c.box_g.lo);
  if (!(hi > lo)) return;
  const QuadratureRule ra = gauss_legendre(q, lo, hi);
  const double a = p.alpha(), b = p.beta(), g = p.gamma();
  if (c.dim == 1) {
    for (int i = 0; i < q; ++i) {
      const double x1 = ra.nodes[i], eta = xi[0] - x1;
      const double phi = a * x1 * x1 - b * eta * eta - g * xi[0] * xi[0];
      for (std::size_t k = 0; k < times.size(); ++k)
        out[k] += ra.weights[i] * resonance_time_factor(times[k], phi);
    }
    return;
  }
  const double ylo = std::max(0.0, xi[1] - 1.0), yhi = std::min(1.0, xi[1]);
  if (!(yhi > ylo)) {
    out.assign(times.size(), 0.0);
    return;
  }
  const QuadratureRule rb = gauss_legendre(q, ylo, yhi);
  const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      const double x1 = ra.nodes[i], y1 = rb.nodes[j];
      const double ex = xi[0] - x1, ey = xi[1] - y1;
      const double phi = a * (x1 * x1 + y1 * y1) - b * (ex * ex + ey * ey) - g * xi2;
      const double w = ra.weights[i] * rb.weights[j];
      for (std::size_t k = 0; k < times.size(); ++k)
        out[k] += w * resonance_time_factor(times[k], phi);
    }
}

double xi_sq_of(std::span<const double> xi) {
  double s = 0;
  for (double x : xi) s += x * x;
  return s;
}

}  // namespace

std::complex<double> Picard2::scalar_amplitude(std::span<const double> xi, double t) const {
  if (int(xi.size()) != data_.cas.dim) throw InvalidArgument("picard2: frequency dimension mismatch");
  std::vector<std::complex<double>> v;
  const double times[1] = {t};
  inner_integrals(data_.cas, p_, data_.quad_points, xi.data(), times, v);
  return std::polar(1.0, -t * p_.gamma() * xi_sq_of(xi)) * v[0];
}

double Picard2::amplitude_abs(std::span<const double> xi, double t) const {
  return std::sqrt(xi_sq_of(xi)) * std::abs(scalar_amplitude(xi, t));
}

std::vector<double> Picard2::hs_norm(double s, std::span<const double> times) const {
  const IllposedCase& c = data_.cas;
  const int q = data_.quad_points;
  const Interval S = c.sumset();
  const double breaks[4] = {c.box_f.lo + c.box_g.lo, c.box_f.lo + c.box_g.hi,
                            c.box_f.hi + c.box_g.lo, c.box_f.hi + c.box_g.hi};
  const QuadratureRule ra = gauss_legendre_panels(q, S.lo, S.hi, breaks);
  std::vector<double> acc(times.size(), 0.0);
  std::vector<std::complex<double>> v;
  if (c.dim == 1) {
    for (std::size_t i = 0; i < ra.nodes.size(); ++i) {
      const double xi[1] = {ra.nodes[i]};
      inner_integrals(c, p_, q, xi, times, v);
      const double wgt = ra.weights[i] * std::pow(1 + xi[0] * xi[0], s) * xi[0] * xi[0];
      for (std::size_t k = 0; k < times.size(); ++k) acc[k] += wgt * std::norm(v[k]);
    }
  } else {
    const double mid[1] = {1.0};
    const QuadratureRule rb = gauss_legendre_panels(q, 0.0, 2.0, mid);
    for (std::size_t i = 0; i < ra.nodes.size(); ++i)
      for (std::size_t j = 0; j < rb.nodes.size(); ++j) {
        const double xi[2] = {ra.nodes[i], rb.nodes[j]};
        inner_integrals(c, p_, q, xi, times, v);
        const double k2 = xi[0] * xi[0] + xi[1] * xi[1];
        const double wgt = ra.weights[i] * rb.weights[j] * std::pow(1 + k2, s) * k2;
        for (std::size_t k = 0; k < times.size(); ++k) acc[k] += wgt * std::norm(v[k]);
      }
  }
  for (auto& a : acc) a = std::sqrt(a);
  return acc;
}

std::vector<double> default_t_grid(double T) { return {T / 8, T / 4, T / 2, T}; }

FitResult growth_exponent(const GrowthConfig& cfg, const SystemParams& p) {
  if (cfg.N_list.size() < 5) throw InvalidArgument("growth_exponent: need at least 5 values of N");
  for (double N : cfg.N_list)
    if (!is_power_of_two(N)) throw InvalidArgument("growth_exponent: N must be dyadic");
  if (cfg.t_grid.empty()) throw InvalidArgument("growth_exponent: empty t grid");
  // Condition check up front, before any quadrature.
  make_illposed_case(cfg.variant, p, cfg.N_list.front());

  std::vector<double> logR(cfg.N_list.size());
  parallel_for(cfg.N_list.size(), [&](std::size_t i) {
    const IllposedData data = illposed_data(make_illposed_case(cfg.variant, p, cfg.N_list[i]),
                                            cfg.quad_points);
    const Picard2 pic(data, p);
    const std::vector<double> norms = pic.hs_norm(cfg.s, cfg.t_grid);
    const double top = *std::max_element(norms.begin(), norms.end());
    logR[i] = std::log(top / (data.hs_norm_f(cfg.s) * data.hs_norm_g(cfg.s)));
  });

  FitResult out;
  std::vector<double> logN;
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    logN.push_back(std::log(cfg.N_list[i]));
    out.samples.emplace_back(logN.back(), logR[i]);
  }
  const LineFit f = fit_line(logN, logR);
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.r_squared = f.r_squared;
  out.inconclusive = f.r_squared < 0.9;
  return out;
}

double equivariance_norm(const StateTriple& a, const StateTriple& b, double s_c) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("equivariance: grid mismatch");
  const TorusGrid& g = a.grid();
  double acc = 0.0;
  for (int f = 0; f < 3; ++f) {
    const SpectralField x = to_spectral(a[f]), y = to_spectral(b[f]);
    for (int j = 0; j < x.components(); ++j) {
      auto cx = x.component(j), cy = y.component(j);
      for (std::size_t m = 0; m < cx.size(); ++m) {
        const double k2 = g.xi_sq(m);
        const double w = k2 == 0 ? 1.0 : std::pow(k2, s_c);
        acc += w * std::norm(cx[m] - cy[m]);
      }
    }
  }
  return std::sqrt(acc * g.volume());
}

EquivarianceResult scaling_equivariance(const SystemParams& p, const StateTriple& data,
                                        double lambda, double T, double dt, bool dealias) {
  if (!is_power_of_two(lambda)) throw InvalidArgument("scaling_equivariance: lambda must be 2^m");
  if (data.grid().dim() != p.dim()) throw InvalidArgument("scaling_equivariance: dimension mismatch");
  const StateTriple scaled0 = scaling_transform(data, lambda);
  const StateTriple a = evolve_to(scaled0, p, dt, T, dealias);
  const StateTriple a_half = evolve_to(scaled0, p, dt / 2, T, dealias);
  const StateTriple b =
      scaling_transform(evolve_to(data, p, dt, T / (lambda * lambda), dealias), lambda);
  const double sc = p.critical_exponent();
  return {equivariance_norm(a, b, sc), equivariance_norm(a, a_half, sc)};
}

}  // namespace qdnls
