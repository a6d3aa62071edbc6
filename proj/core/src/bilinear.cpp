#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "qdnls/errors.hpp"
#include "qdnls/experiments.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/parallel.hpp"

namespace qdnls {

void BilinearConfig::validate() const {
  if (!(sigma1 != 0) || !(sigma2 != 0)) throw InvalidArgument("bilinear: sigmas must be nonzero");
  if (!is_power_of_two(H) || !is_power_of_two(L)) throw InvalidArgument("bilinear: H, L must be dyadic");
  if (!(L <= H / 4)) throw InvalidArgument("bilinear: needs L <= H / 4");
  if (trials < 1) throw InvalidArgument("bilinear: trials must be positive");
  if (!(T > 0)) throw InvalidArgument("bilinear: T must be positive");
}

double gram_time_integral(std::span<const std::complex<double>> c, std::span<const double> omega,
                          double T) {
  const std::size_t n = c.size();
  std::vector<std::complex<double>> z(n);
  double diag = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    z[p] = std::polar(1.0, -T * omega[p]);
    diag += std::norm(c[p]);
  }
  std::complex<double> off = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) {
      const double d = omega[p] - omega[q];
      const double x = T * d;
      std::complex<double> I;
      if (std::abs(x) < 1e-4) {
        I = T * std::complex<double>(1.0 - x * x / 6.0, -0.5 * x);
      } else {
        I = (1.0 - z[p] * std::conj(z[q])) / std::complex<double>(0.0, d);
      }
      off += c[p] * std::conj(c[q]) * I;
    }
  return diag * T + 2.0 * off.real();
}

double free_product_norm(const SpectralField& f1, double sigma1, const SpectralField& f2,
                         double sigma2, double T) {
  if (!(f1.grid() == f2.grid())) throw InvalidArgument("free_product_norm: grid mismatch");
  const SpectralField a = to_spectral(f1), b = to_spectral(f2);
  const TorusGrid& g = a.grid();
  const int n = g.n(), d = g.dim();
  struct Mode {
    int k0, k1;
    double xi2;
    std::complex<double> c;
  };
  auto support = [&](const SpectralField& f) {
    std::vector<Mode> out;
    auto c = f.component(0);
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (c[m] == std::complex<double>(0)) continue;
      const int k0 = d == 1 ? g.signed_index(int(m)) : g.signed_index(int(m / n));
      const int k1 = d == 1 ? 0 : g.signed_index(int(m % n));
      out.push_back({k0, k1, g.xi_sq(m), c[m]});
    }
    return out;
  };
  const std::vector<Mode> A = support(a), B = support(b);

  // Group pairs by output lattice point; the product of trigonometric
  // polynomials has mode k1 + k2 exactly, no wrap-around.
  std::map<std::pair<int, int>, std::pair<std::vector<std::complex<double>>, std::vector<double>>> groups;
  for (const Mode& x : A)
    for (const Mode& y : B) {
      auto& slot = groups[{x.k0 + y.k0, x.k1 + y.k1}];
      slot.first.push_back(x.c * y.c);
      slot.second.push_back(sigma1 * x.xi2 + sigma2 * y.xi2);
    }
  double acc = 0.0;
  for (const auto& [key, v] : groups) acc += gram_time_integral(v.first, v.second, T);
  return std::sqrt(std::max(0.0, acc) * g.volume());
}

BilinearResult bilinear_ratio(const BilinearConfig& cfg, const TorusGrid& grid) {
  cfg.validate();
  if (!(2.0 * cfg.H < grid.nyquist())) throw InvalidArgument("bilinear: H not resolvable on grid");
  const int d = grid.dim();
  const double bound = d == 1 ? 1.0 / std::sqrt(cfg.H) : std::sqrt(cfg.L / cfg.H);
  BilinearResult res;
  res.ratios.assign(cfg.trials, 0.0);
  parallel_for(std::size_t(cfg.trials), [&](std::size_t i) {
    const SpectralField phi1 = random_band_limited(grid, cfg.H, mix_seed(cfg.seed, 2 * i));
    const SpectralField phi2 = random_band_limited(grid, cfg.L, mix_seed(cfg.seed, 2 * i + 1));
    const SpectralField p1 = lp_project(phi1, cfg.H), p2 = lp_project(phi2, cfg.L);
    const double value = free_product_norm(p1, cfg.sigma1, p2, cfg.sigma2, cfg.T);
    const double n1 = sobolev_norm(grid, p1.component(0), 0.0, false);
    const double n2 = sobolev_norm(grid, p2.component(0), 0.0, false);
    res.ratios[i] = value / (bound * n1 * n2);
  });
  res.sup_ratio = *std::max_element(res.ratios.begin(), res.ratios.end());
  return res;
}

}  // namespace qdnls
