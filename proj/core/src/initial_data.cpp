#include "qdnls/initial_data.hpp"

#include <cmath>
#include <random>

namespace qdnls {

namespace {

// Bump exp(-|x - c|^2 / (2 w^2)) e^{i (k . x + phase)}, using the periodic
// distance to c so the packet is smooth across the boundary.
void fill_bump(SpectralField& f, const double* centre, double width, double amp, double k,
               double phase) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  const double L = g.period();
  auto pdist = [L](double x, double c) {
    double d = std::fmod(x - c, L);
    if (d > L / 2) d -= L;
    if (d < -L / 2) d += L;
    return d;
  };
  for (int j = 0; j < f.components(); ++j) {
    auto c = f.component(j);
    const cplx cphase = std::polar(1.0, phase + j * kPi / 4.0);
    if (g.dim() == 1) {
      for (int i = 0; i < n; ++i) {
        const double x = g.x(i), dx = pdist(x, centre[0]);
        c[i] = amp * std::exp(-dx * dx / (2 * width * width)) * std::polar(1.0, k * dx) * cphase;
      }
    } else {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const double dx = pdist(g.x(a), centre[0]), dy = pdist(g.x(b), centre[1]);
          const double r2 = dx * dx + dy * dy;
          c[std::size_t(a) * n + b] =
              amp * std::exp(-r2 / (2 * width * width)) * std::polar(1.0, k * (dx + dy)) * cphase;
        }
    }
  }
}

}  // namespace

StateTriple gaussian_state(const TorusGrid& grid, const GaussianRecipe& r) {
  StateTriple s(grid, Repr::physical);
  const double centre[2] = {grid.period() / 2, grid.period() / 2};
  for (int f = 0; f < 3; ++f) fill_bump(s[f], centre, r.width, r.amplitude, r.momentum[f], 0.0);
  s.make_spectral();
  if (r.zero_mean)
    for (int f = 0; f < 3; ++f)
      for (int j = 0; j < s[f].components(); ++j) s[f].component(j)[0] = 0.0;
  return s;
}

StateTriple random_bump_state(const TorusGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  StateTriple s(grid, Repr::physical);
  const double L = grid.period();
  for (int f = 0; f < 3; ++f) {
    const double centre[2] = {L * (0.3 + 0.4 * U(rng)), L * (0.3 + 0.4 * U(rng))};
    const double width = 0.5 + 2.5 * U(rng);
    const double amp = 0.01 * std::pow(100.0, U(rng));
    const double k = -2.0 + 4.0 * U(rng);
    const double phase = 2 * kPi * U(rng);
    fill_bump(s[f], centre, width, amp, k, phase);
  }
  s.make_spectral();
  return s;
}

StateTriple scaled(const StateTriple& s, double factor) {
  StateTriple out = s;
  for (int f = 0; f < 3; ++f) out[f] *= factor;
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace qdnls
