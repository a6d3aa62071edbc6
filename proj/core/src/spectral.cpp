#include "qdnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

#include "fft.hpp"
#include "qdnls/errors.hpp"

namespace qdnls {

double default_period(int dim) noexcept { return dim == 1 ? 20.0 * kPi : 10.0 * kPi; }

bool is_power_of_two(double x) noexcept {
  if (!(x > 0) || !std::isfinite(x)) return false;
  int e = 0;
  return std::frexp(x, &e) == 0.5;
}

namespace {

std::shared_ptr<const std::vector<double>> shared_xi_sq(int dim, int n, double period,
                                                       const std::vector<double>& axis) {
  static std::mutex m;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(m);
  auto key = std::make_tuple(dim, n, period);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto t = std::make_shared<std::vector<double>>();
  if (dim == 1) {
    t->resize(n);
    for (int i = 0; i < n; ++i) (*t)[i] = axis[i] * axis[i];
  } else {
    t->resize(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (*t)[std::size_t(i) * n + j] = axis[i] * axis[i] + axis[j] * axis[j];
  }
  cache.emplace(key, t);
  return t;
}

}  // namespace

TorusGrid::TorusGrid(int dim, int n, double period) : dim_(dim), n_(n), period_(period) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
  if (n < 16 || (n & (n - 1)) != 0) throw InvalidArgument("grid n must be a power of two >= 16");
  if (!(period > 0) || !std::isfinite(period)) throw InvalidArgument("grid period must be positive");
  size_ = dim == 1 ? std::size_t(n) : std::size_t(n) * n;
  axis_xi_.resize(n);
  for (int i = 0; i < n; ++i) axis_xi_[i] = 2.0 * kPi * signed_index(i) / period;
  xi_sq_ = shared_xi_sq(dim, n, period, axis_xi_);
}

double TorusGrid::xi(std::size_t m, int axis) const noexcept {
  if (dim_ == 1) return axis_xi_[m];
  return axis == 0 ? axis_xi_[m / n_] : axis_xi_[m % n_];
}

double TorusGrid::volume() const noexcept { return dim_ == 1 ? period_ : period_ * period_; }

SpectralField::SpectralField(const TorusGrid& grid, Repr repr)
    : grid_(grid), repr_(repr), data_(grid.size() * grid.dim()) {}

SpectralField::SpectralField(const TorusGrid& grid, Repr repr, std::vector<cplx> values)
    : grid_(grid), repr_(repr), data_(std::move(values)) {
  if (data_.size() != grid.size() * grid.dim())
    throw InvalidArgument("field: value count must be dim * n^dim");
}

std::span<cplx> SpectralField::component(int j) noexcept {
  return std::span<cplx>(data_).subspan(grid_.size() * j, grid_.size());
}
std::span<const cplx> SpectralField::component(int j) const noexcept {
  return std::span<const cplx>(data_).subspan(grid_.size() * j, grid_.size());
}

void SpectralField::make_spectral() {
  if (repr_ == Repr::spectral) return;
  for (int j = 0; j < components(); ++j)
    detail::fft_forward(grid_.dim(), grid_.n(), component(j), component(j));
  repr_ = Repr::spectral;
}

void SpectralField::make_physical() {
  if (repr_ == Repr::physical) return;
  for (int j = 0; j < components(); ++j)
    detail::fft_backward(grid_.dim(), grid_.n(), component(j), component(j));
  repr_ = Repr::physical;
}

void SpectralField::require_same(const SpectralField& o) const {
  if (!(grid_ == o.grid_)) throw InvalidArgument("field: grid mismatch");
  if (repr_ != o.repr_) throw InvalidArgument("field: representation mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& z : data_) z *= a;
  return *this;
}

SpectralField to_spectral(SpectralField f) {
  f.make_spectral();
  return f;
}

SpectralField to_physical(SpectralField f) {
  f.make_physical();
  return f;
}

double sobolev_norm(const TorusGrid& grid, std::span<const cplx> c, double s, bool homogeneous) {
  if (c.size() != grid.size()) throw InvalidArgument("sobolev_norm: length mismatch");
  double acc = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double a2 = std::norm(c[m]);
    const double k2 = grid.xi_sq(m);
    if (homogeneous) {
      if (k2 == 0.0) {
        if (s < 0 && a2 > 0) return std::numeric_limits<double>::infinity();
        continue;
      }
      acc += (s == 0 ? 1.0 : std::pow(k2, s)) * a2;
    } else {
      acc += (s == 0 ? 1.0 : std::pow(1.0 + k2, s)) * a2;
    }
  }
  return std::sqrt(acc * grid.volume());
}

double sobolev_norm(const SpectralField& f, double s, bool homogeneous) {
  const SpectralField g = to_spectral(f);
  double acc = 0.0;
  for (int j = 0; j < g.components(); ++j) {
    const double v = sobolev_norm(g.grid(), g.component(j), s, homogeneous);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0, false); }

double lp_cutoff(double t) noexcept {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double x = a - 1.0;
  return 1.0 - x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double lp_symbol(double xi_abs, double N) noexcept {
  return lp_cutoff(xi_abs / N) - lp_cutoff(2.0 * xi_abs / N);
}

namespace {

template <class F>
SpectralField apply_radial(const SpectralField& f, F&& mult) {
  SpectralField g = to_spectral(f);
  const auto& grid = g.grid();
  for (int j = 0; j < g.components(); ++j) {
    auto c = g.component(j);
    for (std::size_t m = 0; m < c.size(); ++m) c[m] *= mult(std::sqrt(grid.xi_sq(m)));
  }
  return g;
}

}  // namespace

SpectralField lp_project(const SpectralField& f, double N) {
  if (!is_power_of_two(N)) throw InvalidArgument("lp_project: N must be a power of two");
  return apply_radial(f, [N](double r) { return lp_symbol(r, N); });
}

SpectralField lp_low(const SpectralField& f, double N) {
  if (!is_power_of_two(N)) throw InvalidArgument("lp_low: N must be a power of two");
  return apply_radial(f, [N](double r) { return lp_cutoff(2.0 * r / N); });
}

void free_evolve_inplace(const TorusGrid& grid, std::span<cplx> c, double sigma, double t) {
  if (t == 0.0) return;
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= std::polar(1.0, -t * sigma * grid.xi_sq(m));
}

SpectralField free_evolve(const SpectralField& f, double sigma, double t) {
  SpectralField g = to_spectral(f);
  for (int j = 0; j < g.components(); ++j) free_evolve_inplace(g.grid(), g.component(j), sigma, t);
  return g;
}

SpectralField random_band_limited(const TorusGrid& grid, double N, std::uint64_t seed) {
  if (!is_power_of_two(N)) throw InvalidArgument("random_band_limited: N must be a power of two");
  if (!(2.0 * N < grid.nyquist()))
    throw InvalidArgument("random_band_limited: band not resolvable on this grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G(0.0, 1.0);
  SpectralField f(grid, Repr::spectral);
  for (int j = 0; j < f.components(); ++j) {
    auto c = f.component(j);
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (lp_symbol(std::sqrt(grid.xi_sq(m)), N) > 0) {
        const double re = G(rng);
        const double im = G(rng);
        c[m] = cplx(re, im);
      }
    }
  }
  const double norm = l2_norm(f);
  if (norm == 0.0) throw InvalidArgument("random_band_limited: no grid modes in band");
  f *= 1.0 / norm;
  return f;
}

StateTriple::StateTriple(const TorusGrid& grid, Repr repr)
    : u(grid, repr), v(grid, repr), w(grid, repr) {}

StateTriple::StateTriple(SpectralField u_, SpectralField v_, SpectralField w_)
    : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)) {
  if (!(u.grid() == v.grid()) || !(u.grid() == w.grid()))
    throw InvalidArgument("state: components live on different grids");
}

void StateTriple::make_spectral() {
  u.make_spectral();
  v.make_spectral();
  w.make_spectral();
}

void StateTriple::make_physical() {
  u.make_physical();
  v.make_physical();
  w.make_physical();
}

double sobolev_norm(const StateTriple& s, double sigma_s, bool homogeneous) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = sobolev_norm(s[i], sigma_s, homogeneous);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double sobolev_distance(const StateTriple& a, const StateTriple& b, double s, bool homogeneous) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    SpectralField d = to_spectral(a[i]);
    d -= to_spectral(b[i]);
    const double v = sobolev_norm(d, s, homogeneous);
    acc += v * v;
  }
  return std::sqrt(acc);
}

SpectralField scaling_transform(const SpectralField& f, double lambda) {
  if (!is_power_of_two(lambda)) throw InvalidArgument("scaling_transform: lambda must be 2^m");
  const TorusGrid& g = f.grid();
  TorusGrid scaled(g.dim(), g.n(), g.period() * lambda);
  std::vector<cplx> vals(f.values().begin(), f.values().end());
  for (auto& z : vals) z /= lambda;
  return SpectralField(scaled, f.repr(), std::move(vals));
}

StateTriple scaling_transform(const StateTriple& s, double lambda) {
  return StateTriple(scaling_transform(s.u, lambda), scaling_transform(s.v, lambda),
                     scaling_transform(s.w, lambda));
}

}  // namespace qdnls
