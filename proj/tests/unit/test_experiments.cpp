#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qdnls/errors.hpp"
#include "qdnls/experiments.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/integrator.hpp"
#include "qdnls/parallel.hpp"
#include "qdnls/quadrature.hpp"

using namespace qdnls;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {2, 3, 5, 16, 64}) {
    const QuadratureRule r = gauss_legendre(n, -0.5, 2.0);
    for (int k = 0; k <= 2 * n - 1; k += std::max(1, n / 4)) {
      double acc = 0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
      const double want = (std::pow(2.0, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
      CHECK(acc == doctest::Approx(want).epsilon(1e-12));
    }
  }
  const double breaks[2] = {0.3, 1.1};
  const QuadratureRule p = gauss_legendre_panels(8, 0.0, 2.0, breaks);
  CHECK(p.nodes.size() == 24);
  double acc = 0;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) acc += p.weights[i] * std::abs(p.nodes[i] - 1.1);
  CHECK(acc == doctest::Approx(0.5 * 1.1 * 1.1 + 0.5 * 0.9 * 0.9).epsilon(1e-13));
}

TEST_CASE("line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v - 2);
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(3));
  CHECK(f.intercept == doctest::Approx(-2));
  CHECK(f.r_squared == doctest::Approx(1));
  y[2] += 1;
  CHECK(fit_line(x, y).r_squared < 1);
}

TEST_CASE("parallel_for") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
                    if (i == 31) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("ill-posedness boxes and data") {
  const SystemParams eq(1, 1, 1, 1);
  const SystemParams tz = theta_zero_params(2, 1, 1);
  CHECK_THROWS_AS(make_illposed_case(IllposedVariant::alpha_eq_gamma, SystemParams(-1, 1, 1, 1), 32),
                  InvalidArgument);
  CHECK_THROWS_AS(make_illposed_case(IllposedVariant::theta_zero, eq, 32), InvalidArgument);
  CHECK_THROWS_AS(make_illposed_case(IllposedVariant::theta_negative, eq, 32), InvalidArgument);
  CHECK_THROWS_AS(make_illposed_case(IllposedVariant::alpha_eq_gamma, eq, 8), InvalidArgument);
  CHECK(parse_illposed_variant("b") == IllposedVariant::theta_zero);
  CHECK_THROWS_AS(parse_illposed_variant("d"), InvalidArgument);

  for (double N : {16.0, 64.0, 256.0}) {
    const IllposedCase a = make_illposed_case(IllposedVariant::alpha_eq_gamma, eq, N);
    const IllposedData da = illposed_data(a);
    CHECK(da.hs_norm_f(0) * da.hs_norm_f(0) == doctest::Approx(a.box_f.width()).epsilon(1e-12));
    CHECK(da.hs_norm_g(0) * da.hs_norm_g(0) == doctest::Approx(a.box_g.width()).epsilon(1e-12));
    for (double s : {0.25, 0.5}) {
      const double r = da.hs_norm_f(s) / std::pow(N, s - 0.5);
      CHECK(r > 0.5);
      CHECK(r < 2.0);
    }
    const IllposedData db = illposed_data(make_illposed_case(IllposedVariant::theta_zero, tz, N));
    const double r = db.hs_norm_f(0.5) / std::pow(N, 0.5);
    CHECK(r > 0.5);
    CHECK(r < 2.0);
  }
  CHECK_THROWS_AS(illposed_data(make_illposed_case(IllposedVariant::alpha_eq_gamma, eq, 16), 8),
                  InvalidArgument);
}

TEST_CASE("resonance time factor") {
  CHECK(std::abs(resonance_time_factor(0.3, 0.0) - 0.3) < 1e-15);
  for (double phi : {1e-9, 1e-4, 2.0, -50.0}) {
    // Oracle: midpoint sum of e^{-i s phi} over [0, t].
    const double t = 0.7;
    const int n = 200000;
    std::complex<double> acc = 0;
    for (int i = 0; i < n; ++i) acc += std::polar(1.0, -(i + 0.5) * t / n * phi);
    acc *= t / n;
    CHECK(std::abs(resonance_time_factor(t, phi) - acc) < 1e-8);
  }
}

TEST_CASE("second Picard iterate") {
  const SystemParams eq(1, 1, 1, 1);
  const IllposedCase c = make_illposed_case(IllposedVariant::alpha_eq_gamma, eq, 32);
  const Picard2 pic(illposed_data(c), eq);
  const double mid[1] = {0.5 * (c.box_out.lo + c.box_out.hi)};
  CHECK(pic.amplitude_abs(mid, 0.0) == 0.0);
  const double outside[1] = {c.sumset().hi + 0.1};
  CHECK(pic.amplitude_abs(outside, 0.05) == 0.0);

  SUBCASE("linear growth for small times") {
    const double overlap = std::min(c.box_f.hi, mid[0] - c.box_g.lo) - std::max(c.box_f.lo, mid[0] - c.box_g.hi);
    const double t = 1e-7;
    CHECK(pic.amplitude_abs(mid, t) / t == doctest::Approx(mid[0] * overlap).epsilon(1e-6));
  }
  SUBCASE("hs_norm is a quadrature of amplitude_abs") {
    const double times[2] = {0.01, 0.1};
    const std::vector<double> nrm = pic.hs_norm(0.5, times);
    // Oracle: composite midpoint over the sumset.
    const Interval S = c.sumset();
    const int n = 4000;
    for (int k = 0; k < 2; ++k) {
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        const double xi[1] = {S.lo + (i + 0.5) * S.width() / n};
        const double a = pic.amplitude_abs(xi, times[k]);
        acc += std::sqrt(1 + xi[0] * xi[0]) * a * a;
      }
      CHECK(std::sqrt(acc * S.width() / n) == doctest::Approx(nrm[k]).epsilon(1e-4));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(Picard2(illposed_data(c), SystemParams(1, 1, 1, 2)), InvalidArgument);
  }
}

TEST_CASE("second Picard iterate against the torus Duhamel map") {
  // Indicator data sampled on a long torus with trapezoid end weights, so
  // the discrete convolution of two boxes is exact except at its apex,
  // where it is short by half a sample: u carries box_f, v carries -box_g,
  // w = 0. Two Duhamel sweeps from the zero iterate produce the
  // second iterate, whose w slot must match the continuum amplitude.
  const SystemParams p = theta_zero_params(2, 1, 1);
  const IllposedCase c = make_illposed_case(IllposedVariant::theta_zero, p, 16);
  const Picard2 pic(illposed_data(c), p);
  const double ell = 2 * M_PI * 128;
  const TorusGrid g(1, 16384, ell);
  const double dxi = 2 * M_PI / ell;
  StateTriple data(g);
  auto fill = [&](SpectralField& f, const Interval& box, int sign) {
    const long lo = std::lround(box.lo / dxi), hi = std::lround(box.hi / dxi);
    REQUIRE(std::abs(lo * dxi - box.lo) < 1e-12);
    REQUIRE(std::abs(hi * dxi - box.hi) < 1e-12);
    for (long k = lo; k <= hi; ++k) {
      const long idx = sign * k < 0 ? sign * k + g.n() : sign * k;
      f.values()[idx] = (k == lo || k == hi ? 0.5 : 1.0) / ell;
    }
  };
  fill(data.u, c.box_f, 1);
  fill(data.v, c.box_g, -1);
  const double T = 0.004;
  const int intervals = 128;
  std::vector<Snapshot> zero;
  for (int k = 0; k <= intervals; ++k) zero.push_back({T * k / intervals, StateTriple(g)});
  const std::vector<Snapshot> first = duhamel_apply(zero, p, data, T);
  const std::vector<Snapshot> second = duhamel_apply(first, p, data, T);
  const SpectralField& w = second.back().state.w;

  int compared = 0;
  double worst = 0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double xi[1] = {g.wavenumber(int(m))};
    if (!c.box_out.contains(xi[0])) continue;
    const double want = pic.amplitude_abs(xi, T);
    const double got = std::abs(w.values()[m]) * 2 * M_PI * ell;
    REQUIRE(want > 0);
    worst = std::max(worst, std::abs(got - want) / want);
    ++compared;
  }
  CHECK(compared >= 8);
  CHECK(worst < 0.01);
}

TEST_CASE("growth exponent") {
  const SystemParams eq(1, 1, 1, 1);
  GrowthConfig cfg;
  cfg.variant = IllposedVariant::alpha_eq_gamma;
  cfg.s = 0.5;
  cfg.t_grid = default_t_grid(0.1);
  CHECK(cfg.t_grid == std::vector<double>{0.0125, 0.025, 0.05, 0.1});

  SUBCASE("halves of the range agree") {
    cfg.N_list = {16, 32, 64, 128, 256};
    const FitResult lo = growth_exponent(cfg, eq);
    cfg.N_list = {32, 64, 128, 256, 512};
    const FitResult hi = growth_exponent(cfg, eq);
    REQUIRE(lo.r_squared >= 0.98);
    REQUIRE(hi.r_squared >= 0.98);
    CHECK(std::abs(lo.slope - hi.slope) < 0.05);
    CHECK(lo.samples.size() == 5);
    CHECK(!lo.inconclusive);
  }
  SUBCASE("rejections") {
    cfg.N_list = {16, 32, 64, 128};
    CHECK_THROWS_AS(growth_exponent(cfg, eq), InvalidArgument);
    cfg.N_list = {16, 32, 48, 128, 256};
    CHECK_THROWS_AS(growth_exponent(cfg, eq), InvalidArgument);
    cfg.N_list = {16, 32, 64, 128, 256};
    cfg.variant = IllposedVariant::theta_negative;
    CHECK_THROWS_AS(growth_exponent(cfg, eq), InvalidArgument);
  }
}

TEST_CASE("gram time integral") {
  const std::complex<double> one[1] = {{0.6, 0.8}};
  const double w1[1] = {3.0};
  CHECK(gram_time_integral(one, w1, 2.5) == doctest::Approx(2.5).epsilon(1e-15));

  const std::complex<double> c[3] = {{1, 0.5}, {-0.3, 2}, {0.7, -0.1}};
  const double om[3] = {0.0, 4.0, 4.0 + 1e-9};
  const double T = 1.7;
  const QuadratureRule r = gauss_legendre(64, 0, T);
  double want = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    std::complex<double> s = 0;
    for (int k = 0; k < 3; ++k) s += c[k] * std::polar(1.0, -r.nodes[i] * om[k]);
    want += r.weights[i] * std::norm(s);
  }
  CHECK(gram_time_integral(c, om, T) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("free product norm and bilinear probe") {
  const TorusGrid g(1, 64, 10.0);
  SpectralField f1(g, Repr::spectral), f2(g, Repr::spectral);
  f1.values()[5] = {0.3, 0.4};
  f2.values()[60] = 2.0;
  CHECK(free_product_norm(f1, 1.0, f2, -2.0, 3.0) ==
        doctest::Approx(0.5 * 2.0 * std::sqrt(3.0 * 10.0)).epsilon(1e-13));
  f1.values()[7] = 1.0;
  // Distinct output modes are orthogonal in space, so cross terms vanish.
  const double got = free_product_norm(f1, 1.0, f2, -2.0, 3.0);
  CHECK(got * got == doctest::Approx(4.0 * 10.0 * (0.25 * 3.0 + 3.0)).epsilon(1e-12));

  SUBCASE("colliding output modes keep the oscillatory cross term") {
    SpectralField h1(g, Repr::spectral), h2(g, Repr::spectral);
    h1.values()[5] = 1.0;
    h1.values()[7] = 1.0;
    h2.values()[2] = 1.0;
    h2.values()[0] = 1.0;
    const double T = 3.0, s1 = 1.0, s2 = -2.0;
    auto om = [&](int a, int b) {
      const double xa = g.wavenumber(a), xb = g.wavenumber(b);
      return s1 * xa * xa + s2 * xb * xb;
    };
    // Output mode 7 gets (5,2) and (7,0); modes 5, 9 get one pair each.
    const double d = om(5, 2) - om(7, 0);
    const double mode7 = 2 * T + 2 * std::sin(d * T) / d;
    const double want = 10.0 * (mode7 + T + T);
    const double h = free_product_norm(h1, s1, h2, s2, T);
    CHECK(h * h == doctest::Approx(want).epsilon(1e-12));
  }

  BilinearConfig cfg;
  cfg.H = 8;
  cfg.L = 8;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.L = 2;
  cfg.trials = 4;
  cfg.seed = 11;
  const TorusGrid big(1, 256, 2 * M_PI);
  const BilinearResult a = bilinear_ratio(cfg, big);
  const BilinearResult b = bilinear_ratio(cfg, big);
  CHECK(a.ratios == b.ratios);
  CHECK(a.ratios.size() == 4);
  CHECK(a.sup_ratio == *std::max_element(a.ratios.begin(), a.ratios.end()));
  cfg.seed = 12;
  CHECK(bilinear_ratio(cfg, big).ratios != a.ratios);
}

TEST_CASE("scaling equivariance") {
  const TorusGrid g(1, 128, 20.0);
  const SystemParams p(-1, 1, 1, 1);
  const StateTriple data = random_bump_state(g, 5);
  CHECK(scaling_equivariance(p, data, 1.0, 0.2, 1e-2).deviation == 0.0);
  CHECK_THROWS_AS(scaling_equivariance(p, data, 3.0, 0.2, 1e-2), InvalidArgument);

  StateTriple free_data = data;
  free_data.v = SpectralField(g, Repr::spectral);
  free_data.w = SpectralField(g, Repr::spectral);
  const EquivarianceResult r = scaling_equivariance(p, free_data, 2.0, 0.5, 1e-2);
  CHECK(r.deviation <= 1e-12);
  CHECK(r.richardson <= 1e-12);

  CHECK(equivariance_norm(data, data, -0.5) == 0.0);
}
