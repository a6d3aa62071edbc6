#include <cmath>
#include <complex>

#include "doctest.h"
#include "qdnls/diagnostics.hpp"
#include "qdnls/errors.hpp"
#include "qdnls/initial_data.hpp"
#include "qdnls/integrator.hpp"

using namespace qdnls;

namespace {

StateTriple single_mode_u(const TorusGrid& g, int k, cplx c) {
  StateTriple s(g);
  s.u.values()[k] = c;
  return s;
}

StateTriple rotate(const StateTriple& s, double phi) {
  StateTriple r = s;
  for (int f = 0; f < 3; ++f) r[f] *= std::polar(1.0, phi);
  return r;
}

}  // namespace

TEST_CASE("mass and energy closed forms") {
  const TorusGrid g(1, 64, 12.0);
  const SystemParams p(1.5, 2, 3, 1);
  CHECK(mass(StateTriple(g)) == 0.0);
  CHECK(energy(StateTriple(g), p) == 0.0);
  const cplx c(0.3, -0.4);
  const StateTriple s = single_mode_u(g, 3, c);
  const double xi = 2 * M_PI * 3 / 12.0;
  CHECK(mass(s) == doctest::Approx(2 * std::norm(c) * 12.0).epsilon(1e-14));
  CHECK(energy(s, p) == doctest::Approx(1.5 * xi * xi * std::norm(c) * 12.0).epsilon(1e-14));
  StateTriple vw(g);
  vw.v.values()[1] = 2.0;
  vw.w.values()[2] = 1.0;
  CHECK(mass(vw) == doctest::Approx((4.0 + 1.0) * 12.0).epsilon(1e-14));
}

TEST_CASE("interaction term against a direct physical-space sum") {
  const TorusGrid g(1, 128, 20.0);
  const StateTriple s = random_bump_state(g, 17);
  // 2 Re (w, d/dx(u conj v)) = -2 Re (w_x, u conj v), both as grid sums.
  StateTriple phys = s;
  phys.make_physical();
  SpectralField wx = s.w;
  for (std::size_t m = 0; m < g.size(); ++m) wx.values()[m] *= cplx(0, g.derivative_wavenumber(int(m)));
  wx.make_physical();
  cplx acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    acc += std::conj(wx.values()[i]) * phys.u.values()[i] * std::conj(phys.v.values()[i]);
  const double want = -2.0 * acc.real() * g.period() / g.n();
  CHECK(interaction_term(s) == doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("functionals under decoupled free evolution") {
  const TorusGrid g(2, 32, 10.0);
  const SystemParams p(-1, 1, 1, 2);
  const StateTriple s = random_bump_state(g, 4);
  for (int f = 0; f < 3; ++f) {
    StateTriple one(g);
    one[f] = s[f];
    StateTriple moved = one;
    moved[f] = free_evolve(one[f], 0.37 * (f + 1), 1.9);
    CHECK(mass(moved) == doctest::Approx(mass(one)).epsilon(1e-12));
    CHECK(energy(moved, p) == doctest::Approx(energy(one, p)).epsilon(1e-12));
  }
}

TEST_CASE("energy is conserved along small-data evolution") {
  const TorusGrid g(1, 256, 20 * M_PI);
  const SystemParams p(-1, 1, 1, 1);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.monitor_every = 100;
  const Trajectory tr = evolve(gaussian_state(g), p, cfg);
  const double H0 = tr.diagnostics.front().energy;
  for (const auto& r : tr.diagnostics) CHECK(std::abs(r.energy - H0) / (std::abs(H0) + 1) <= 1e-6);
}

TEST_CASE("gagliardo-nirenberg ratio") {
  const TorusGrid g(1, 128, 20.0);
  const SystemParams p(1, 2, 3, 1);
  StateTriple s = random_bump_state(g, 8);
  const double r = gn_interaction_ratio(s, p);
  CHECK(std::isfinite(r));
  CHECK(r > 0);
  CHECK(gn_interaction_ratio(rotate(s, 1.234), p) == doctest::Approx(r).epsilon(1e-12));
  s.w = SpectralField(g, Repr::spectral);
  CHECK(gn_interaction_ratio(s, p) == 0.0);
  CHECK_THROWS_AS(gn_interaction_ratio(StateTriple(g), p), InvalidArgument);

  SUBCASE("bounded over a random corpus") {
    double sup = 0;
    for (int i = 0; i < 200; ++i) sup = std::max(sup, gn_interaction_ratio(random_bump_state(g, 100 + i), p));
    CHECK(std::isfinite(sup));
    CHECK(sup < 10);
  }
}

TEST_CASE("a priori bound formula and gate") {
  AprioriInputs in;
  in.H0 = 1.0;
  in.rho_min = 2.0;
  in.rho_max = 3.0;
  in.C_gn = 0.1;
  for (double M : {1e-4, 1e-8, 1e-12}) {
    in.M0 = M;
    const auto b = apriori_bound(in, 1);
    REQUIRE(b);
    const double C = 2 * in.C_gn * std::pow(M, 0.75);
    CHECK(*b == doctest::Approx((in.H0 + C) / (in.rho_min - C)).epsilon(1e-14));
  }
  in.M0 = 1e-14;
  CHECK(*apriori_bound(in, 1) == doctest::Approx(1.0 / in.rho_min).epsilon(1e-9));

  SUBCASE("gate at 0.6 rho_min is inapplicable") {
    in.M0 = 1.0;
    in.C_gn = 0.6 * in.rho_min;
    CHECK(!apriori_bound(in, 1));
    CHECK(!apriori_bound(in, 2));
  }
  SUBCASE("shrinking the mass never disables the bound") {
    bool was = false;
    for (double M = 10; M > 1e-10; M /= 3) {
      in.M0 = M;
      const bool now = apriori_bound(in, 1).has_value();
      CHECK((!was || now));
      was = now;
    }
    CHECK(was);
  }
}

TEST_CASE("apriori inputs need same-sign coefficients") {
  const TorusGrid g(1, 64, 20.0);
  CHECK_THROWS_AS(make_apriori_inputs(gaussian_state(g), SystemParams(-1, 1, 1, 1), 0.1), InvalidArgument);
  const AprioriInputs neg = make_apriori_inputs(gaussian_state(g), SystemParams(-1, -2, -3, 1), 0.1);
  const AprioriInputs pos = make_apriori_inputs(gaussian_state(g), SystemParams(1, 2, 3, 1), 0.1);
  CHECK(neg.rho_min == 1.0);
  CHECK(neg.rho_max == 3.0);
  CHECK(neg.H0 >= neg.rho_min * neg.F0 - 1.0);
  CHECK(pos.H0 >= pos.rho_min * pos.F0 - 1.0);
}

TEST_CASE("small-energy variant") {
  AprioriInputs in;
  in.rho_min = 1.0;
  in.rho_max = 2.0;
  in.C_gn = 0.5;
  in.epsilon = 0.1;
  // F(0) = 0 with nothing else: the bound applies vacuously.
  const auto b = apriori_bound_small_energy(in, 1);
  REQUIRE(b);
  CHECK(*b == doctest::Approx(3 * 0.01));
  in.F0 = 0.01;  // not below eps^2 / rho_max
  CHECK(!apriori_bound_small_energy(in, 1));
  in.F0 = 0;
  in.epsilon = 1e3;
  in.M0 = 1e3;
  CHECK(!apriori_bound_small_energy(in, 2));

  SUBCASE("bootstrap step along a trajectory") {
    // If F(t) < 4 eps^2 / rho_min then the energy inequality already
    // forces F(t) < 3 eps^2 / rho_min.
    const TorusGrid g(1, 128, 20 * M_PI);
    const SystemParams p(1, 2, 3, 1);
    GaussianRecipe rec;
    rec.amplitude = 0.02;
    const StateTriple data = gaussian_state(g, rec);
    const AprioriInputs base = make_apriori_inputs(data, p, 0.05);
    AprioriInputs e = base;
    e.epsilon = std::sqrt(1.01 * base.F0 * base.rho_max) + std::sqrt(std::abs(base.H0));
    REQUIRE(apriori_bound_small_energy(e, 1));
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    cfg.monitor_every = 10;
    const Trajectory tr = evolve(data, p, cfg);
    const double eps2 = e.epsilon * e.epsilon;
    for (const auto& r : tr.diagnostics) {
      REQUIRE(r.F < 4 * eps2 / e.rho_min);
      CHECK(energy_inequality_rhs(e, 1, r.F) < 3 * eps2 / e.rho_min);
      CHECK(r.F < 3 * eps2 / e.rho_min);
    }
  }
}

TEST_CASE("scattering profile") {
  const TorusGrid g(2, 32, 40.0);
  const SystemParams p(-1, 1, 1, 2);
  SUBCASE("free trajectory has identical pullbacks") {
    GaussianRecipe rec;
    const StateTriple data = gaussian_state(g, rec);
    std::vector<Snapshot> snaps;
    for (double t : {0.0, 1.0, 2.0, 4.0}) {
      StateTriple s = data;
      s.u = free_evolve(data.u, p.alpha(), t);
      s.v = free_evolve(data.v, p.beta(), t);
      s.w = free_evolve(data.w, p.gamma(), t);
      snaps.push_back({t, s});
    }
    const ScatteringProfile prof = scattering_profile(snaps, p);
    REQUIRE(prof.distances.size() == 2);
    for (double d : prof.distances) CHECK(d < 1e-13);
    CHECK(sobolev_distance(prof.profile, data, 0.0) < 1e-13);
  }
  SUBCASE("zero data gives a zero profile") {
    std::vector<Snapshot> snaps;
    for (double t : {1.0, 2.0, 4.0}) snaps.push_back({t, StateTriple(g)});
    const ScatteringProfile prof = scattering_profile(snaps, p);
    CHECK(sobolev_norm(prof.profile, 0.0) == 0.0);
  }
  SUBCASE("short ladders are rejected") {
    std::vector<Snapshot> snaps;
    for (double t : {1.0, 2.0}) snaps.push_back({t, StateTriple(g)});
    CHECK_THROWS_AS(scattering_profile(snaps, p), InvalidArgument);
  }
  SUBCASE("small data on a coarse grid: distances decrease") {
    const TorusGrid big(2, 64, 64.0);
    GaussianRecipe rec;
    rec.amplitude = 0.05;
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 12;
    cfg.monitor_every = 1000;
    EvolveOptions o;
    o.checkpoints = {1.5, 3, 6, 12};
    o.diagnostics = false;
    const Trajectory tr = evolve(gaussian_state(big, rec), p, cfg, o);
    const double ladder[] = {1.5, 3, 6, 12};
    const ScatteringProfile prof = scattering_profile(tr.snapshots, p, ladder);
    for (std::size_t k = 1; k < prof.distances.size(); ++k) CHECK(prof.distances[k] < prof.distances[k - 1]);
  }
}

TEST_CASE("diagnostics row") {
  const TorusGrid g(1, 64, 20.0);
  const SystemParams p(-1, 1, 1, 1);
  const StateTriple s = random_bump_state(g, 2);
  const DiagnosticsRow r = diagnostics_row(s, p, 0.25);
  CHECK(r.t == 0.25);
  CHECK(r.mass == doctest::Approx(mass(s)));
  CHECK(r.F == doctest::Approx(r.grad_sq_u + r.grad_sq_v + r.grad_sq_w));
  CHECK(r.hs_0 <= r.hs_half);
  CHECK(r.hs_sc <= r.hs_0);
  CHECK(r.hs_half <= r.hs_1);
}
