#pragma once

// Conserved functionals, the Gagliardo-Nirenberg interaction ratio, the
// a priori gradient bounds built from them, and free-flow pullbacks used
// to probe scattering.

#include <optional>
#include <span>
#include <vector>

#include "qdnls/resonance.hpp"
#include "qdnls/spectral.hpp"

namespace qdnls {

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_sq_u = 0.0;
  double grad_sq_v = 0.0;
  double grad_sq_w = 0.0;
  double F = 0.0;
  // Inhomogeneous Sobolev norms of the triple at s = 0, s_c, 1/2, 1.
  double hs_0 = 0.0;
  double hs_sc = 0.0;
  double hs_half = 0.0;
  double hs_1 = 0.0;
  double gn_ratio = 0.0;  ///< 0 when F == 0
};

/// 2 ||u||^2 + ||v||^2 + ||w||^2.
double mass(const StateTriple& s);

/// ||grad f||^2 summed over components.
double gradient_sq(const SpectralField& f);

/// alpha ||grad u||^2 + beta ||grad v||^2 + gamma ||grad w||^2
///   + 2 Re (w, grad(u . conj v)).
double energy(const StateTriple& s, const SystemParams& p);

/// The cubic part 2 Re (w, grad(u . conj v)) of the energy.
double interaction_term(const StateTriple& s);

/// |(div w, u . conj v)| / (M^{1 - d/4} F^{(d+2)/4}). Throws if F == 0.
double gn_interaction_ratio(const StateTriple& s, const SystemParams& p);

DiagnosticsRow diagnostics_row(const StateTriple& s, const SystemParams& p, double t);

struct AprioriInputs {
  double M0 = 0.0;
  /// Energy with the sign of the coefficients folded in, so that it
  /// dominates rho_min * F for both all-positive and all-negative triples.
  double H0 = 0.0;
  double rho_min = 1.0;
  double rho_max = 1.0;
  double C_gn = 0.0;  ///< measured sup of gn_interaction_ratio
  double epsilon = 0.0;
  double F0 = 0.0;  ///< initial gradient functional, used by the small-energy variant
};

/// Fills M0, sign-adjusted H0, F0 and rho_min/max from the data. Throws
/// InvalidArgument unless alpha, beta, gamma share a sign.
AprioriInputs make_apriori_inputs(const StateTriple& data, const SystemParams& p, double C_gn,
                                  double epsilon = 0.0);

/// (H0 + C M0^{1-d/4}) / (rho_min - C M0^{1-d/4}) with C = 2 C_gn, or
/// nullopt unless C M0^{1-d/4} < rho_min / 2.
std::optional<double> apriori_bound(const AprioriInputs& in, int dim);

/// Continuity-argument variant: 3 eps^2 / rho_min when F0 < eps^2 / rho_max,
/// H0 < 2 eps^2 and C M0^{1-d/4} (4 eps^2 / rho_min)^{(d+2)/4} < eps^2.
/// Experimental in one and two dimensions.
std::optional<double> apriori_bound_small_energy(const AprioriInputs& in, int dim);

/// Right-hand side of the energy inequality at gradient level F:
/// (|H0| + 2 C_gn M0^{1-d/4} F^{(d+2)/4}) / rho_min. Any F reached by the
/// flow satisfies F <= energy_inequality_rhs(F).
double energy_inequality_rhs(const AprioriInputs& in, int dim, double F);

struct ScatteringProfile {
  StateTriple profile;            ///< pullback at the last ladder time
  std::vector<double> times;      ///< ladder t_k
  std::vector<double> distances;  ///< H^{s_c} distance between pullbacks k and k+1
};

/// Pulls each snapshot at a ladder time back by the free flows,
/// exp(-i t_k sigma Laplacian) per component. With an empty ladder every
/// snapshot with t > 0 is used. Needs at least 3 ladder points.
ScatteringProfile scattering_profile(std::span<const Snapshot> snapshots, const SystemParams& p,
                                     std::span<const double> ladder = {});

}  // namespace qdnls
