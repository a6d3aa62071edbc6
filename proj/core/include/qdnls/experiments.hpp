#pragma once

// Quantitative experiments: growth of the second Picard iterate on thin
// frequency boxes, free-solution bilinear probes, and scaling equivariance.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qdnls/integrator.hpp"
#include "qdnls/quadrature.hpp"
#include "qdnls/resonance.hpp"
#include "qdnls/spectral.hpp"

namespace qdnls {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

enum class IllposedVariant { alpha_eq_gamma, theta_zero, theta_negative };

std::string_view to_string(IllposedVariant v) noexcept;
/// Accepts "a"/"alpha_eq_gamma", "b"/"theta_zero", "c"/"theta_negative".
IllposedVariant parse_illposed_variant(std::string_view s);

/// Frequency boxes along the first axis. Convention: f has Fourier support
/// box_f, the conjugated factor contributes eta = xi - xi1 in box_g, and the
/// output lives on the sumset box_f + box_g, which contains box_out.
struct IllposedCase {
  IllposedVariant variant;
  double N = 0.0;
  double M = 0.0;  ///< M of the case (M+ for theta_negative)
  Interval box_f, box_g, box_out;
  int dim = 1;

  Interval sumset() const noexcept { return {box_f.lo + box_g.lo, box_f.hi + box_g.hi}; }
};

/// Builds the boxes for params p at frequency N. Throws InvalidArgument if
/// p does not satisfy the variant's condition, N < 16, a box touches the
/// origin, or box_out leaves the sumset.
IllposedCase make_illposed_case(IllposedVariant v, const SystemParams& p, double N);

/// Indicator Fourier data on the case boxes (crossed with [0, 1] in the
/// transverse direction when dim = 2), carried as quadrature rules.
struct IllposedData {
  IllposedCase cas;
  int quad_points = 64;

  /// ||1_box||_{H^s}: Gauss-Legendre of <xi>^{2s} over the (product) box.
  double hs_norm_f(double s) const;
  double hs_norm_g(double s) const;
};

IllposedData illposed_data(const IllposedCase& c, int quad_points = 64);

/// Time factor (1 - e^{-i t Phi}) / (i Phi), with the series t (1 - i t Phi / 2)
/// when |t Phi| < 1e-6.
std::complex<double> resonance_time_factor(double t, double phi) noexcept;

/// The w-slot of the second Picard iterate for the data, at time t:
///   A(xi) = i xi e^{-i t gamma |xi|^2} int 1_f(xi1) 1_g(xi - xi1) K_t(Phi) dxi1,
///   Phi = alpha |xi1|^2 - beta |xi - xi1|^2 - gamma |xi|^2.
class Picard2 {
 public:
  Picard2(const IllposedData& data, const SystemParams& p);

  /// Scalar part (without the i xi factor) at output frequency xi.
  std::complex<double> scalar_amplitude(std::span<const double> xi, double t) const;
  /// |A(xi)| = |xi| |scalar_amplitude|.
  double amplitude_abs(std::span<const double> xi, double t) const;
  /// (int <xi>^{2s} |A(xi)|^2 dxi)^{1/2} over the sumset, for each t.
  std::vector<double> hs_norm(double s, std::span<const double> times) const;

 private:
  IllposedData data_;
  SystemParams p_;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> samples;  ///< (log N, log R(N))
  bool inconclusive = false;                       ///< r^2 < 0.9
};

struct GrowthConfig {
  IllposedVariant variant = IllposedVariant::alpha_eq_gamma;
  double s = 0.5;
  std::vector<double> N_list{16, 32, 64, 128, 256, 512};
  std::vector<double> t_grid{0.0125, 0.025, 0.05, 0.1};
  int quad_points = 64;
};

/// R(N) = max_t ||A(t)||_{H^s} / (||f||_{H^s} ||g||_{H^s}) and the
/// least-squares slope of log R against log N.
FitResult growth_exponent(const GrowthConfig& cfg, const SystemParams& p);

/// Default t grid {T/8, T/4, T/2, T}.
std::vector<double> default_t_grid(double T = 0.1);

struct BilinearConfig {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double H = 8.0;
  double L = 2.0;
  int trials = 32;
  double T = 1.0;
  std::uint64_t seed = 1;

  /// Throws unless H, L are powers of two with L <= H / 4, trials >= 1,
  /// T > 0 and the sigmas are nonzero.
  void validate() const;
};

struct BilinearResult {
  double sup_ratio = 0.0;
  std::vector<double> ratios;  ///< one per trial
};

/// Exact time integral int_0^T |sum_p c_p e^{-i t w_p}|^2 dt.
double gram_time_integral(std::span<const std::complex<double>> c, std::span<const double> omega,
                          double T);

/// ||e^{i t s1 Lap} f1 . e^{i t s2 Lap} f2||_{L^2([0, T] x torus)} for
/// spectral f1, f2 (one component each, taken from component 0).
double free_product_norm(const SpectralField& f1, double sigma1, const SpectralField& f2,
                         double sigma2, double T);

/// Sup over trials of value / (bound ||P_H phi1|| ||P_L phi2||) with bound
/// H^{-1/2} (d = 1) or (L / H)^{1/2} (d = 2), phi random band-limited.
BilinearResult bilinear_ratio(const BilinearConfig& cfg, const TorusGrid& grid);

struct EquivarianceResult {
  double deviation = 0.0;
  /// |A_dt - A_{dt/2}| of the scale-then-evolve run, same norm.
  double richardson = 0.0;
};

/// Mode 0 in L2 plus all other modes in the homogeneous H^{s_c} weight.
double equivariance_norm(const StateTriple& a, const StateTriple& b, double s_c);

/// Compares evolve(scale(data), T) with scale(evolve(data, T / lambda^2)),
/// both with step dt.
EquivarianceResult scaling_equivariance(const SystemParams& p, const StateTriple& data,
                                        double lambda, double T, double dt, bool dealias = true);

}  // namespace qdnls
