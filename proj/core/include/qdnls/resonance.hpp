#pragma once

// Closed-form algebra of the dispersion coefficients (alpha, beta, gamma):
// the resonance discriminants theta and kappa, the degenerate-case factors
// M and M+/-, theorem applicability, and the three-wave resonance symbol.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdnls {

/// Dispersion coefficients of (u, v, w) and the spatial dimension.
class SystemParams {
 public:
  /// The reference system (-1, 1, 1) in one dimension.
  SystemParams() = default;
  /// Throws InvalidArgument unless every coefficient is nonzero and finite
  /// and dim is 1 or 2.
  SystemParams(double alpha, double beta, double gamma, int dim);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  int dim() const noexcept { return dim_; }

  /// Scaling-critical Sobolev exponent d/2 - 1.
  double critical_exponent() const noexcept { return dim_ / 2.0 - 1.0; }

  bool operator==(const SystemParams&) const = default;

 private:
  double alpha_ = -1.0;
  double beta_ = 1.0;
  double gamma_ = 1.0;
  int dim_ = 1;
};

/// Generic nonzero coefficients of a three-wave interaction.
class SigmaTriple {
 public:
  SigmaTriple(double s1, double s2, double s3);

  double s1() const noexcept { return s1_; }
  double s2() const noexcept { return s2_; }
  double s3() const noexcept { return s3_; }
  double operator[](int j) const noexcept { return j == 0 ? s1_ : (j == 1 ? s2_ : s3_); }

  /// s1 s2 s3 (1/s1 + 1/s2 + 1/s3), evaluated as s2 s3 + s1 s3 + s1 s2.
  double theta() const noexcept;

  bool operator==(const SigmaTriple&) const = default;

 private:
  double s1_, s2_, s3_;
};

/// alpha beta gamma (1/alpha - 1/beta - 1/gamma), evaluated without
/// divisions as beta gamma - alpha (beta + gamma).
double compute_theta(const SystemParams& p) noexcept;

/// (alpha - beta)(alpha - gamma)(beta + gamma).
double compute_kappa(const SystemParams& p) noexcept;

/// True when |value| is below a few hundred ulps of `scale`. Used for the
/// exact-equality branches (theta = 0, alpha = gamma, ...) of the regime
/// logic so that parameters solved in extended precision still classify.
bool near_zero(double value, double scale) noexcept;

struct ResonanceReport {
  double theta = 0.0;
  double kappa = 0.0;
  double acg_bc = 0.0;  ///< (alpha - gamma)(beta + gamma)
  bool same_sign = false;
  std::optional<double> m_factor;  ///< M of the alpha = gamma or theta = 0 case
  std::optional<double> m_plus;    ///< present iff theta < 0 and alpha != gamma
  std::optional<double> m_minus;
};

ResonanceReport compute_m_factors(const SystemParams& p);

enum class TheoremLabel {
  T1_1_i,
  T1_1_ii,
  T1_4_i,
  T1_4_ii,
  T1_4_iii,
  T1_5_i,
  T1_5_ii,
  T1_6,
};

std::string_view to_string(TheoremLabel label) noexcept;

/// Sobolev exponent attached to a theorem. `at_least` thresholds are the
/// minimal admissible s of a well-posedness statement; `below` thresholds
/// bound the s for which the flow map fails to be C^2 (value may be +inf).
struct SobolevThreshold {
  enum class Kind { at_least, below };
  double value = 0.0;
  bool strict = false;
  Kind kind = Kind::at_least;
  bool homogeneous = false;

  bool operator==(const SobolevThreshold&) const = default;
};

struct RegimeReport {
  std::vector<TheoremLabel> theorem_labels;
  std::map<TheoremLabel, SobolevThreshold> s_threshold;

  bool contains(TheoremLabel label) const noexcept;
};

/// Every theorem whose hypotheses hold for p; ties are all reported.
RegimeReport classify_regime(const SystemParams& p);

/// s1|xi1|^2 + s2|xi2|^2 + s3|xi3|^2 with xi3 = -xi1 - xi2.
double resonance_symbol(const SigmaTriple& s, std::span<const double> xi1,
                        std::span<const double> xi2);

struct ScanCondition {
  enum class Kind { none, separated, theta_positive };
  Kind kind = Kind::none;
  double ratio = 0.0;  ///< for separated: some |xi_i| <= |xi_j| / ratio

  static ScanCondition none() { return {}; }
  static ScanCondition separated(double ratio) { return {Kind::separated, ratio}; }
  static ScanCondition theta_positive() { return {Kind::theta_positive, 0.0}; }
};

/// Minimum of |resonance_symbol| / max_j |xi_j|^2 over all frequency pairs
/// xi1, xi2 in ([-E, E]^dim \ {0}) on a lattice of spacing `step` that
/// satisfy `condition`. The modulation variables are eliminated exactly:
/// the best choice of tau's summing to zero makes the largest modulation
/// equal to |symbol| / 3.
double modulation_scan(const SigmaTriple& s, ScanCondition condition, int grid_extent,
                       double grid_step, int dim = 1);

enum class FactorizationCase { alpha_eq_gamma, theta_zero, theta_negative, one_d_sum_zero };

std::string_view to_string(FactorizationCase c) noexcept;

/// Max relative residual between alpha|xi1|^2 - beta|xi-xi1|^2 - gamma|xi|^2
/// and the case's factored form over `trials` random (xi, xi1) in
/// [-10, 10]^dim. Residuals are relative to the sum of the magnitudes of the
/// three quadratic terms. Throws InvalidArgument if the case condition
/// does not hold for p.
double factorization_check(const SystemParams& p, FactorizationCase c, int trials,
                           std::uint64_t seed);

/// The one-dimensional identity for s1 + s2 = 0:
/// |s1 xi1^2 + s2 xi2^2 + s3 xi3^2| = |xi3| |(s1 + s3) xi3 + 2 s1 xi2|
///                                  = |xi3| |(s2 + s3) xi3 + 2 s2 xi1|.
double factorization_check(const SigmaTriple& s, int trials, std::uint64_t seed);

/// Parameters with theta = 0 exactly up to rounding: beta solves
/// beta gamma = alpha gamma + alpha beta in extended precision.
SystemParams theta_zero_params(double alpha, double gamma, int dim);

}  // namespace qdnls
