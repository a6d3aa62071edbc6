#include "qdnls/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qdnls/errors.hpp"

namespace qdnls {

namespace {

bool nonzero_finite(double x) { return x != 0.0 && std::isfinite(x); }

double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }
double max_abs(double a, double b, double c) { return std::max(max_abs(a, b), std::abs(c)); }

// Scale of theta's three products; the zero test for theta is relative to it.
double theta_scale(const SystemParams& p) {
  const double a = p.alpha(), b = p.beta(), c = p.gamma();
  return max_abs(b * c, a * c, a * b);
}

bool alpha_eq_gamma(const SystemParams& p) {
  return near_zero(p.alpha() - p.gamma(), max_abs(p.alpha(), p.gamma()));
}
bool alpha_eq_beta(const SystemParams& p) {
  return near_zero(p.alpha() - p.beta(), max_abs(p.alpha(), p.beta()));
}
bool beta_eq_minus_gamma(const SystemParams& p) {
  return near_zero(p.beta() + p.gamma(), max_abs(p.beta(), p.gamma()));
}

int theta_sign(const SystemParams& p) {
  const double th = compute_theta(p);
  if (near_zero(th, theta_scale(p))) return 0;
  return th > 0 ? 1 : -1;
}

}  // namespace

SystemParams::SystemParams(double alpha, double beta, double gamma, int dim)
    : alpha_(alpha), beta_(beta), gamma_(gamma), dim_(dim) {
  if (!nonzero_finite(alpha)) throw InvalidArgument("alpha must be a nonzero real");
  if (!nonzero_finite(beta)) throw InvalidArgument("beta must be a nonzero real");
  if (!nonzero_finite(gamma)) throw InvalidArgument("gamma must be a nonzero real");
  if (dim != 1 && dim != 2) throw InvalidArgument("dimension must be 1 or 2");
}

SigmaTriple::SigmaTriple(double s1, double s2, double s3) : s1_(s1), s2_(s2), s3_(s3) {
  if (!nonzero_finite(s1) || !nonzero_finite(s2) || !nonzero_finite(s3))
    throw InvalidArgument("sigma coefficients must be nonzero reals");
}

double SigmaTriple::theta() const noexcept {
  return std::fma(s1_, s2_ + s3_, s2_ * s3_);
}

double compute_theta(const SystemParams& p) noexcept {
  return std::fma(-p.alpha(), p.beta() + p.gamma(), p.beta() * p.gamma());
}

double compute_kappa(const SystemParams& p) noexcept {
  return (p.alpha() - p.beta()) * (p.alpha() - p.gamma()) * (p.beta() + p.gamma());
}

bool near_zero(double value, double scale) noexcept {
  return std::abs(value) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(scale);
}

ResonanceReport compute_m_factors(const SystemParams& p) {
  ResonanceReport r;
  const double a = p.alpha(), b = p.beta(), c = p.gamma();
  r.theta = compute_theta(p);
  r.kappa = compute_kappa(p);
  r.acg_bc = (a - c) * (b + c);
  r.same_sign = (a > 0 && b > 0 && c > 0) || (a < 0 && b < 0 && c < 0);

  const int ts = theta_sign(p);
  if (alpha_eq_gamma(p)) {
    r.m_factor = -(b + c) / (2.0 * c);
  } else if (ts == 0) {
    r.m_factor = c / (a - c);
  } else if (ts < 0) {
    // Roots of (a - c) m^2 - 2 c m - (b + c); the smaller one from the
    // product avoids cancelling c against the square root.
    const double root = std::sqrt(-r.theta);
    const double q = c + std::copysign(root, c);
    const double big = q / (a - c), small = -(b + c) / q;
    r.m_plus = c >= 0 ? big : small;
    r.m_minus = c >= 0 ? small : big;
  }
  return r;
}

std::string_view to_string(TheoremLabel label) noexcept {
  switch (label) {
    case TheoremLabel::T1_1_i: return "T1.1(i)";
    case TheoremLabel::T1_1_ii: return "T1.1(ii)";
    case TheoremLabel::T1_4_i: return "T1.4(i)";
    case TheoremLabel::T1_4_ii: return "T1.4(ii)";
    case TheoremLabel::T1_4_iii: return "T1.4(iii)";
    case TheoremLabel::T1_5_i: return "T1.5(i)";
    case TheoremLabel::T1_5_ii: return "T1.5(ii)";
    case TheoremLabel::T1_6: return "T1.6";
  }
  return "?";
}

bool RegimeReport::contains(TheoremLabel label) const noexcept {
  return std::find(theorem_labels.begin(), theorem_labels.end(), label) != theorem_labels.end();
}

RegimeReport classify_regime(const SystemParams& p) {
  using K = SobolevThreshold::Kind;
  RegimeReport out;
  auto add = [&](TheoremLabel l, SobolevThreshold th) {
    out.theorem_labels.push_back(l);
    out.s_threshold[l] = th;
  };

  const ResonanceReport r = compute_m_factors(p);
  const int ts = theta_sign(p);
  const bool kappa_zero = alpha_eq_beta(p) || alpha_eq_gamma(p) || beta_eq_minus_gamma(p);
  const bool acg_bc_zero = alpha_eq_gamma(p) || beta_eq_minus_gamma(p);
  const double sc = p.critical_exponent();

  if (p.dim() == 2) {
    if (ts > 0) {
      add(TheoremLabel::T1_1_i, {sc, false, K::at_least, true});
      add(TheoremLabel::T1_1_ii, {sc, false, K::at_least, false});
    }
    if (ts > 0) {
      add(TheoremLabel::T1_4_ii, {sc, true, K::at_least, false});
    } else if (alpha_eq_beta(p)) {
      add(TheoremLabel::T1_4_ii, {1.0, true, K::at_least, false});
    } else if (!kappa_zero) {
      add(TheoremLabel::T1_4_ii, {1.0, false, K::at_least, false});
    }
    if (r.same_sign && !kappa_zero) add(TheoremLabel::T1_5_ii, {1.0, false, K::at_least, false});
  } else {
    if (ts > 0) {
      add(TheoremLabel::T1_4_iii, {0.0, false, K::at_least, false});
    } else if (ts == 0) {
      add(TheoremLabel::T1_4_iii, {1.0, false, K::at_least, false});
    } else if (!acg_bc_zero) {
      add(TheoremLabel::T1_4_iii, {0.5, false, K::at_least, false});
    }
    if (ts > 0) add(TheoremLabel::T1_5_i, {0.0, false, K::at_least, false});
    if (r.same_sign && !acg_bc_zero) add(TheoremLabel::T1_5_ii, {1.0, false, K::at_least, false});
  }

  if (acg_bc_zero) {
    add(TheoremLabel::T1_6, {std::numeric_limits<double>::infinity(), true, K::below, false});
  } else if (ts == 0) {
    add(TheoremLabel::T1_6, {1.0, true, K::below, false});
  } else if (ts < 0) {
    add(TheoremLabel::T1_6, {0.5, true, K::below, false});
  }
  return out;
}

double resonance_symbol(const SigmaTriple& s, std::span<const double> xi1,
                        std::span<const double> xi2) {
  if (xi1.size() != xi2.size() || xi1.empty())
    throw InvalidArgument("resonance_symbol: frequency dimension mismatch");
  double n1 = 0, n2 = 0, n3 = 0;
  for (std::size_t j = 0; j < xi1.size(); ++j) {
    const double x3 = -xi1[j] - xi2[j];
    n1 += xi1[j] * xi1[j];
    n2 += xi2[j] * xi2[j];
    n3 += x3 * x3;
  }
  return s.s1() * n1 + s.s2() * n2 + s.s3() * n3;
}

double modulation_scan(const SigmaTriple& s, ScanCondition condition, int grid_extent,
                       double grid_step, int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("modulation_scan: dim must be 1 or 2");
  if (!(grid_step > 0) || grid_extent <= 0)
    throw InvalidArgument("modulation_scan: extent and step must be positive");
  if (condition.kind == ScanCondition::Kind::separated && !(condition.ratio >= 4.0))
    throw InvalidArgument("modulation_scan: separation ratio must be at least 4");
  if (condition.kind == ScanCondition::Kind::theta_positive && !(s.theta() > 0))
    throw InvalidArgument("modulation_scan: theta_positive requires s2 s3 + s1 s3 + s1 s2 > 0");

  // The ratio is homogeneous of degree 0, so the scan runs on integer
  // lattice indices; the step only decides how many lattice points fit.
  const long K = static_cast<long>(std::floor(grid_extent / grid_step + 1e-9));
  if (K < 1) throw InvalidArgument("modulation_scan: no admissible frequencies");

  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  const double r2 = condition.ratio * condition.ratio;

  auto visit = [&](double n1, double n2, double n3) {
    const double big = std::max({n1, n2, n3});
    if (condition.kind == ScanCondition::Kind::separated) {
      const double small = std::min({n1, n2, n3});
      if (small * r2 > big) return;
    }
    any = true;
    const double sym = s.s1() * n1 + s.s2() * n2 + s.s3() * n3;
    best = std::min(best, std::abs(sym) / big);
  };

  if (dim == 1) {
    for (long a = -K; a <= K; ++a) {
      if (a == 0) continue;
      for (long b = -K; b <= K; ++b) {
        if (b == 0) continue;
        const long c = -a - b;
        visit(double(a * a), double(b * b), double(c * c));
      }
    }
  } else {
    for (long a0 = -K; a0 <= K; ++a0)
      for (long a1 = -K; a1 <= K; ++a1) {
        if (a0 == 0 && a1 == 0) continue;
        for (long b0 = -K; b0 <= K; ++b0)
          for (long b1 = -K; b1 <= K; ++b1) {
            if (b0 == 0 && b1 == 0) continue;
            const long c0 = -a0 - b0, c1 = -a1 - b1;
            visit(double(a0 * a0 + a1 * a1), double(b0 * b0 + b1 * b1),
                  double(c0 * c0 + c1 * c1));
          }
      }
  }
  if (!any) throw InvalidArgument("modulation_scan: admissible set is empty");
  return best;
}

std::string_view to_string(FactorizationCase c) noexcept {
  switch (c) {
    case FactorizationCase::alpha_eq_gamma: return "alpha_eq_gamma";
    case FactorizationCase::theta_zero: return "theta_zero";
    case FactorizationCase::theta_negative: return "theta_negative";
    case FactorizationCase::one_d_sum_zero: return "one_d_sum_zero";
  }
  return "?";
}

double factorization_check(const SystemParams& p, FactorizationCase c, int trials,
                           std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("factorization_check: trials must be positive");
  const ResonanceReport r = compute_m_factors(p);
  const double a = p.alpha(), b = p.beta(), g = p.gamma();
  switch (c) {
    case FactorizationCase::alpha_eq_gamma:
      if (!alpha_eq_gamma(p)) throw InvalidArgument("factorization_check: alpha != gamma");
      break;
    case FactorizationCase::theta_zero:
      if (theta_sign(p) != 0 || alpha_eq_gamma(p))
        throw InvalidArgument("factorization_check: theta != 0 or alpha == gamma");
      break;
    case FactorizationCase::theta_negative:
      if (!r.m_plus) throw InvalidArgument("factorization_check: needs theta < 0, alpha != gamma");
      break;
    case FactorizationCase::one_d_sum_zero:
      throw InvalidArgument("factorization_check: one_d_sum_zero takes a SigmaTriple");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  const int d = p.dim();
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    double xi[2], x1[2], eta[2];
    for (int j = 0; j < d; ++j) {
      xi[j] = U(rng);
      x1[j] = U(rng);
      eta[j] = xi[j] - x1[j];
    }
    double n1 = 0, ne = 0, nx = 0;
    for (int j = 0; j < d; ++j) {
      n1 += x1[j] * x1[j];
      ne += eta[j] * eta[j];
      nx += xi[j] * xi[j];
    }
    const double lhs = a * n1 - b * ne - g * nx;
    double rhs = 0.0;
    if (c == FactorizationCase::alpha_eq_gamma) {
      const double M = *r.m_factor;
      for (int j = 0; j < d; ++j) rhs += (x1[j] - M * eta[j]) * eta[j];
      rhs *= -2.0 * g;
    } else if (c == FactorizationCase::theta_zero) {
      const double M = *r.m_factor;
      for (int j = 0; j < d; ++j) rhs += (x1[j] - M * eta[j]) * (x1[j] - M * eta[j]);
      rhs *= (a - g);
    } else {
      const double Mp = *r.m_plus, Mm = *r.m_minus;
      for (int j = 0; j < d; ++j) rhs += (x1[j] - Mp * eta[j]) * (x1[j] - Mm * eta[j]);
      rhs *= (a - g);
    }
    const double scale = std::abs(a) * n1 + std::abs(b) * ne + std::abs(g) * nx;
    if (scale > 0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double factorization_check(const SigmaTriple& s, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("factorization_check: trials must be positive");
  if (!near_zero(s.s1() + s.s2(), max_abs(s.s1(), s.s2())))
    throw InvalidArgument("factorization_check: one_d_sum_zero needs s1 + s2 = 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-10.0, 10.0);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const double x1 = U(rng), x2 = U(rng), x3 = -x1 - x2;
    const double lhs = std::abs(s.s1() * x1 * x1 + s.s2() * x2 * x2 + s.s3() * x3 * x3);
    const double f1 = std::abs(x3) * std::abs((s.s1() + s.s3()) * x3 + 2.0 * s.s1() * x2);
    const double f2 = std::abs(x3) * std::abs((s.s2() + s.s3()) * x3 + 2.0 * s.s2() * x1);
    const double scale = std::abs(s.s1()) * x1 * x1 + std::abs(s.s2()) * x2 * x2 +
                         std::abs(s.s3()) * x3 * x3;
    if (scale > 0)
      worst = std::max({worst, std::abs(lhs - f1) / scale, std::abs(lhs - f2) / scale});
  }
  return worst;
}

SystemParams theta_zero_params(double alpha, double gamma, int dim) {
  if (alpha == gamma) throw InvalidArgument("theta_zero_params: alpha must differ from gamma");
  const long double a = alpha, g = gamma;
  const long double b = a * g / (g - a);
  return SystemParams(alpha, static_cast<double>(b), gamma, dim);
}

}  // namespace qdnls
