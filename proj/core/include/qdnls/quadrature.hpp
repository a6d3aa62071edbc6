#pragma once

#include <span>
#include <vector>

namespace qdnls {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre
/// recurrence; results cached per n).
const QuadratureRule& gauss_legendre(int n);

/// The same rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Gauss-Legendre rule on [a, b] split at the given interior breakpoints,
/// n points per panel. Breakpoints outside (a, b) are ignored.
QuadratureRule gauss_legendre_panels(int n, double a, double b, std::span<const double> breaks);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs two distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace qdnls
