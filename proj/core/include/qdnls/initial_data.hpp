#pragma once

#include <array>
#include <cstdint>

#include "qdnls/spectral.hpp"

namespace qdnls {

/// Gaussian wave packets centred in the box. Field f (u, v, w) gets
/// amplitude * exp(-|x - c|^2 / (2 width^2)) * exp(i momentum[f] * sum_j x_j),
/// identical on every vector component apart from a phase e^{i j pi / 4}.
struct GaussianRecipe {
  double amplitude = 0.1;
  double width = 2.0;
  std::array<double, 3> momentum{0.5, -0.3, 0.2};
  /// Remove the mode-0 coefficient of every component afterwards.
  bool zero_mean = false;
};

StateTriple gaussian_state(const TorusGrid& grid, const GaussianRecipe& recipe = {});

/// A random smooth localized state: each field is a Gaussian bump with
/// random centre, width in [0.5, 3], amplitude in [0.01, 1], momentum in
/// [-2, 2] and phase. Deterministic in seed.
StateTriple random_bump_state(const TorusGrid& grid, std::uint64_t seed);

/// Multiplies every component of every field by `factor`.
StateTriple scaled(const StateTriple& s, double factor);

/// splitmix64 step, for deriving independent seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace qdnls
