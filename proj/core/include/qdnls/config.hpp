#pragma once

// Run configuration: strict JSON in, validated RunConfig out, and a
// canonical serialization (sorted keys, shortest round-trip floats) that
// parses back to an equal RunConfig.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdnls/integrator.hpp"
#include "qdnls/resonance.hpp"

namespace qdnls {

enum class Command { simulate, resonance, illposed, bilinear, scatter, verify };

std::string_view to_string(Command c) noexcept;
std::optional<Command> parse_command(std::string_view s) noexcept;

struct GridSpec {
  int n = 256;
  double period = 0.0;  ///< 0 until resolved; parse fills the dimension default
  bool operator==(const GridSpec&) const = default;
};

struct SimulateSection {
  double amplitude = 0.1;
  double width = 2.0;
  std::array<double, 3> momentum{0.5, -0.3, 0.2};
  std::vector<double> snapshot_times;  ///< in (0, t_end]; t_end is always written
  bool shadow = true;                  ///< rerun at dt/2 for an error estimate
  bool operator==(const SimulateSection&) const = default;
};

struct ResonanceSection {
  bool scan = false;
  std::array<double, 3> sigma{1.0, 1.0, 1.0};
  std::string condition = "theta_positive";  ///< none | separated | theta_positive
  double ratio = 8.0;
  int extent = 32;
  double step = 0.25;
  bool operator==(const ResonanceSection&) const = default;
};

struct IllposedSection {
  std::string variant = "a";  ///< a | b | c or the long names
  double s = 0.5;
  double n_min = 16;
  double n_max = 512;
  double T = 0.1;
  int quad_points = 64;
  bool operator==(const IllposedSection&) const = default;
};

struct BilinearSection {
  double L = 2.0;
  std::vector<double> H_list{8, 16, 32, 64, 128, 256};
  int trials = 32;
  double T = 1.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  bool operator==(const BilinearSection&) const = default;
};

struct ScatterSection {
  std::vector<double> ladder{5, 10, 20, 40};
  double amplitude = 0.05;
  double width = 2.0;
  bool operator==(const ScatterSection&) const = default;
};

struct VerifySection {
  int samples = 2000;  ///< random draws per algebraic property
  bool operator==(const VerifySection&) const = default;
};

using ExperimentSection = std::variant<SimulateSection, ResonanceSection, IllposedSection,
                                       BilinearSection, ScatterSection, VerifySection>;

struct RunConfig {
  Command command = Command::simulate;
  SystemParams params;
  GridSpec grid;
  SolverConfig solver;
  ExperimentSection experiment;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool operator==(const RunConfig&) const = default;

  TorusGrid torus() const { return TorusGrid(params.dim(), grid.n, grid.period); }
};

/// Throws ConfigError naming the offending dotted path on unknown keys,
/// missing mandatory keys (command, params.*, and seed for randomized
/// commands), wrong types, or violated invariants.
RunConfig parse_config(std::string_view text);

/// Canonical JSON text of cfg; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical serialization with out_dir blanked, as 16
/// hex digits: the same computation hashes the same wherever it is written.
std::string config_fingerprint(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace qdnls
