#pragma once

// Time stepping for
//   u_t = i alpha Lap u + i (div w) v
//   v_t = i beta  Lap v + i (div conj w) u
//   w_t = i gamma Lap w - i grad(u . conj v)
// by integrating-factor RK4 with exact linear propagators, and the
// Duhamel / Picard formulation on a uniform time mesh.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdnls/diagnostics.hpp"
#include "qdnls/resonance.hpp"
#include "qdnls/spectral.hpp"

namespace qdnls {

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  int monitor_every = 10;

  /// Throws InvalidArgument on a nonpositive dt or t_end, dt > t_end or
  /// monitor_every < 1.
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct BlowUp {
  double t = 0.0;
  std::string reason;
  DiagnosticsRow last_finite;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
  std::optional<BlowUp> blow_up;

  const StateTriple& final_state() const { return snapshots.back().state; }
};

/// Threshold above which a field value counts as blow-up.
inline constexpr double kBlowUpMagnitude = 1e8;

/// Spectral 2/3-rule: keeps modes with 3 |k| < n on every axis.
bool dealias_keep(const TorusGrid& grid, std::size_t mode) noexcept;

/// Flat spectral state: u components, then v, then w, each n^d long.
using FlatState = std::vector<cplx>;
FlatState flatten(const StateTriple& s);
StateTriple unflatten(const TorusGrid& grid, std::span<const cplx> flat);

/// Evaluates the nonlinear right-hand sides
/// (i (div w) v, i (div conj w) u, -i grad(u . conj v)) in spectral form.
/// Holds scratch buffers, so one instance must not be shared across threads.
class Nonlinearity {
 public:
  Nonlinearity(const TorusGrid& grid, bool dealias);

  const TorusGrid& grid() const noexcept { return grid_; }
  bool dealias() const noexcept { return dealias_; }

  void apply(std::span<const cplx> state, std::span<cplx> out);

 private:
  TorusGrid grid_;
  bool dealias_;
  std::vector<double> mask_;
  std::vector<cplx> u_, v_, div_, prod_;
};

StateTriple nonlinearity(const StateTriple& s, bool dealias = true);

/// Lawson-type integrating-factor RK4. Each component is propagated by its
/// own coefficient through exp(-i h sigma |xi|^2).
class IfRk4Stepper {
 public:
  IfRk4Stepper(const SystemParams& p, const TorusGrid& grid, bool dealias);

  void step(FlatState& state, double h);
  StateTriple step(const StateTriple& s, double h);

 private:
  void prepare(double h);
  void propagate(std::span<cplx> x, const std::vector<cplx>& e) const;

  SystemParams params_;
  TorusGrid grid_;
  Nonlinearity nl_;
  double cached_h_ = 0.0;
  std::vector<cplx> e_full_, e_half_;  // per flat index
  FlatState k1_, k2_, k3_, k4_, tmp_;
};

StateTriple step_ifrk4(const StateTriple& s, const SystemParams& p, double dt, bool dealias = true);

/// Extra controls for evolve.
struct EvolveOptions {
  /// Times in (0, t_end] at which the state is stored; steps are shortened
  /// to land on each exactly. t = 0 and t_end are always stored.
  std::vector<double> checkpoints;
  /// Skip diagnostics rows entirely (pure time stepping).
  bool diagnostics = true;
};

/// Steps with dt, shortening the step before each checkpoint and t_end.
/// A non-finite value or |value| > kBlowUpMagnitude stops the run with a
/// BlowUp record; the states reached so far are kept.
Trajectory evolve(const StateTriple& data, const SystemParams& p, const SolverConfig& cfg,
                  const EvolveOptions& opts = {});

/// Final state after integrating from 0 to `t_target` (which may be
/// negative) with step magnitude |dt|. No diagnostics, no blow-up check.
StateTriple evolve_to(const StateTriple& data, const SystemParams& p, double dt, double t_target,
                      bool dealias = true);

/// Free solution exp(t L) data on a uniform mesh of `intervals` steps over [0, T].
std::vector<Snapshot> free_solution(const StateTriple& data, const SystemParams& p, double T,
                                    int intervals);

/// One application of the Duhamel map to a time-sampled iterate on a
/// uniform mesh over [0, T]: for each mesh time t,
///   exp(t L) [data + integral_0^t exp(-t' L) N(iterate(t')) dt'].
/// The integral is cumulative Simpson (3/8 on the last three intervals of
/// odd prefixes). Throws with fewer than 8 intervals.
std::vector<Snapshot> duhamel_apply(std::span<const Snapshot> iterate, const SystemParams& p,
                                    const StateTriple& data, double T, bool dealias = true);

struct PicardOptions {
  double T = 1.0;
  int intervals = 64;
  double tol = 1e-12;
  int max_iter = 30;
  bool dealias = true;
  /// Stop as soon as a difference exceeds the one before it.
  bool stop_on_expansion = true;
};

struct PicardReport {
  enum class Status { converged, max_iter_exceeded, expanding };
  Status status = Status::converged;
  int iterations = 0;
  /// Sup over mesh times of the H^{s_c} distance between successive iterates.
  std::vector<double> differences;
  /// differences[k + 1] / differences[k].
  std::vector<double> ratios;
};

std::string_view to_string(PicardReport::Status s) noexcept;

struct PicardResult {
  std::vector<Snapshot> solution;
  PicardReport report;
};

/// Iterates duhamel_apply starting from the free solution.
PicardResult picard_fixed_point(const StateTriple& data, const SystemParams& p,
                                const PicardOptions& opts);

}  // namespace qdnls
