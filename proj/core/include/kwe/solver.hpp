#pragma once

#include <span>
#include <vector>

#include "kwe/collision.hpp"
#include "kwe/diagnostics.hpp"
#include "kwe/phase_grid.hpp"

namespace kwe {

struct SolverConfig {
  double t_end = 1.0;
  double dt = 0.05;
  int snapshot_stride = 1;
  double picard_tol = 1e-12;
  int picard_max_iter = 60;
  /// Longest horizon accepted by picard_solve.
  double picard_horizon = 3.0;
  bool gain_only = false;
  WeightParams weights;
  double epsilon0_budget = 0.1;
  /// Relative boundary mass loss tolerated by run().
  double boundary_mass_budget = 1e-8;
  KernelOptions kernel;

  /// Throws ConfigError naming SolverConfig on invalid fields.
  void validate() const;
};

struct Trajectory {
  std::vector<DistributionField> snapshots;
  std::vector<NormReport> reports;
  double boundary_mass_lost = 0.0;

  [[nodiscard]] std::vector<double> times() const;
  [[nodiscard]] const DistributionField& back() const { return snapshots.back(); }
};

struct StepStats {
  double max_frequency = 0.0;
  double boundary_mass_lost = 0.0;
};

/// One Strang step S(dt/2) o midpoint(collision) o S(dt/2). A negative dt
/// integrates the same equation backwards in time. Throws InstabilityError
/// naming the time when a non-finite value appears.
[[nodiscard]] DistributionField step_strang(const DistributionField& f, double dt, const SphereQuadrature& q,
                                            bool gain_only = false, const KernelOptions& opt = {},
                                            StepStats* stats = nullptr);

/// Strang trajectory on [0, t_end] with snapshots every snapshot_stride steps.
[[nodiscard]] Trajectory run(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q);

/// Reversal trick: g(t) = f(-t) solves d_t g - v.grad g = -C[g]. The
/// snapshots are stamped with negative, decreasing times 0, -dt*stride, ...
[[nodiscard]] Trajectory run_backward(const DistributionField& f0, const SolverConfig& cfg,
                                      const SphereQuadrature& q);

/// Integrating-factor Duhamel formula on the snapshot grid `times`:
///   out_k = S(t_k - t_0) f0 . D_0k + sum_j w_j S(t_k - t_j) src_j . D_jk,
///   D_jk  = exp(-int_{t_j}^{t_k} S(t_k - s) rate(s) ds),
/// with composite trapezoid weights. Empty `rates` means D = 1.
[[nodiscard]] std::vector<DistributionField> duhamel_with_damping(const DistributionField& f0,
                                                                  std::span<const double> times,
                                                                  std::span<const DistributionField> sources,
                                                                  std::span<const DistributionField> rates = {});

struct PicardReport {
  bool converged = false;
  int iterations = 0;
  /// sup_t || <v>^M (f^{n+1} - f^n) ||_inf per iteration.
  std::vector<double> increments;
  /// increments[n+1] / increments[n].
  std::vector<double> ratios;
  /// Largest ratio among iterations whose increment is above the rounding floor.
  double contraction = 0.0;
};

struct PicardResult {
  Trajectory trajectory;
  PicardReport report;
};

/// Fixed-point iteration f <- S(t) f0 + int_0^t S(t-s) C[f](s) ds over whole
/// trajectories on a uniform grid of spacing cfg.dt. Throws
/// PropertyViolation after three consecutive ratios >= 1.
[[nodiscard]] PicardResult picard_solve(const DistributionField& f0, double T_loc, const SolverConfig& cfg,
                                        const SphereQuadrature& q);

struct GainOnlyResult {
  Trajectory trajectory;
  int iterations = 0;
  bool converged = false;
  /// Largest decrease between consecutive iterates (should be 0: the iteration is monotone).
  double max_monotonicity_violation = 0.0;
};

/// Positive iteration f_{n+1} = S(t) f0 + int S(t-s) G[f_n] ds starting at
/// S(t) f0, run until it stops changing or picard_max_iter is reached.
[[nodiscard]] GainOnlyResult gain_only_solve(const DistributionField& f0, const SolverConfig& cfg,
                                             const SphereQuadrature& q);

/// sup over snapshots of max |<v>^l (a_k - b_k)|.
[[nodiscard]] double trajectory_sup_difference(const Trajectory& a, const Trajectory& b, double weight_power);

/// Uniform time grid 0, dt, ..., t_end (t_end / dt must be an integer within 1e-9).
[[nodiscard]] std::vector<double> uniform_times(double t_end, double dt);

}  // namespace kwe
