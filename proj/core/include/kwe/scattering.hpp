#pragma once

#include <vector>

#include "kwe/solver.hpp"

namespace kwe {

struct ScatterOptions {
  /// Tail ladder uses snapshot times t1 with ladder_t_min <= |t1| <= ladder_fraction * |t_end|.
  double ladder_t_min = 1.0;
  double ladder_fraction = 0.25;
};

struct TailReport {
  std::vector<double> t1;
  /// || int_{t1}^{t_end} S(-s) C[f](s) ds ||_{L1}
  std::vector<double> tail_l1;
  /// Same tail in <v>^M L^inf (optional diagnostic; empty weights skip it).
  std::vector<double> tail_linfM;
  double slope = 0.0;
  double residual = 0.0;
  bool fitted = false;
  /// || f(t_end) - S(t_end) f_inf ||_{L1} and that distance times |t_end|^{1/2}.
  double scattering_distance = 0.0;
  double distance_constant = 0.0;
};

struct ScatteringState {
  DistributionField f_inf;
  TailReport tail;
};

/// f_{+inf} = f0 + int_0^{t_end} S(-s) C[f](s) ds by the trapezoid rule on
/// the snapshot times. A trajectory with negative times (from run_backward)
/// yields f_{-inf} = f0 - int_{t_end}^0 S(-s) C[f](s) ds.
[[nodiscard]] ScatteringState extract_scattering_state(const Trajectory& traj, const SphereQuadrature& q,
                                                       const WeightParams& w = {}, const ScatterOptions& opt = {},
                                                       const KernelOptions& kopt = {});

/// Mirror of the forward extraction for a run_backward trajectory.
[[nodiscard]] ScatteringState extract_scattering_state_backward(const Trajectory& traj, const SphereQuadrature& q,
                                                                const WeightParams& w = {},
                                                                const ScatterOptions& opt = {},
                                                                const KernelOptions& kopt = {});

struct FinalStateResult {
  DistributionField f0;
  Trajectory trajectory;
  PicardReport report;
  /// Estimate of the neglected || int_{t_max}^inf S(-s) C ds ||_{L1}, taking
  /// ||C(s)||_{L1} ~ s^{-3/2} beyond t_max.
  double tail_bound = 0.0;
};

/// Fixed point f(t) = S(t) f_inf - int_t^{t_max} S(t - s) C[f](s) ds on a
/// uniform grid of spacing dt * snapshot_stride. Throws PropertyViolation
/// after three consecutive ratios >= 1.
[[nodiscard]] FinalStateResult solve_final_state(const DistributionField& f_plus_inf, double t_max,
                                                 const SolverConfig& cfg, const SphereQuadrature& q);

struct LipschitzProbe {
  double ratio = 0.0;
  double data_distance = 0.0;
  double state_distance = 0.0;
  /// max over snapshots of ||f(t) - g(t)||_{L1} / ||f0 - g0||_{L1}.
  double flow_ratio = 0.0;
};

/// ||U+ f0 - U+ g0||_{L1} / ||f0 - g0||_{L1} from two forward runs.
[[nodiscard]] LipschitzProbe wave_operator_lipschitz_probe(const DistributionField& f0, const DistributionField& g0,
                                                           const SolverConfig& cfg, const SphereQuadrature& q,
                                                           const ScatterOptions& opt = {});

/// Same probe reusing an existing forward trajectory of f0.
[[nodiscard]] LipschitzProbe wave_operator_lipschitz_probe(const Trajectory& f_traj, const ScatteringState& f_state,
                                                           const DistributionField& g0, const SolverConfig& cfg,
                                                           const SphereQuadrature& q, const ScatterOptions& opt = {});

/// (P f)(x, v) = f(-x, -v).
[[nodiscard]] DistributionField parity_image(const DistributionField& f);

[[nodiscard]] double l1_distance(const DistributionField& a, const DistributionField& b);
[[nodiscard]] double l1_norm(const DistributionField& f);

}  // namespace kwe
