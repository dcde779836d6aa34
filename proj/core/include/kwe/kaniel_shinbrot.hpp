#pragma once

#include <vector>

#include "kwe/solver.hpp"

namespace kwe {

struct KSOptions {
  /// Allowed |u_1 - u_0| relative to max f0 (the two agree only up to the
  /// tolerance of the gain-only solve).
  double u1_u0_tolerance = 1e-10;
  /// Nesting violations (relative to max f0) above this are faults.
  double nesting_tolerance = 1e-12;
  /// Stop once the L1 gap at t_end falls below gap_tolerance * ||f0||_L1.
  double gap_tolerance = 1e-6;
  int max_iterations = 20;
};

struct KSState {
  Trajectory lower;
  Trajectory upper;
  int n = 0;
  /// ||u_k - l_k||_{L1} at t_end for k = 0..n.
  std::vector<double> gap_history;
  /// Largest nesting violation recorded at each iterate (relative to max f0).
  std::vector<double> nesting_violation;
  /// |u_1 - u_0| / max f0 after initialization.
  double u1_u0_discrepancy = 0.0;
};

/// l_0 = 0, u_0 = gain-only solution; checks 0 <= l_0 <= l_1 <= u_1 <= u_0
/// after one iterate and returns the state at n = 1.
[[nodiscard]] KSState ks_initialize(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q,
                                    const KSOptions& opt = {});

/// One update of both iterates along characteristics:
///   l_{n+1} = S(t) f0 D_u(0,t) + int S(t-s) G[l_n](s) D_u(s,t) ds,
///   u_{n+1} = S(t) f0 D_l(0,t) + int S(t-s) G[u_n](s) D_l(s,t) ds,
/// with D_g the damping built from R[g_n, g_n].
[[nodiscard]] KSState ks_iterate(const KSState& state, const SolverConfig& cfg, const SphereQuadrature& q,
                                 const KSOptions& opt = {});

struct KSCertificate {
  bool converged = false;
  double final_gap = 0.0;
  double gap_ratio = 0.0;  ///< geometric mean of consecutive gap ratios
  double max_nesting_violation = 0.0;
  double final_min_value = 0.0;
  /// max over snapshots of the amount by which f_strang leaves [l, u], relative to max f0.
  double sandwich_violation = 0.0;
  /// ||(l + u)/2 - f_strang||_L1 / ||f_strang||_L1 at t_end.
  double strang_l1_relative = 0.0;
};

struct KSResult {
  KSState state;
  KSCertificate certificate;
};

/// Iterates to convergence and compares with the Strang trajectory for the same data.
[[nodiscard]] KSResult ks_converge(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q,
                                   const KSOptions& opt = {});

}  // namespace kwe
