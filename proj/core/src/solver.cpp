#include "kwe/solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kwe/errors.hpp"
#include "kwe/transport.hpp"

namespace kwe {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver.dt: SolverConfig requires dt > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("solver.t_end: SolverConfig requires t_end >= 0");
  if (!(picard_tol > 0.0)) throw ConfigError("solver.picard_tol: SolverConfig requires picard_tol > 0");
  if (snapshot_stride < 1) throw ConfigError("solver.snapshot_stride: SolverConfig requires snapshot_stride >= 1");
  if (picard_max_iter < 1) throw ConfigError("solver.picard_max_iter: SolverConfig requires picard_max_iter >= 1");
  if (!(epsilon0_budget > 0.0)) throw ConfigError("solver.epsilon0_budget: SolverConfig requires a positive budget");
  weights.validate();
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.time);
  return t;
}

std::vector<double> uniform_times(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("uniform_times: dt must be positive");
  const double steps = t_end / dt;
  const long n = std::lround(steps);
  if (std::abs(steps - n) > 1e-9 * std::max(1.0, steps))
    throw ConfigError("solver.t_end: must be an integer multiple of the time step");
  std::vector<double> t(n + 1);
  for (long k = 0; k <= n; ++k) t[k] = k * dt;
  t[n] = t_end;
  return t;
}

namespace {

double total(const DistributionField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_measure();
}

void require_finite(const DistributionField& f, double t) {
  if (!f.all_finite()) {
    std::ostringstream os;
    os << "non-finite value after step ending at t=" << t;
    throw InstabilityError(os.str(), t);
  }
}

double max_of(const DistributionField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, x);
  return m;
}

double weighted_sup_diff(const DistributionField& a, const DistributionField& b, const std::vector<double>& w) {
  const std::size_t nv = w.size();
  const auto va = a.values(), vb = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, w[i % nv] * std::abs(va[i] - vb[i]));
  return m;
}

// Snapshot spacing shared by the Duhamel-based solvers.
double duhamel_spacing(const SolverConfig& cfg) { return cfg.dt * cfg.snapshot_stride; }

}  // namespace

DistributionField step_strang(const DistributionField& f, double dt, const SphereQuadrature& q, bool gain_only,
                              const KernelOptions& opt, StepStats* stats) {
  const double t_end = f.time + dt;
  DistributionField f1 = apply_transport(f, 0.5 * dt);
  double lost = transport_boundary_loss(f, f1);

  DistributionField k1(f1.grid_handle(), f1.time);
  double max_r = 0.0;
  if (gain_only) {
    k1 = gain_full(f1, q, opt);
    if (stats) max_r = max_of(frequency_full(f1, q, opt));
  } else {
    FieldCollision c = collision_split(f1, q, opt);
    max_r = max_of(c.frequency);
    k1 = std::move(c.gain);
    k1.axpy(-1.0, c.loss);
  }
  DistributionField mid = f1;
  mid.axpy(0.5 * dt, k1);
  require_finite(mid, t_end);
  const DistributionField k2 = gain_only ? gain_full(mid, q, opt) : collision_full(mid, q, opt);
  DistributionField f2 = f1;
  f2.axpy(dt, k2);
  require_finite(f2, t_end);

  DistributionField out = apply_transport(f2, 0.5 * dt);
  lost += transport_boundary_loss(f2, out);
  out.time = t_end;
  out.nonneg_asserted = false;
  if (stats) {
    stats->max_frequency = max_r;
    stats->boundary_mass_lost = lost;
  }
  return out;
}

namespace {

Trajectory integrate(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q, double sign) {
  cfg.validate();
  f0.check_finite();
  const std::vector<double> grid_t = uniform_times(cfg.t_end, cfg.dt);
  const std::size_t steps = grid_t.size() - 1;

  Trajectory traj;
  traj.snapshots.push_back(f0);
  traj.reports.push_back(report(f0, cfg.weights, 0.0));
  const double mass0 = std::abs(total(f0));

  DistributionField f = f0;
  bool warned = false;
  for (std::size_t k = 1; k <= steps; ++k) {
    StepStats st;
    const double h = grid_t[k] - grid_t[k - 1];
    f = step_strang(f, sign * h, q, cfg.gain_only, cfg.kernel, &st);
    f.time = sign * grid_t[k];
    traj.boundary_mass_lost += st.boundary_mass_lost;
    if (!warned && h * st.max_frequency > 0.1) {
      spdlog::warn("dt * max R = {:.3g} exceeds 0.1 at t = {:.6g}", h * st.max_frequency, f.time);
      warned = true;
    }
    if (mass0 > 0.0 && std::abs(traj.boundary_mass_lost) > cfg.boundary_mass_budget * mass0) {
      std::ostringstream os;
      os << "boundary mass budget exceeded at t=" << f.time << " (lost " << traj.boundary_mass_lost << " of "
         << mass0 << ")";
      throw InstabilityError(os.str(), f.time);
    }
    if (k % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || k == steps) {
      traj.snapshots.push_back(f);
      traj.reports.push_back(report(f, cfg.weights, traj.boundary_mass_lost));
    }
  }
  return traj;
}

}  // namespace

Trajectory run(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q) {
  return integrate(f0, cfg, q, 1.0);
}

Trajectory run_backward(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q) {
  return integrate(f0, cfg, q, -1.0);
}

std::vector<DistributionField> duhamel_with_damping(const DistributionField& f0, std::span<const double> times,
                                                    std::span<const DistributionField> sources,
                                                    std::span<const DistributionField> rates) {
  const std::size_t K = times.size();
  if (sources.size() != K) throw DomainError("duhamel_with_damping: one source per time is required");
  if (!rates.empty() && rates.size() != K) throw DomainError("duhamel_with_damping: one rate per time is required");
  const bool damped = !rates.empty();
  const std::size_t n = f0.values().size();

  std::vector<DistributionField> out;
  out.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double tk = times[k];
    // integral of the transported rate from t_j to t_k, j = k, k-1, ..., 0
    std::vector<double> E(n, 0.0);
    DistributionField acc = apply_transport(f0, tk - times[0]);
    DistributionField A_next;
    if (damped) A_next = apply_transport(rates[k], 0.0);

    std::vector<double> sum(n, 0.0);
    for (std::size_t jj = k + 1; jj-- > 0;) {
      const std::size_t j = jj;
      if (damped && j < k) {
        const DistributionField A = apply_transport(rates[j], tk - times[j]);
        const double half = 0.5 * (times[j + 1] - times[j]);
        const std::span<const double> a = A.values(), b = A_next.values();
        for (std::size_t i = 0; i < n; ++i) E[i] += half * (a[i] + b[i]);
        A_next = A;
      }
      if (k == 0) break;
      double w;
      if (j == 0)
        w = 0.5 * (times[1] - times[0]);
      else if (j == k)
        w = 0.5 * (times[k] - times[k - 1]);
      else
        w = 0.5 * (times[j + 1] - times[j - 1]);
      const DistributionField S = apply_transport(sources[j], tk - times[j]);
      const auto s = S.values();
      if (damped) {
        for (std::size_t i = 0; i < n; ++i) sum[i] += w * s[i] * std::exp(-E[i]);
      } else {
        for (std::size_t i = 0; i < n; ++i) sum[i] += w * s[i];
      }
    }
    auto a = acc.values();
    if (damped) {
      for (std::size_t i = 0; i < n; ++i) a[i] = a[i] * std::exp(-E[i]) + sum[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) a[i] += sum[i];
    }
    acc.time = tk;
    acc.nonneg_asserted = false;
    out.push_back(std::move(acc));
  }
  return out;
}

PicardResult picard_solve(const DistributionField& f0, double T_loc, const SolverConfig& cfg,
                          const SphereQuadrature& q) {
  cfg.validate();
  f0.check_finite();
  if (T_loc > cfg.picard_horizon) throw DomainError("picard_solve: T_loc exceeds the configured horizon");
  const std::vector<double> times = uniform_times(T_loc, duhamel_spacing(cfg));
  const std::vector<double> w = velocity_weights(f0.grid().v, cfg.weights.M);

  std::vector<DistributionField> cur;
  for (double t : times) cur.push_back(apply_transport(f0, t));
  double scale = 0.0;
  {
    const DistributionField z(f0.grid_handle());
    scale = weighted_sup_diff(f0, z, w);
  }
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

  PicardResult res;
  int bad = 0;
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    std::vector<DistributionField> src;
    src.reserve(cur.size());
    for (const auto& f : cur) src.push_back(cfg.gain_only ? gain_full(f, q, cfg.kernel) : collision_full(f, q, cfg.kernel));
    std::vector<DistributionField> next = duhamel_with_damping(f0, times, src);
    double delta = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      require_finite(next[k], times[k]);
      delta = std::max(delta, weighted_sup_diff(next[k], cur[k], w));
    }
    auto& rep = res.report;
    if (!rep.increments.empty()) {
      const double prev = rep.increments.back();
      const double ratio = prev > 0.0 ? delta / prev : 0.0;
      rep.ratios.push_back(ratio);
      if (prev > floor) {
        rep.contraction = std::max(rep.contraction, ratio);
        bad = ratio >= 1.0 ? bad + 1 : 0;
        if (bad >= 3) {
          std::ostringstream os;
          os << "picard_solve: no contraction for 3 consecutive iterations (last ratio " << ratio
             << ", increment " << delta << ", ||<v>^M f0||_inf " << scale << ")";
          throw PropertyViolation(os.str());
        }
      }
    }
    rep.increments.push_back(delta);
    rep.iterations = it;
    cur = std::move(next);
    if (delta < cfg.picard_tol) {
      rep.converged = true;
      break;
    }
  }
  res.trajectory.snapshots = std::move(cur);
  for (const auto& s : res.trajectory.snapshots) res.trajectory.reports.push_back(report(s, cfg.weights));
  res.trajectory.snapshots.front() = f0;
  res.trajectory.reports.front() = report(f0, cfg.weights);
  return res;
}

GainOnlyResult gain_only_solve(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q) {
  cfg.validate();
  f0.check_finite();
  if (f0.min_value() < 0.0) throw DomainError("gain_only_solve: initial data must be nonnegative");
  const std::vector<double> times = uniform_times(cfg.t_end, duhamel_spacing(cfg));
  const std::vector<double> w = velocity_weights(f0.grid().v, cfg.weights.M);

  std::vector<DistributionField> cur;
  for (double t : times) cur.push_back(apply_transport(f0, t));

  GainOnlyResult res;
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    std::vector<DistributionField> src;
    src.reserve(cur.size());
    for (const auto& f : cur) src.push_back(gain_full(f, q, cfg.kernel));
    std::vector<DistributionField> next = duhamel_with_damping(f0, times, src);
    double delta = 0.0;
    bool same = true;
    for (std::size_t k = 0; k < next.size(); ++k) {
      require_finite(next[k], times[k]);
      const auto a = next[k].values(), b = cur[k].values();
      for (std::size_t i = 0; i < a.size(); ++i) {
        res.max_monotonicity_violation = std::max(res.max_monotonicity_violation, b[i] - a[i]);
        if (a[i] != b[i]) same = false;
      }
      delta = std::max(delta, weighted_sup_diff(next[k], cur[k], w));
    }
    cur = std::move(next);
    res.iterations = it;
    if (same || delta < cfg.picard_tol) {
      res.converged = true;
      break;
    }
  }
  const double scale = std::max(f0.max_abs(), std::numeric_limits<double>::min());
  for (auto& s : cur) {
    if (s.min_value() < -1e-14 * scale) {
      std::ostringstream os;
      os << "gain_only_solve: negative value " << s.min_value() << " at t=" << s.time;
      throw PropertyViolation(os.str());
    }
    s.nonneg_asserted = true;
  }
  res.trajectory.snapshots = std::move(cur);
  res.trajectory.snapshots.front() = f0;
  res.trajectory.snapshots.front().nonneg_asserted = true;
  for (const auto& s : res.trajectory.snapshots) res.trajectory.reports.push_back(report(s, cfg.weights));
  return res;
}

double trajectory_sup_difference(const Trajectory& a, const Trajectory& b, double weight_power) {
  if (a.snapshots.size() != b.snapshots.size())
    throw DomainError("trajectory_sup_difference: snapshot counts differ");
  if (a.snapshots.empty()) return 0.0;
  const std::vector<double> w = velocity_weights(a.snapshots.front().grid().v, weight_power);
  double m = 0.0;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (std::abs(a.snapshots[k].time - b.snapshots[k].time) > 1e-9 * std::max(1.0, std::abs(a.snapshots[k].time)))
      throw DomainError("trajectory_sup_difference: snapshot times differ");
    m = std::max(m, weighted_sup_diff(a.snapshots[k], b.snapshots[k], w));
  }
  return m;
}

}  // namespace kwe
