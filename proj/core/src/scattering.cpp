#include "kwe/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kwe/errors.hpp"
#include "kwe/regression.hpp"
#include "kwe/transport.hpp"

namespace kwe {

namespace {

void check_coverage(const Trajectory& traj, double sign) {
  const auto& s = traj.snapshots;
  if (s.empty()) throw DomainError("extract_scattering_state: empty trajectory");
  if (s.front().time != 0.0) throw DomainError("extract_scattering_state: trajectory does not start at t = 0");
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(sign * (s[k].time - s[k - 1].time) > 0.0)) {
      std::ostringstream os;
      os << "extract_scattering_state: snapshot times not monotone at t=" << s[k].time;
      throw DomainError(os.str());
    }
    if (!same_grid(s[k], s.front())) throw DomainError("extract_scattering_state: snapshot grids differ");
  }
}

double sup_weighted(const DistributionField& f, const std::vector<double>& w) {
  const std::size_t nv = w.size();
  const auto v = f.values();
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, w[i % nv] * std::abs(v[i]));
  return m;
}

ScatteringState extract(const Trajectory& traj, const SphereQuadrature& q, const WeightParams& w,
                        const ScatterOptions& opt, const KernelOptions& kopt, double sign) {
  check_coverage(traj, sign);
  const auto& snaps = traj.snapshots;
  const std::size_t K = snaps.size();
  const DistributionField& f0 = snaps.front();
  const std::vector<double> wM = velocity_weights(f0.grid().v, w.M);

  std::vector<DistributionField> pulled;
  pulled.reserve(K);
  for (const auto& f : snaps) pulled.push_back(apply_transport(collision_full(f, q, kopt), -f.time));

  // tails[k] = int_{t_k}^{t_end} S(-s) C ds, accumulated from the end
  std::vector<DistributionField> tails(K, DistributionField(f0.grid_handle()));
  for (std::size_t k = K - 1; k-- > 0;) {
    tails[k] = tails[k + 1];
    tails[k].axpy(0.5 * std::abs(snaps[k + 1].time - snaps[k].time), pulled[k]);
    tails[k].axpy(0.5 * std::abs(snaps[k + 1].time - snaps[k].time), pulled[k + 1]);
  }

  ScatteringState out;
  out.f_inf = f0;
  out.f_inf.axpy(sign, tails.front());
  out.f_inf.time = 0.0;
  out.f_inf.nonneg_asserted = false;

  TailReport& tr = out.tail;
  const double t_end = std::abs(snaps.back().time);
  for (std::size_t k = 0; k < K; ++k) {
    const double t1 = std::abs(snaps[k].time);
    if (t1 < opt.ladder_t_min || t1 > opt.ladder_fraction * t_end) continue;
    tr.t1.push_back(t1);
    tr.tail_l1.push_back(l1_norm(tails[k]));
    tr.tail_linfM.push_back(sup_weighted(tails[k], wM));
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tr.t1.size(); ++i) {
    if (tr.tail_l1[i] > 0.0) {
      lx.push_back(std::log(tr.t1[i]));
      ly.push_back(std::log(tr.tail_l1[i]));
    }
  }
  if (lx.size() >= 3) {
    const LineFit fit = least_squares(lx, ly);
    tr.slope = fit.slope;
    tr.residual = fit.residual;
    tr.fitted = true;
  }
  const DistributionField free = apply_transport(out.f_inf, snaps.back().time);
  tr.scattering_distance = l1_distance(snaps.back(), free);
  tr.distance_constant = tr.scattering_distance * std::sqrt(t_end);
  return out;
}

}  // namespace

double l1_norm(const DistributionField& f) {
  double s = 0.0;
  for (double x : f.values()) s += std::abs(x);
  return s * f.grid().cell_measure();
}

double l1_distance(const DistributionField& a, const DistributionField& b) {
  if (!same_grid(a, b)) throw DomainError("l1_distance: grids differ");
  const auto va = a.values(), vb = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += std::abs(va[i] - vb[i]);
  return s * a.grid().cell_measure();
}

ScatteringState extract_scattering_state(const Trajectory& traj, const SphereQuadrature& q, const WeightParams& w,
                                         const ScatterOptions& opt, const KernelOptions& kopt) {
  const double sign = traj.snapshots.size() > 1 && traj.snapshots.back().time < 0.0 ? -1.0 : 1.0;
  return extract(traj, q, w, opt, kopt, sign);
}

ScatteringState extract_scattering_state_backward(const Trajectory& traj, const SphereQuadrature& q,
                                                  const WeightParams& w, const ScatterOptions& opt,
                                                  const KernelOptions& kopt) {
  return extract(traj, q, w, opt, kopt, -1.0);
}

FinalStateResult solve_final_state(const DistributionField& f_plus_inf, double t_max, const SolverConfig& cfg,
                                   const SphereQuadrature& q) {
  cfg.validate();
  f_plus_inf.check_finite();
  const std::vector<double> times = uniform_times(t_max, cfg.dt * cfg.snapshot_stride);
  const std::size_t K = times.size();
  const std::vector<double> wM = velocity_weights(f_plus_inf.grid().v, cfg.weights.M);
  const double scale = sup_weighted(f_plus_inf, wM);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

  std::vector<DistributionField> free, cur;
  for (double t : times) free.push_back(apply_transport(f_plus_inf, t));
  cur = free;

  FinalStateResult res;
  auto& rep = res.report;
  int bad = 0;
  std::vector<DistributionField> src;
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    src.clear();
    for (const auto& f : cur) src.push_back(collision_full(f, q, cfg.kernel));
    std::vector<DistributionField> next;
    next.reserve(K);
    double delta = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      DistributionField g = free[i];
      for (std::size_t j = i; j < K; ++j) {
        if (i == K - 1) break;
        double wj;
        if (j == i)
          wj = 0.5 * (times[i + 1] - times[i]);
        else if (j == K - 1)
          wj = 0.5 * (times[j] - times[j - 1]);
        else
          wj = 0.5 * (times[j + 1] - times[j - 1]);
        g.axpy(-wj, apply_transport(src[j], times[i] - times[j]));
      }
      g.time = times[i];
      g.nonneg_asserted = false;
      if (!g.all_finite()) throw InstabilityError("solve_final_state: non-finite iterate", times[i]);
      const auto a = g.values(), b = cur[i].values();
      const std::size_t nv = wM.size();
      for (std::size_t n = 0; n < a.size(); ++n) delta = std::max(delta, wM[n % nv] * std::abs(a[n] - b[n]));
      next.push_back(std::move(g));
    }
    if (!rep.increments.empty()) {
      const double prev = rep.increments.back();
      const double ratio = prev > 0.0 ? delta / prev : 0.0;
      rep.ratios.push_back(ratio);
      if (prev > floor) {
        rep.contraction = std::max(rep.contraction, ratio);
        bad = ratio >= 1.0 ? bad + 1 : 0;
        if (bad >= 3) {
          std::ostringstream os;
          os << "solve_final_state: no contraction for 3 consecutive iterations (last ratio " << ratio
             << "); the scattering state is outside the smallness budget";
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
  res.tail_bound = 2.0 * t_max * l1_norm(collision_full(cur.back(), q, cfg.kernel));
  res.f0 = cur.front();
  res.trajectory.snapshots = std::move(cur);
  for (const auto& s : res.trajectory.snapshots) res.trajectory.reports.push_back(report(s, cfg.weights));
  return res;
}

LipschitzProbe wave_operator_lipschitz_probe(const Trajectory& f_traj, const ScatteringState& f_state,
                                             const DistributionField& g0, const SolverConfig& cfg,
                                             const SphereQuadrature& q, const ScatterOptions& opt) {
  LipschitzProbe p;
  const DistributionField& f0 = f_traj.snapshots.front();
  p.data_distance = l1_distance(f0, g0);
  if (!(p.data_distance > 0.0)) throw DomainError("wave_operator_lipschitz_probe: f0 and g0 coincide");
  const Trajectory b = run(g0, cfg, q);
  if (b.snapshots.size() != f_traj.snapshots.size())
    throw DomainError("wave_operator_lipschitz_probe: trajectory does not match the configuration");
  for (std::size_t k = 0; k < b.snapshots.size(); ++k)
    p.flow_ratio = std::max(p.flow_ratio, l1_distance(f_traj.snapshots[k], b.snapshots[k]) / p.data_distance);
  const ScatteringState fb = extract_scattering_state(b, q, cfg.weights, opt, cfg.kernel);
  p.state_distance = l1_distance(f_state.f_inf, fb.f_inf);
  p.ratio = p.state_distance / p.data_distance;
  return p;
}

LipschitzProbe wave_operator_lipschitz_probe(const DistributionField& f0, const DistributionField& g0,
                                             const SolverConfig& cfg, const SphereQuadrature& q,
                                             const ScatterOptions& opt) {
  if (!(l1_distance(f0, g0) > 0.0)) throw DomainError("wave_operator_lipschitz_probe: f0 and g0 coincide");
  const Trajectory a = run(f0, cfg, q);
  const ScatteringState fa = extract_scattering_state(a, q, cfg.weights, opt, cfg.kernel);
  return wave_operator_lipschitz_probe(a, fa, g0, cfg, q, opt);
}

DistributionField parity_image(const DistributionField& f) {
  DistributionField out(f.grid_handle(), f.time);
  const std::size_t nx = f.grid().x.size(), nv = f.grid().v.size();
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv) out.at(nx - 1 - ix, nv - 1 - iv) = f.at(ix, iv);
  out.nonneg_asserted = f.nonneg_asserted;
  return out;
}

}  // namespace kwe
