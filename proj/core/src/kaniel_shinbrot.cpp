#include "kwe/kaniel_shinbrot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kwe/errors.hpp"

namespace kwe {

namespace {

double l1_diff(const DistributionField& a, const DistributionField& b) {
  const auto va = a.values(), vb = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += std::abs(va[i] - vb[i]);
  return s * a.grid().cell_measure();
}

// max over nodes of (a - b)^+ with the flat index of the worst node
double excess(const DistributionField& a, const DistributionField& b, std::size_t* where = nullptr) {
  const auto va = a.values(), vb = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    if (d > m) {
      m = d;
      if (where) *where = i;
    }
  }
  return m;
}

double scale_of(const DistributionField& f0) { return std::max(f0.max_abs(), std::numeric_limits<double>::min()); }

[[noreturn]] void nesting_fault(const char* what, double violation, std::size_t node, double t, std::size_t nv) {
  std::ostringstream os;
  os << "Kaniel-Shinbrot nesting violated (" << what << "): relative excess " << violation << " at x-node "
     << node / nv << ", v-node " << node % nv << ", t=" << t;
  throw PropertyViolation(os.str());
}

}  // namespace

KSState ks_initialize(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q,
                      const KSOptions& opt) {
  if (f0.min_value() < 0.0) throw DomainError("ks_initialize: initial data must be nonnegative");
  const GainOnlyResult g = gain_only_solve(f0, cfg, q);

  KSState s0;
  s0.upper = g.trajectory;
  for (const auto& u : s0.upper.snapshots) {
    DistributionField z(u.grid_handle(), u.time);
    z.nonneg_asserted = true;
    s0.lower.snapshots.push_back(std::move(z));
  }
  for (const auto& l : s0.lower.snapshots) s0.lower.reports.push_back(report(l, cfg.weights));
  s0.gap_history.push_back(l1_diff(s0.upper.back(), s0.lower.back()));
  s0.nesting_violation.push_back(0.0);

  KSOptions relaxed = opt;
  relaxed.nesting_tolerance = std::numeric_limits<double>::infinity();
  KSState s1 = ks_iterate(s0, cfg, q, relaxed);

  // beginning condition 0 <= l0 <= l1 <= u1 <= u0, with u1 = u0 up to the solve tolerance
  const double sc = scale_of(f0);
  const std::size_t nv = f0.grid().v.size();
  double disc = 0.0;
  for (std::size_t k = 0; k < s1.upper.snapshots.size(); ++k) {
    const auto& l0 = s0.lower.snapshots[k];
    const auto& l1 = s1.lower.snapshots[k];
    const auto& u1 = s1.upper.snapshots[k];
    const auto& u0 = s0.upper.snapshots[k];
    std::size_t node = 0;
    double v = excess(l0, l1, &node) / sc;
    if (v > opt.nesting_tolerance) nesting_fault("l0 <= l1", v, node, l1.time, nv);
    v = excess(l1, u1, &node) / sc;
    if (v > opt.nesting_tolerance) nesting_fault("l1 <= u1", v, node, l1.time, nv);
    const auto a = u1.values(), b = u0.values();
    for (std::size_t i = 0; i < a.size(); ++i) disc = std::max(disc, std::abs(a[i] - b[i]) / sc);
  }
  s1.u1_u0_discrepancy = disc;
  if (disc > opt.u1_u0_tolerance) {
    std::ostringstream os;
    os << "ks_initialize: u1 differs from u0 by " << disc << " (relative), above tolerance " << opt.u1_u0_tolerance;
    throw PropertyViolation(os.str());
  }
  return s1;
}

KSState ks_iterate(const KSState& state, const SolverConfig& cfg, const SphereQuadrature& q, const KSOptions& opt) {
  const auto& L = state.lower.snapshots;
  const auto& U = state.upper.snapshots;
  if (L.empty() || L.size() != U.size()) throw DomainError("ks_iterate: lower and upper trajectories do not match");
  const DistributionField& f0 = U.front();
  const std::vector<double> times = state.upper.times();

  std::vector<DistributionField> gl, rl, gu, ru;
  for (std::size_t k = 0; k < L.size(); ++k) {
    FieldCollision cl = collision_split(L[k], q, cfg.kernel);
    FieldCollision cu = collision_split(U[k], q, cfg.kernel);
    gl.push_back(std::move(cl.gain));
    rl.push_back(std::move(cl.frequency));
    gu.push_back(std::move(cu.gain));
    ru.push_back(std::move(cu.frequency));
  }
  std::vector<DistributionField> lnext = duhamel_with_damping(f0, times, gl, ru);
  std::vector<DistributionField> unext = duhamel_with_damping(f0, times, gu, rl);

  const double sc = scale_of(f0);
  const std::size_t nv = f0.grid().v.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < L.size(); ++k) {
    std::size_t n1 = 0, n2 = 0, n3 = 0;
    const double a = excess(L[k], lnext[k], &n1) / sc;
    const double b = excess(lnext[k], unext[k], &n2) / sc;
    const double c = excess(unext[k], U[k], &n3) / sc;
    worst = std::max({worst, a, b, c});
    if (a > opt.nesting_tolerance) nesting_fault("l_n <= l_{n+1}", a, n1, times[k], nv);
    if (b > opt.nesting_tolerance) nesting_fault("l_{n+1} <= u_{n+1}", b, n2, times[k], nv);
    if (c > opt.nesting_tolerance) nesting_fault("u_{n+1} <= u_n", c, n3, times[k], nv);
    // clip sub-tolerance violations so the iterates stay nested
    auto lv = lnext[k].values();
    auto uv = unext[k].values();
    const auto lo = L[k].values(), up = U[k].values();
    for (std::size_t i = 0; i < lv.size(); ++i) {
      lv[i] = std::max(lv[i], lo[i]);
      uv[i] = std::min(uv[i], up[i]);
    }
  }

  KSState next;
  next.n = state.n + 1;
  next.gap_history = state.gap_history;
  next.nesting_violation = state.nesting_violation;
  next.u1_u0_discrepancy = state.u1_u0_discrepancy;
  next.lower.snapshots = std::move(lnext);
  next.upper.snapshots = std::move(unext);
  for (auto& l : next.lower.snapshots) {
    l.nonneg_asserted = true;
    next.lower.reports.push_back(report(l, cfg.weights));
  }
  for (auto& u : next.upper.snapshots) {
    u.nonneg_asserted = true;
    next.upper.reports.push_back(report(u, cfg.weights));
  }
  next.gap_history.push_back(l1_diff(next.upper.back(), next.lower.back()));
  next.nesting_violation.push_back(worst);
  return next;
}

KSResult ks_converge(const DistributionField& f0, const SolverConfig& cfg, const SphereQuadrature& q,
                     const KSOptions& opt) {
  KSResult res;
  KSState s = ks_initialize(f0, cfg, q, opt);
  double l1f0 = 0.0;
  for (double x : f0.values()) l1f0 += std::abs(x);
  l1f0 *= f0.grid().cell_measure();
  while (s.gap_history.back() > opt.gap_tolerance * l1f0 && s.n < opt.max_iterations) s = ks_iterate(s, cfg, q, opt);

  KSCertificate& c = res.certificate;
  c.final_gap = s.gap_history.back();
  c.converged = c.final_gap <= opt.gap_tolerance * l1f0;
  c.max_nesting_violation = *std::max_element(s.nesting_violation.begin(), s.nesting_violation.end());
  double logsum = 0.0;
  int cnt = 0;
  for (std::size_t k = 1; k + 1 < s.gap_history.size(); ++k) {
    if (s.gap_history[k] > 0.0 && s.gap_history[k + 1] > 0.0) {
      logsum += std::log(s.gap_history[k + 1] / s.gap_history[k]);
      ++cnt;
    }
  }
  c.gap_ratio = cnt > 0 ? std::exp(logsum / cnt) : 0.0;
  c.final_min_value = std::numeric_limits<double>::infinity();
  for (const auto& l : s.lower.snapshots) c.final_min_value = std::min(c.final_min_value, l.min_value());

  const Trajectory strang = run(f0, cfg, q);
  if (strang.snapshots.size() != s.lower.snapshots.size())
    throw DomainError("ks_converge: Strang and Kaniel-Shinbrot snapshot grids differ");
  const double sc = scale_of(f0);
  for (std::size_t k = 0; k < strang.snapshots.size(); ++k) {
    const double below = excess(s.lower.snapshots[k], strang.snapshots[k]);
    const double above = excess(strang.snapshots[k], s.upper.snapshots[k]);
    c.sandwich_violation = std::max({c.sandwich_violation, below / sc, above / sc});
  }
  DistributionField mid = s.lower.back();
  mid.axpy(1.0, s.upper.back());
  mid.scale(0.5);
  double nf = 0.0;
  for (double x : strang.back().values()) nf += std::abs(x);
  nf *= f0.grid().cell_measure();
  c.strang_l1_relative = nf > 0.0 ? l1_diff(mid, strang.back()) / nf : l1_diff(mid, strang.back());
  res.state = std::move(s);
  return res;
}

}  // namespace kwe
