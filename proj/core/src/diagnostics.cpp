#include "kwe/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "kwe/errors.hpp"
#include "kwe/regression.hpp"

namespace kwe {

NormReport report(const DistributionField& f, const WeightParams& w, double boundary_mass_lost) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  NormReport r;
  r.time = f.time;
  r.l1_xv = mixed_norm(f, 0.0, 1.0, 1.0);
  r.linfM_xv = mixed_norm(f, w.M, inf, inf);
  r.linfx_l2v_alpha = mixed_norm(f, w.alpha, inf, 2.0);
  r.l2x_l1v_w = mixed_norm(f, 1.0, 2.0, 1.0);
  r.momentN = mixed_norm(f, w.N_moment, 1.0, 1.0);
  r.min_value = f.min_value();
  r.boundary_mass_lost = boundary_mass_lost;

  const auto& g = f.grid();
  const std::size_t nv = g.v.size();
  std::vector<Vec3> nodes(nv);
  for (std::size_t i = 0; i < nv; ++i) nodes[i] = g.v.node(i);
  double m = 0.0, px = 0.0, py = 0.0, pz = 0.0, e = 0.0;
  for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
    const auto s = f.v_slice(ix);
    for (std::size_t i = 0; i < nv; ++i) {
      const double x = s[i];
      m += x;
      px += nodes[i].x * x;
      py += nodes[i].y * x;
      pz += nodes[i].z * x;
      e += norm2(nodes[i]) * x;
    }
  }
  const double dm = g.cell_measure();
  r.mass = m * dm;
  r.momentum = {px * dm, py * dm, pz * dm};
  r.energy = e * dm;
  return r;
}

ReportField parse_report_field(std::string_view name) {
  if (name == "l1_xv") return ReportField::l1_xv;
  if (name == "linfM_xv") return ReportField::linfM_xv;
  if (name == "linfx_l2v_alpha") return ReportField::linfx_l2v_alpha;
  if (name == "l2x_l1v_w") return ReportField::l2x_l1v_w;
  if (name == "mass") return ReportField::mass;
  if (name == "energy") return ReportField::energy;
  if (name == "momentN") return ReportField::momentN;
  throw ConfigError("unknown report field '" + std::string(name) + "'");
}

double report_value(const NormReport& r, ReportField field) noexcept {
  switch (field) {
    case ReportField::l1_xv:
      return r.l1_xv;
    case ReportField::linfM_xv:
      return r.linfM_xv;
    case ReportField::linfx_l2v_alpha:
      return r.linfx_l2v_alpha;
    case ReportField::l2x_l1v_w:
      return r.l2x_l1v_w;
    case ReportField::mass:
      return r.mass;
    case ReportField::energy:
      return r.energy;
    case ReportField::momentN:
      return r.momentN;
  }
  return 0.0;
}

DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double t_min) {
  if (times.size() != values.size()) throw DomainError("decay_fit: times and values differ in length");
  DecayFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min) continue;
    if (!(values[i] > 0.0) || !(times[i] > 0.0)) {
      fit.excluded_times.push_back(times[i]);
      continue;
    }
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 5) throw DomainError("decay_fit: fewer than five usable points with t >= t_min");
  const LineFit lf = least_squares(lx, ly);
  fit.slope = lf.slope;
  fit.residual = lf.residual;
  fit.points_used = lx.size();
  return fit;
}

DecayFit decay_fit(std::span<const NormReport> reports, ReportField field, double t_min) {
  std::vector<double> t, v;
  for (const auto& r : reports) {
    t.push_back(std::abs(r.time));
    v.push_back(report_value(r, field));
  }
  return decay_fit(t, v, t_min);
}

DispersiveCertificate certify_dispersive(const DistributionField& f0, const WeightParams& w, double epsilon0_budget) {
  const NormReport r = report(f0, w);
  DispersiveCertificate c;
  c.budget = epsilon0_budget;
  c.l1_xv = r.l1_xv;
  c.linfM_xv = r.linfM_xv;
  c.linfx_l2v_alpha = r.linfx_l2v_alpha;
  c.l2x_l1v_w = r.l2x_l1v_w;
  c.certified = c.l1_xv < epsilon0_budget && c.linfM_xv < epsilon0_budget && c.linfx_l2v_alpha < epsilon0_budget &&
                c.l2x_l1v_w < epsilon0_budget;
  return c;
}

}  // namespace kwe
