#include "kwe/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kwe/errors.hpp"
#include "kwe/regression.hpp"

namespace kwe {

namespace {

// out[i] = in at index position i - s, linear interpolation, zero outside.
// `stride` steps between consecutive x nodes in both buffers.
void shift_line(const double* in, double* out, int n, std::size_t stride, double s) {
  double a = std::floor(s);
  double th = s - a;
  if (th < 1e-14) {
    th = 0.0;
  } else if (th > 1.0 - 1e-14) {
    th = 0.0;
    a += 1.0;
  }
  const long ia = static_cast<long>(a);
  for (int i = 0; i < n; ++i) {
    const long j0 = i - ia;
    const long j1 = j0 - 1;
    const double v0 = (j0 >= 0 && j0 < n) ? in[j0 * stride] : 0.0;
    if (th == 0.0) {
      out[i * stride] = v0;
    } else {
      const double v1 = (j1 >= 0 && j1 < n) ? in[j1 * stride] : 0.0;
      out[i * stride] = (1.0 - th) * v0 + th * v1;
    }
  }
}

}  // namespace

DistributionField apply_transport(const DistributionField& f, double t) {
  DistributionField out(f.grid_handle(), std::vector<double>(f.values().begin(), f.values().end()), f.time + t);
  out.nonneg_asserted = f.nonneg_asserted;
  const auto& g = f.grid();
  if (g.x.dim() == 0 || t == 0.0) return out;

  const int n = g.x.n();
  const std::size_t nv = g.v.size();
  const double inv_dx = 1.0 / g.x.spacing();
  const double* src = f.values().data();
  double* dst = out.values().data();

  if (g.x.dim() == 1) {
#pragma omp parallel for schedule(static)
    for (std::size_t iv = 0; iv < nv; ++iv) {
      const double s = g.v.node(iv).x * t * inv_dx;
      shift_line(src + iv, dst + iv, n, nv, s);
    }
    return out;
  }

  const std::size_t nn = static_cast<std::size_t>(n);
#pragma omp parallel for schedule(static)
  for (std::size_t iv = 0; iv < nv; ++iv) {
    const Vec3 v = g.v.node(iv);
    std::vector<double> a(nn * nn * nn), b(nn * nn * nn);
    for (std::size_t ix = 0; ix < a.size(); ++ix) a[ix] = src[ix * nv + iv];
    // tensor-product shifts: x, then y, then z (trilinear overall)
    for (std::size_t k = 0; k < nn * nn; ++k) shift_line(a.data() + k * nn, b.data() + k * nn, n, 1, v.x * t * inv_dx);
    for (std::size_t iz = 0; iz < nn; ++iz)
      for (std::size_t ix = 0; ix < nn; ++ix)
        shift_line(b.data() + iz * nn * nn + ix, a.data() + iz * nn * nn + ix, n, nn, v.y * t * inv_dx);
    for (std::size_t k = 0; k < nn * nn; ++k) shift_line(a.data() + k, b.data() + k, n, nn * nn, v.z * t * inv_dx);
    for (std::size_t ix = 0; ix < b.size(); ++ix) dst[ix * nv + iv] = b[ix];
  }
  return out;
}

double transport_boundary_loss(const DistributionField& f, const DistributionField& shifted) {
  double before = 0.0, after = 0.0;
  for (double x : f.values()) before += x;
  for (double x : shifted.values()) after += x;
  return (before - after) * f.grid().cell_measure();
}

double transport_commutes_with_weights_check(const DistributionField& f, double t, double l) {
  const auto& g = f.grid();
  const std::vector<double> w = velocity_weights(g.v, l);
  const std::size_t nv = g.v.size();
  DistributionField wf(f.grid_handle(), std::vector<double>(f.values().begin(), f.values().end()), f.time);
  for (std::size_t ix = 0; ix < g.x.size(); ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv) wf.at(ix, iv) *= w[iv];
  const DistributionField a = apply_transport(f, t);
  const DistributionField b = apply_transport(wf, t);
  double m = 0.0;
  for (std::size_t ix = 0; ix < g.x.size(); ++ix)
    for (std::size_t iv = 0; iv < nv; ++iv) m = std::max(m, std::abs(w[iv] * a.at(ix, iv) - b.at(ix, iv)));
  return m;
}

double edge_mass_fraction(const DistributionField& f) {
  const auto& g = f.grid();
  if (g.x.dim() == 0) return 0.0;
  const int n = g.x.n();
  const std::size_t nv = g.v.size();
  double total = 0.0, edge = 0.0;
  for (std::size_t ix = 0; ix < g.x.size(); ++ix) {
    bool on_edge;
    if (g.x.dim() == 1) {
      on_edge = ix == 0 || ix == static_cast<std::size_t>(n - 1);
    } else {
      const std::size_t nn = n;
      const std::size_t i = ix % nn, j = (ix / nn) % nn, k = ix / (nn * nn);
      on_edge = i == 0 || j == 0 || k == 0 || i == nn - 1 || j == nn - 1 || k == nn - 1;
    }
    double s = 0.0;
    for (std::size_t iv = 0; iv < nv; ++iv) s += std::abs(f.at(ix, iv));
    total += s;
    if (on_edge) edge += s;
  }
  return total > 0.0 ? edge / total : 0.0;
}

DecayProbe dispersive_decay_probe(const DistributionField& f0, const std::vector<double>& times, double p, double r,
                                  double edge_tolerance) {
  if (f0.grid().x.dim() == 0) throw DomainError("dispersive_decay_probe: needs dim >= 1");
  if (times.size() < 2) throw DomainError("dispersive_decay_probe: needs at least two sample times");
  DecayProbe probe;
  std::vector<double> lx, ly;
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("dispersive_decay_probe: sample times must be positive");
    const DistributionField ft = apply_transport(f0, t);
    const double edge = edge_mass_fraction(ft);
    const double lost = std::abs(transport_boundary_loss(f0, ft));
    double mass0 = 0.0;
    for (double x : f0.values()) mass0 += std::abs(x);
    mass0 *= f0.grid().cell_measure();
    if (edge > edge_tolerance || (mass0 > 0.0 && lost > edge_tolerance * mass0)) {
      std::ostringstream os;
      os << "dispersive_decay_probe: support reaches the box edge at t=" << t;
      throw DomainError(os.str());
    }
    const double nrm = mixed_norm(ft, 0.0, p, r);
    probe.times.push_back(t);
    probe.norms.push_back(nrm);
    lx.push_back(std::log(t));
    ly.push_back(std::log(nrm));
  }
  const LineFit fit = least_squares(lx, ly);
  probe.slope = fit.slope;
  probe.residual = fit.residual;
  return probe;
}

}  // namespace kwe
