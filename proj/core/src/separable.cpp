#include "kwe/separable.hpp"

#include <algorithm>
#include <cmath>

#include "kwe/errors.hpp"

namespace kwe {

Factor1D Factor1D::gaussian(double amplitude, double center, double width) {
  if (!(width > 0.0)) throw DomainError("Factor1D::gaussian: width must be positive");
  Factor1D f;
  f.kind = Kind::gaussian;
  f.amplitude = amplitude;
  f.center = center;
  f.width = width;
  return f;
}

Factor1D Factor1D::sampled(std::vector<double> samples) {
  Factor1D f;
  f.kind = Kind::sampled;
  f.samples = std::move(samples);
  return f;
}

double Factor1D::operator()(double x, const VelocityGrid& grid) const {
  if (kind == Kind::gaussian) {
    const double z = (x - center) / width;
    return amplitude * std::exp(-0.5 * z * z);
  }
  const int n = static_cast<int>(samples.size());
  double p = x / grid.spacing() + 0.5 * (n - 1);
  const double r = std::round(p);
  if (std::abs(p - r) <= 1e-12 * std::max(1.0, std::abs(p))) p = r;
  if (p < 0.0 || p > n - 1) return 0.0;
  int b = static_cast<int>(std::floor(p));
  double t = p - b;
  if (b == n - 1) {
    b = n - 2;
    t = 1.0;
  }
  return (1.0 - t) * samples[b] + t * samples[b + 1];
}

SeparableProfile SeparableProfile::isotropic_gaussian(double amplitude, const Vec3& center, double width) {
  SeparableProfile p;
  p.axis[0] = Factor1D::gaussian(amplitude, center.x, width);
  p.axis[1] = Factor1D::gaussian(1.0, center.y, width);
  p.axis[2] = Factor1D::gaussian(1.0, center.z, width);
  return p;
}

double SeparableProfile::operator()(const Vec3& v, const VelocityGrid& grid) const {
  return axis[0](v.x, grid) * axis[1](v.y, grid) * axis[2](v.z, grid);
}

std::vector<double> SeparableProfile::sample(const VelocityGrid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(grid.node(i), grid);
  return out;
}

SeparableProfile SeparableProfile::sampled_on(const VelocityGrid& grid) const {
  SeparableProfile p;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> s(grid.n());
    for (int i = 0; i < grid.n(); ++i) s[i] = axis[k](grid.coordinate(i), grid);
    p.axis[k] = Factor1D::sampled(std::move(s));
  }
  return p;
}

namespace {

struct Shift {
  int base;
  double frac;
  double raw;
};

inline Shift split(double o) {
  const double r = std::round(o);
  if (std::abs(o - r) <= 1e-12 * std::max(1.0, std::abs(o))) return {static_cast<int>(r), 0.0, r};
  const double b = std::floor(o);
  return {static_cast<int>(b), o - b, o};
}

inline void neumaier(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

class AxisEvaluator {
 public:
  AxisEvaluator(const VelocityGrid& grid, SeparableMode mode) : grid_(grid), mode_(mode), n_(grid.n()) {}

  // out[i] = factor at index position (lo + i + o), i = 0..hi-lo
  void fill(const Factor1D& fac, const Shift& o, int lo, int hi, double* out) const {
    const int len = hi - lo + 1;
    if (mode_ == SeparableMode::grid) {
      const auto& S = fac.samples;
      int vlo = std::max(lo, -o.base);
      int vhi = std::min(hi, n_ - 1 - o.base - (o.frac > 0.0 ? 1 : 0));
      for (int i = 0; i < len; ++i) out[i] = 0.0;
      const double t = o.frac;
      for (int v1 = vlo; v1 <= vhi; ++v1) {
        const int j = v1 + o.base;
        out[v1 - lo] = t > 0.0 ? (1.0 - t) * S[j] + t * S[j + 1] : S[j];
      }
      return;
    }
    const double h = grid_.spacing();
    const double half = 0.5 * (n_ - 1);
    const double w2 = fac.width * fac.width;
    const double x0 = (lo + o.raw - half) * h - fac.center;
    double e = std::exp(-0.5 * x0 * x0 / w2);
    if (!(e > 1e-250)) {
      for (int i = 0; i < len; ++i) {
        const double x = x0 + i * h;
        out[i] = fac.amplitude * std::exp(-0.5 * x * x / w2);
      }
      return;
    }
    // exp(-x^2/2w^2) on an arithmetic sequence by a geometric recurrence
    double r = std::exp(-(2.0 * x0 * h + h * h) / (2.0 * w2));
    const double qq = std::exp(-h * h / w2);
    for (int i = 0; i < len; ++i) {
      out[i] = fac.amplitude * e;
      e *= r;
      r *= qq;
    }
  }

 private:
  const VelocityGrid& grid_;
  SeparableMode mode_;
  int n_;
};

}  // namespace

OperatorMoments separable_moments(const VelocityGrid& grid, const SphereQuadrature& q, const SeparableProfile& f,
                                  const SeparableProfile& g, const SeparableProfile& h, SeparableMode mode) {
  const int n = grid.n();
  if (mode == SeparableMode::grid) {
    for (const SeparableProfile* p : {&f, &g, &h})
      for (const auto& fac : p->axis)
        if (fac.kind != Factor1D::Kind::sampled || static_cast<int>(fac.samples.size()) != n)
          throw DomainError("separable_moments: grid mode needs factors sampled on the velocity grid");
  }
  const AxisEvaluator ev(grid, mode);
  const double hsp = grid.spacing();
  std::vector<double> coord(n);
  for (int i = 0; i < n; ++i) coord[i] = grid.coordinate(i);

  // acc[op][moment]
  double acc[4][5] = {}, cmp[4][5] = {};

  std::vector<double> F0(3 * n), Fd(3 * n), G0(3 * n), X1(3 * n), X2(3 * n), Gs(n), H1(n), Hs(n);
  const std::size_t nsig = q.size();

  for (int dz = -(n - 1); dz <= n - 1; ++dz)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dx = -(n - 1); dx <= n - 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int d[3] = {dx, dy, dz};
        const double dn = std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
        int lo[3], hi[3];
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::max(0, -d[k]);
          hi[k] = std::min(n - 1, n - 1 - d[k]);
          const Shift o0{0, 0.0, 0.0};
          const Shift od{d[k], 0.0, static_cast<double>(d[k])};
          ev.fill(f.axis[k], o0, lo[k], hi[k], F0.data() + k * n);
          ev.fill(f.axis[k], od, lo[k], hi[k], Fd.data() + k * n);
          ev.fill(g.axis[k], o0, lo[k], hi[k], G0.data() + k * n);
          for (int i = 0; i <= hi[k] - lo[k]; ++i) {
            const double x = coord[lo[k] + i + d[k]];
            X1[k * n + i] = x;
            X2[k * n + i] = x * x;
          }
        }
        for (std::size_t j = 0; j < nsig; ++j) {
          const Vec3& s = q.nodes[j];
          if (dx * s.x + dy * s.y + dz * s.z <= 0.0) continue;
          const double c = q.weights[j] * dn;
          // M[k][op][p]: per-axis sums of op integrand times x^p at v = v1 + d
          double M[3][4][3];
          for (int k = 0; k < 3; ++k) {
            const double sk = s[k];
            const Shift os = split(0.5 * d[k] + 0.5 * dn * sk);
            const Shift o1 = split(0.5 * d[k] - 0.5 * dn * sk);
            ev.fill(g.axis[k], os, lo[k], hi[k], Gs.data());
            ev.fill(h.axis[k], o1, lo[k], hi[k], H1.data());
            ev.fill(h.axis[k], os, lo[k], hi[k], Hs.data());
            const double* f0 = F0.data() + k * n;
            const double* fd = Fd.data() + k * n;
            const double* g0 = G0.data() + k * n;
            const double* x1 = X1.data() + k * n;
            const double* x2 = X2.data() + k * n;
            double m[4][3] = {};
            for (int i = 0; i <= hi[k] - lo[k]; ++i) {
              const double gh = Gs[i] * H1[i];
              const double p0 = f0[i] * gh;
              const double p1 = fd[i] * gh;
              const double p2 = fd[i] * g0[i] * H1[i];
              const double p3 = fd[i] * g0[i] * Hs[i];
              m[0][0] += p0, m[0][1] += p0 * x1[i], m[0][2] += p0 * x2[i];
              m[1][0] += p1, m[1][1] += p1 * x1[i], m[1][2] += p1 * x2[i];
              m[2][0] += p2, m[2][1] += p2 * x1[i], m[2][2] += p2 * x2[i];
              m[3][0] += p3, m[3][1] += p3 * x1[i], m[3][2] += p3 * x2[i];
            }
            for (int op = 0; op < 4; ++op)
              for (int p = 0; p < 3; ++p) M[k][op][p] = m[op][p];
          }
          for (int op = 0; op < 4; ++op) {
            const double a0 = M[0][op][0], b0 = M[1][op][0], c0 = M[2][op][0];
            double val[5];
            val[kMomOne] = a0 * b0 * c0;
            val[kMomVx] = M[0][op][1] * b0 * c0;
            val[kMomVy] = a0 * M[1][op][1] * c0;
            val[kMomVz] = a0 * b0 * M[2][op][1];
            val[kMomEnergy] = M[0][op][2] * b0 * c0 + a0 * M[1][op][2] * c0 + a0 * b0 * M[2][op][2];
            for (int p = 0; p < 5; ++p) neumaier(acc[op][p], cmp[op][p], c * val[p]);
          }
        }
      }

  const double K = 0.25 * hsp * grid.cell_volume() * grid.cell_volume();
  OperatorMoments out;
  for (int p = 0; p < 5; ++p) {
    out.gain1[p] = K * (acc[0][p] + cmp[0][p]);
    out.gain2[p] = K * (acc[1][p] + cmp[1][p]);
    out.loss1[p] = K * (acc[2][p] + cmp[2][p]);
    out.loss2[p] = K * (acc[3][p] + cmp[3][p]);
  }
  return out;
}

}  // namespace kwe
