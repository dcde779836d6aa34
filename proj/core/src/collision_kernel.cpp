#include <algorithm>
#include <cmath>
#include <vector>

#include "kwe/collision.hpp"
#include "kwe/errors.hpp"

namespace kwe {

namespace {

struct AxisShift {
  int base;
  double frac;
};

inline AxisShift split_offset(double o) {
  const double r = std::round(o);
  if (std::abs(o - r) <= 1e-12 * std::max(1.0, std::abs(o))) return {static_cast<int>(r), 0.0};
  const double b = std::floor(o);
  return {static_cast<int>(b), o - b};
}

// v1 range along one axis for which v1 + offset lies in [0, n-1].
inline void position_range(const AxisShift& s, int n, int& lo, int& hi) {
  lo = std::max(lo, -s.base);
  hi = std::min(hi, n - 1 - s.base - (s.frac > 0.0 ? 1 : 0));
}

struct Shift3 {
  AxisShift a[3];
};

inline void neumaier(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

// Zero-padded copy with one extra node per axis so the upper trilinear
// corner can be read when its weight is zero.
std::vector<double> pad(std::span<const double> src, int n) {
  const int m = n + 1;
  std::vector<double> out(static_cast<std::size_t>(m) * m * m, 0.0);
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        out[(static_cast<std::size_t>(iz) * m + iy) * m + ix] = src[(static_cast<std::size_t>(iz) * n + iy) * n + ix];
  return out;
}

// Interpolates a padded field along one x-row of v1 nodes (fixed y1, z1)
// shifted by `s`, writing out[x] for x in [xlo, xhi].
inline void interp_row(const double* P, int m, int y1, int z1, const Shift3& s, int xlo, int xhi, double* tmp,
                       double* out) {
  const double tx = s.a[0].frac, ty = s.a[1].frac, tz = s.a[2].frac;
  const int bx = s.a[0].base;
  const std::size_t yb = static_cast<std::size_t>(y1 + s.a[1].base);
  const std::size_t zb = static_cast<std::size_t>(z1 + s.a[2].base);
  const double* r00 = P + (zb * m + yb) * m;
  const double* r10 = r00 + m;
  const double* r01 = r00 + static_cast<std::size_t>(m) * m;
  const double* r11 = r01 + m;
  const double w00 = (1.0 - ty) * (1.0 - tz), w10 = ty * (1.0 - tz), w01 = (1.0 - ty) * tz, w11 = ty * tz;
  const int jlo = xlo + bx, jhi = xhi + bx + 1;
  for (int j = jlo; j <= jhi; ++j) tmp[j] = w00 * r00[j] + w10 * r10[j] + w01 * r01[j] + w11 * r11[j];
  for (int x = xlo; x <= xhi; ++x) out[x] = (1.0 - tx) * tmp[x + bx] + tx * tmp[x + bx + 1];
}

}  // namespace

std::uint64_t kernel_active_triples(const VelocityGrid& grid, const SphereQuadrature& q) {
  const int n = grid.n();
  std::uint64_t total = 0;
  for (int dz = -(n - 1); dz <= n - 1; ++dz)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dx = -(n - 1); dx <= n - 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const std::uint64_t box = static_cast<std::uint64_t>(n - std::abs(dx)) * (n - std::abs(dy)) * (n - std::abs(dz));
        std::uint64_t active = 0;
        for (const auto& s : q.nodes)
          if (dx * s.x + dy * s.y + dz * s.z > 0.0) ++active;
        total += box * active;
      }
  return total;
}

CollisionTerms collision_kernel(const CollisionInput& in, const SphereQuadrature& q, unsigned request,
                                const KernelOptions& opt) {
  in.validate();
  if (in.mode != CollisionInput::Mode::grid) throw DomainError("collision_kernel: grid-mode input required");
  const VelocityGrid& grid = in.grid;
  const int n = grid.n();
  const int m = n + 1;
  const std::size_t nv = grid.size();
  if (n > 255) throw DomainError("collision_kernel: at most 255 velocity nodes per axis");

  const bool want_g1 = request & kGain1, want_g2 = request & kGain2;
  const bool want_l1 = request & kLoss1, want_l2 = request & kLoss2, want_r = request & kFrequency;
  const bool need_a = want_g1 || want_g2;
  const bool need_b = want_l1 || want_r;
  const bool need_c = want_l2 || want_r;
  const bool same_gh = in.g.data() == in.h.data();

  const std::vector<double> Gp = pad(in.g, n);
  const std::vector<double> Hp = same_gh ? std::vector<double>{} : pad(in.h, n);
  const double* G = Gp.data();
  const double* H = same_gh ? Gp.data() : Hp.data();
  const std::span<const double> f = in.f, g = in.g;

  CollisionTerms out;
  if (want_g1) out.gain1.assign(nv, 0.0);
  if (want_g2) out.gain2.assign(nv, 0.0);
  if (want_l1) out.loss1.assign(nv, 0.0);
  if (want_l2) out.loss2.assign(nv, 0.0);
  if (want_r) out.frequency.assign(nv, 0.0);
  if (request == 0) return out;

  const std::size_t nsig = q.size();
  const double K = 0.25 * grid.spacing() * grid.cell_volume();
  const bool comp = opt.compensated;
  const std::size_t plane = static_cast<std::size_t>(n) * n;

  std::vector<double> sG1(nv, 0.0), sA(nv, 0.0), sB(nv, 0.0), sC(nv, 0.0);
  std::vector<double> cG1(nv, 0.0), cA(nv, 0.0), cB(nv, 0.0), cC(nv, 0.0);
  std::vector<double> TA(nv), TB(nv), TC(nv);

  struct Active {
    double c;
    Shift3 ps, p1;
    int sxl, sxh, syl, syh, zs_lo, zs_hi;
    int oxl, oxh, oyl, oyh, z1_lo, z1_hi;
  };
  std::vector<Active> active;
  active.reserve(nsig);

  for (int dz = -(n - 1); dz <= n - 1; ++dz) {
    const int zlo0 = std::max(0, -dz), zhi0 = std::min(n - 1, n - 1 - dz);
    for (int dy = -(n - 1); dy <= n - 1; ++dy) {
      const int ylo0 = std::max(0, -dy), yhi0 = std::min(n - 1, n - 1 - dy);
      for (int dx = -(n - 1); dx <= n - 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const int xlo0 = std::max(0, -dx), xhi0 = std::min(n - 1, n - 1 - dx);
        const double dn = std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
        const double hd = 0.5 * dn;

        active.clear();
        for (std::size_t j = 0; j < nsig; ++j) {
          const Vec3& s = q.nodes[j];
          if (dx * s.x + dy * s.y + dz * s.z <= 0.0) continue;
          Active a;
          a.c = q.weights[j] * dn;
          a.ps.a[0] = split_offset(0.5 * dx + hd * s.x);
          a.ps.a[1] = split_offset(0.5 * dy + hd * s.y);
          a.ps.a[2] = split_offset(0.5 * dz + hd * s.z);
          a.p1.a[0] = split_offset(0.5 * dx - hd * s.x);
          a.p1.a[1] = split_offset(0.5 * dy - hd * s.y);
          a.p1.a[2] = split_offset(0.5 * dz - hd * s.z);
          a.sxl = a.oxl = xlo0;
          a.sxh = a.oxh = xhi0;
          a.syl = a.oyl = ylo0;
          a.syh = a.oyh = yhi0;
          a.zs_lo = a.z1_lo = zlo0;
          a.zs_hi = a.z1_hi = zhi0;
          position_range(a.ps.a[0], n, a.sxl, a.sxh);
          position_range(a.ps.a[1], n, a.syl, a.syh);
          position_range(a.ps.a[2], n, a.zs_lo, a.zs_hi);
          position_range(a.p1.a[0], n, a.oxl, a.oxh);
          position_range(a.p1.a[1], n, a.oyl, a.oyh);
          position_range(a.p1.a[2], n, a.z1_lo, a.z1_hi);
          const bool star_ok = a.sxl <= a.sxh && a.syl <= a.syh && a.zs_lo <= a.zs_hi && (need_a || need_c);
          const bool one_ok = a.oxl <= a.oxh && a.oyl <= a.oyh && a.z1_lo <= a.z1_hi && (need_a || need_b);
          if (!star_ok) a.zs_lo = 1, a.zs_hi = 0;
          if (!one_ok) a.z1_lo = 1, a.z1_hi = 0;
          if (star_ok || one_ok) active.push_back(a);
        }

#pragma omp parallel for schedule(static)
        for (int z1 = zlo0; z1 <= zhi0; ++z1) {
          double tmp[512], gs[256], h1s[256], hs[256];
          const std::size_t zoff = static_cast<std::size_t>(z1) * plane;
          for (int y = ylo0; y <= yhi0; ++y) {
            const std::size_t row = zoff + static_cast<std::size_t>(y) * n;
            for (int x = xlo0; x <= xhi0; ++x) TA[row + x] = TB[row + x] = TC[row + x] = 0.0;
          }

          for (const Active& a : active) {
            const bool do_star = z1 >= a.zs_lo && z1 <= a.zs_hi;
            const bool do_one = z1 >= a.z1_lo && z1 <= a.z1_hi;
            if (!do_star && !do_one) continue;
            const int sxl = a.sxl, sxh = a.sxh, syl = a.syl, syh = a.syh;
            const int oxl = a.oxl, oxh = a.oxh, oyl = a.oyl, oyh = a.oyh;

            const int ylo = std::min(do_star ? syl : oyl, do_one ? oyl : syl);
            const int yhi = std::max(do_star ? syh : oyh, do_one ? oyh : syh);
            const double c = a.c;
            for (int y = ylo; y <= yhi; ++y) {
              const bool rs = do_star && y >= syl && y <= syh;
              const bool r1 = do_one && y >= oyl && y <= oyh;
              if (rs) interp_row(G, m, y, z1, a.ps, sxl, sxh, tmp, gs);
              if (r1) interp_row(H, m, y, z1, a.p1, oxl, oxh, tmp, h1s);
              const std::size_t row = zoff + static_cast<std::size_t>(y) * n;
              if (need_a && rs && r1) {
                double* ta = TA.data() + row;
                const int lo = std::max(sxl, oxl), hi = std::min(sxh, oxh);
                for (int x = lo; x <= hi; ++x) ta[x] += c * gs[x] * h1s[x];
              }
              if (need_b && r1) {
                double* tb = TB.data() + row;
                for (int x = oxl; x <= oxh; ++x) tb[x] += c * h1s[x];
              }
              if (need_c && rs) {
                const double* hv = gs;
                if (!same_gh) {
                  interp_row(H, m, y, z1, a.ps, sxl, sxh, tmp, hs);
                  hv = hs;
                }
                double* tc = TC.data() + row;
                for (int x = sxl; x <= sxh; ++x) tc[x] += c * hv[x];
              }
            }
          }

          // scatter v1 temporaries onto output nodes v = v1 + d
          for (int y = ylo0; y <= yhi0; ++y) {
            const std::size_t r1 = zoff + static_cast<std::size_t>(y) * n;
            const std::size_t ro = static_cast<std::size_t>(z1 + dz) * plane + static_cast<std::size_t>(y + dy) * n + dx;
            const double* ta = TA.data() + r1;
            const double* tb = TB.data() + r1;
            const double* tc = TC.data() + r1;
            const double* fr = f.data() + r1;
            const double* gr = g.data() + r1;
            if (comp) {
              for (int x = xlo0; x <= xhi0; ++x) {
                const std::size_t o = ro + x;
                if (need_a) {
                  if (want_g1) neumaier(sG1[o], cG1[o], fr[x] * ta[x]);
                  neumaier(sA[o], cA[o], ta[x]);
                }
                if (need_b) neumaier(sB[o], cB[o], gr[x] * tb[x]);
                if (need_c) neumaier(sC[o], cC[o], gr[x] * tc[x]);
              }
            } else {
              for (int x = xlo0; x <= xhi0; ++x) {
                const std::size_t o = ro + x;
                sG1[o] += fr[x] * ta[x];
                sA[o] += ta[x];
                sB[o] += gr[x] * tb[x];
                sC[o] += gr[x] * tc[x];
              }
            }
          }
        }
      }
    }
  }

  for (std::size_t o = 0; o < nv; ++o) {
    const double fv = f[o];
    const double a = sA[o] + cA[o], b = sB[o] + cB[o], cc = sC[o] + cC[o];
    if (want_g1) out.gain1[o] = K * (sG1[o] + cG1[o]);
    if (want_g2) out.gain2[o] = K * fv * a;
    if (want_l1) out.loss1[o] = K * fv * b;
    if (want_l2) out.loss2[o] = K * fv * cc;
    if (want_r) out.frequency[o] = K * (b + cc);
  }
  return out;
}

}  // namespace kwe
