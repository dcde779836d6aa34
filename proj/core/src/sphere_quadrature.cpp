#include <algorithm>
#include <cmath>
#include <numbers>

#include "kwe/errors.hpp"
#include "kwe/phase_grid.hpp"

namespace kwe {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

int SphereQuadrature::degree() const noexcept { return std::min(2 * n_polar - 1, n_azimuthal - 1); }

SphereQuadrature make_sphere_quadrature(int n_polar, int n_azimuthal) {
  if (n_polar < 2) throw ConfigError("grid.n_polar: must be >= 2");
  if (n_azimuthal < 4 || n_azimuthal % 2 != 0) throw ConfigError("grid.n_azimuthal: must be even and >= 4");
  std::vector<double> z, wz;
  gauss_legendre(n_polar, z, wz);
  SphereQuadrature q;
  q.n_polar = n_polar;
  q.n_azimuthal = n_azimuthal;
  q.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuthal);
  q.weights.reserve(q.nodes.capacity());
  const double dphi = 2.0 * std::numbers::pi / n_azimuthal;
  std::vector<double> c(n_azimuthal), s(n_azimuthal);
  for (int k = 0; k < n_azimuthal / 2; ++k) {
    const double phi = dphi * (k + 0.5);
    c[k] = std::cos(phi);
    s[k] = std::sin(phi);
    // phi + pi exactly negates; keeps antipodal pairs bitwise
    c[k + n_azimuthal / 2] = -c[k];
    s[k + n_azimuthal / 2] = -s[k];
  }
  for (int i = 0; i < n_polar; ++i) {
    const double r = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (int k = 0; k < n_azimuthal; ++k) {
      q.nodes.push_back({r * c[k], r * s[k], z[i]});
      q.weights.push_back(wz[i] * dphi);
    }
  }
  return q;
}

}  // namespace kwe
