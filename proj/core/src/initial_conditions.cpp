#include "kwe/initial_conditions.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "kwe/errors.hpp"

namespace kwe {

namespace {

double bump(double r) noexcept { return r < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; }

// C-infinity step, 0 at s <= 0 and 1 at s >= 1
double smooth_step(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace

double smooth_cutoff(double r, double R) noexcept { return 1.0 - smooth_step(2.0 * r / R - 1.0); }

double rayleigh_jeans(const Vec3& v, double beta, double mu) noexcept { return 1.0 / (beta * norm2(v) + mu); }

DistributionField initial_condition(const InitialSpec& spec, const GridHandle& grid, std::uint64_t seed) {
  const PhaseSpaceGrid& g = *grid;
  std::function<double(const Vec3&)> fx, fv;
  if (spec.name == "gaussian") {
    fx = [&](const Vec3& x) { return std::exp(-norm2(x - spec.x0) / (2.0 * spec.s_x * spec.s_x)); };
    fv = [&](const Vec3& v) { return std::exp(-norm2(v - spec.v0) / (2.0 * spec.s_v * spec.s_v)); };
  } else if (spec.name == "bump") {
    fx = [&](const Vec3& x) { return bump(norm(x - spec.x0) / spec.s_x); };
    fv = [&](const Vec3& v) { return bump(norm(v - spec.v0) / spec.s_v); };
  } else if (spec.name == "rayleigh_jeans_cutoff") {
    if (g.x.dim() != 0) throw ConfigError("initial condition 'rayleigh_jeans_cutoff' requires grid.dim_x = 0");
    if (!(spec.beta > 0.0 && spec.mu > 0.0)) throw ConfigError("initial.beta and initial.mu must be positive");
    if (!(spec.cutoff > 0.0)) throw ConfigError("config key 'initial.cutoff': must be positive");
    fx = [](const Vec3&) { return 1.0; };
    fv = [&](const Vec3& v) { return smooth_cutoff(norm(v), spec.cutoff) * rayleigh_jeans(v, spec.beta, spec.mu); };
  } else {
    throw ConfigError("unknown initial condition '" + spec.name + "' (config key 'initial.name')");
  }
  if (g.x.dim() == 0) fx = [](const Vec3&) { return 1.0; };

  const std::size_t nx = g.x.size(), nv = g.v.size();
  std::vector<double> vv(nv);
  for (std::size_t i = 0; i < nv; ++i) vv[i] = fv(g.v.node(i));
  DistributionField f(grid, 0.0);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double ax = spec.amplitude * fx(g.x.node(ix));
    auto s = f.v_slice(ix);
    for (std::size_t i = 0; i < nv; ++i) s[i] = ax * vv[i];
  }
  if (spec.noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : f.values()) x *= 1.0 + spec.noise * u(rng);
  }
  f.nonneg_asserted = true;
  return f;
}

}  // namespace kwe
