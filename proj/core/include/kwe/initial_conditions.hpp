#pragma once

#include <cstdint>

#include "kwe/config.hpp"
#include "kwe/phase_grid.hpp"

namespace kwe {

/// Samples the named initial condition on `grid`:
///   gaussian: a exp(-|x-x0|^2 / 2 s_x^2) exp(-|v-v0|^2 / 2 s_v^2)
///   bump: a b(|x-x0| / s_x) b(|v-v0| / s_v), b(r) = exp(1 - 1/(1-r^2)) for r < 1
///   rayleigh_jeans_cutoff: a chi(|v|) / (beta |v|^2 + mu), homogeneous only
/// The x factor is 1 when dim = 0. A positive `noise` multiplies every value
/// by (1 + noise * U(-1, 1)) drawn from a generator seeded with `seed`.
/// Throws ConfigError for unknown names.
[[nodiscard]] DistributionField initial_condition(const InitialSpec& spec, const GridHandle& grid,
                                                  std::uint64_t seed = 0);

/// Smooth radial cutoff: 1 for r <= R/2, 0 for r >= R.
[[nodiscard]] double smooth_cutoff(double r, double R) noexcept;

/// 1 / (beta |v|^2 + mu).
[[nodiscard]] double rayleigh_jeans(const Vec3& v, double beta, double mu) noexcept;

}  // namespace kwe
