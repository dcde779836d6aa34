#pragma once

#include <cstdint>
#include <string>

#include "kwe/phase_grid.hpp"
#include "kwe/solver.hpp"

namespace kwe {

struct InitialSpec {
  std::string name = "gaussian";
  double amplitude = 0.01;
  double s_x = 1.0;
  double s_v = 1.0;
  Vec3 x0;
  Vec3 v0;
  double beta = 1.0;
  double mu = 1.0;
  /// Velocity radius where the Rayleigh-Jeans cutoff reaches zero.
  double cutoff = 5.0;
  /// Relative amplitude of a seeded multiplicative perturbation (0 = none).
  double noise = 0.0;
};

struct OutputSpec {
  std::string directory = ".";
  std::string prefix = "kwe";
  bool write_snapshots = true;
};

struct RunConfig {
  double v_max = 6.0;
  int n_v = 17;
  int dim_x = 0;
  double x_max = 1.0;
  int n_x = 1;
  int n_polar = 8;
  int n_azimuthal = 16;
  std::uint64_t seed = 0;
  SolverConfig solver;
  InitialSpec initial;
  OutputSpec output;

  [[nodiscard]] GridHandle make_grid() const;
  [[nodiscard]] SphereQuadrature make_quadrature() const;
  /// Throws ConfigError naming the offending key path or parameter struct.
  void validate() const;
};

/// INI-style text with sections [grid], [solver], [weights], [initial], [output].
/// Unknown sections or keys are errors.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::string& path);

}  // namespace kwe
