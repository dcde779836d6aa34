#pragma once

#include <array>
#include <vector>

#include "kwe/phase_grid.hpp"

namespace kwe {

/// One axis of a separable velocity profile: either an analytic Gaussian
/// a exp(-(x-c)^2 / 2w^2) or samples on the velocity-grid nodes.
struct Factor1D {
  enum class Kind { gaussian, sampled };

  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  std::vector<double> samples;

  [[nodiscard]] static Factor1D gaussian(double amplitude, double center, double width);
  [[nodiscard]] static Factor1D sampled(std::vector<double> samples);

  /// Analytic value (gaussian) or hat-function interpolation with zero
  /// outside the sampled range (sampled; needs the grid's node spacing).
  [[nodiscard]] double operator()(double x, const VelocityGrid& grid) const;
};

/// f(v) = fx(v_x) fy(v_y) fz(v_z).
struct SeparableProfile {
  std::array<Factor1D, 3> axis;

  [[nodiscard]] static SeparableProfile isotropic_gaussian(double amplitude, const Vec3& center, double width);
  [[nodiscard]] double operator()(const Vec3& v, const VelocityGrid& grid) const;
  [[nodiscard]] std::vector<double> sample(const VelocityGrid& grid) const;
  /// Replaces every factor by its node samples.
  [[nodiscard]] SeparableProfile sampled_on(const VelocityGrid& grid) const;
};

/// Index into a moment array: phi = 1, v_x, v_y, v_z, |v|^2.
enum MomentIndex { kMomOne = 0, kMomVx = 1, kMomVy = 2, kMomVz = 3, kMomEnergy = 4 };

/// sum_v phi(v) Op[f,g,h](v) dv for each operator, evaluated exactly as the
/// grid-mode kernel would (sampled factors, hat interpolation, zero outside
/// the box) or with analytic off-grid values.
struct OperatorMoments {
  std::array<double, 5> gain1{}, gain2{}, loss1{}, loss2{};
};

enum class SeparableMode { grid, analytic };

/// Factorized evaluation: for fixed (v - v1, sigma) the cutoff and the
/// interpolation stencil are constant, so the sum over v1 splits into a
/// product of one-dimensional sums. Cost O((2n-1)^3 N_sigma n).
/// In grid mode every factor must be of kind `sampled` on `grid`.
[[nodiscard]] OperatorMoments separable_moments(const VelocityGrid& grid, const SphereQuadrature& q,
                                                const SeparableProfile& f, const SeparableProfile& g,
                                                const SeparableProfile& h, SeparableMode mode);

}  // namespace kwe
