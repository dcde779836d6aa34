#include <gtest/gtest.h>

#include <cmath>

#include "kwe/errors.hpp"
#include "kwe/separable.hpp"
#include "kwe/solver.hpp"

using namespace kwe;

namespace {

GridHandle small_grid() { return make_grid(SpatialGrid(), VelocityGrid(2.0, 5)); }

DistributionField gaussian(const GridHandle& g, double a) {
  DistributionField f(g);
  const auto s = SeparableProfile::isotropic_gaussian(a, {0.2, -0.1, 0.0}, 0.8).sample(g->v);
  for (std::size_t ix = 0; ix < g->x.size(); ++ix)
    for (std::size_t iv = 0; iv < s.size(); ++iv) f.at(ix, iv) = s[iv];
  return f;
}

SolverConfig short_run() {
  SolverConfig c;
  c.t_end = 0.4;
  c.dt = 0.1;
  return c;
}

}  // namespace

TEST(UniformTimes, EndpointsAndSpacing) {
  const auto t = uniform_times(1.0, 0.25);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_EQ(t[2], 0.5);
  EXPECT_THROW((void)uniform_times(1.0, 0.3), ConfigError);
  EXPECT_THROW((void)uniform_times(1.0, 0.0), ConfigError);
}

TEST(SolverConfig, RejectsInvalidFields) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dt = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.picard_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.snapshot_stride = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.weights.alpha = 9.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Run, ZeroDataStaysZero) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(2, 4);
  const Trajectory tr = run(DistributionField(g), short_run(), q);
  ASSERT_EQ(tr.snapshots.size(), 5u);
  for (const auto& s : tr.snapshots) EXPECT_EQ(s.max_abs(), 0.0);
  EXPECT_EQ(tr.reports.size(), tr.snapshots.size());
}

TEST(Run, SnapshotStrideAndBackwardTimes) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(2, 4);
  SolverConfig c = short_run();
  c.snapshot_stride = 2;
  const Trajectory fw = run(gaussian(g, 0.01), c, q);
  ASSERT_EQ(fw.snapshots.size(), 3u);
  EXPECT_NEAR(fw.snapshots[1].time, 0.2, 1e-15);
  const Trajectory bw = run_backward(gaussian(g, 0.01), c, q);
  ASSERT_EQ(bw.snapshots.size(), 3u);
  EXPECT_EQ(bw.snapshots[0].time, 0.0);
  EXPECT_NEAR(bw.snapshots[2].time, -0.4, 1e-15);
}

TEST(Run, ForwardThenBackwardReturnsClose) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(2, 4);
  const DistributionField f0 = gaussian(g, 0.05);
  const Trajectory fw = run(f0, short_run(), q);
  const Trajectory bw = run_backward(fw.back(), short_run(), q);
  double d = 0.0;
  for (std::size_t i = 0; i < f0.values().size(); ++i)
    d = std::max(d, std::abs(bw.back().values()[i] - f0.values()[i]));
  EXPECT_LE(d, 1e-6 * f0.max_abs());
}

TEST(Duhamel, ConstantRateDecaysExponentially) {
  const auto g = small_grid();
  DistributionField f0(g);
  for (auto& x : f0.values()) x = 2.0;
  const auto t = uniform_times(1.0, 0.125);
  std::vector<DistributionField> src(t.size(), DistributionField(g)), rate;
  for (double tk : t) {
    DistributionField r(g, tk);
    for (auto& x : r.values()) x = 0.7;
    rate.push_back(r);
  }
  const auto out = duhamel_with_damping(f0, t, src, rate);
  for (std::size_t k = 0; k < t.size(); ++k)
    for (double x : out[k].values()) EXPECT_NEAR(x, 2.0 * std::exp(-0.7 * t[k]), 1e-14);
}

TEST(Duhamel, ConstantSourceGrowsLinearly) {
  const auto g = small_grid();
  const DistributionField f0(g);
  const auto t = uniform_times(1.0, 0.25);
  std::vector<DistributionField> src;
  for (std::size_t k = 0; k < t.size(); ++k) {
    DistributionField s(g);
    for (auto& x : s.values()) x = 3.0;
    src.push_back(s);
  }
  const auto out = duhamel_with_damping(f0, t, src);
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(out[k].values()[0], 3.0 * t[k], 1e-14);
  EXPECT_THROW((void)duhamel_with_damping(f0, t, std::span(src).first(2)), DomainError);
}

TEST(Picard, ZeroDataConvergesImmediately) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(2, 4);
  const PicardResult r = picard_solve(DistributionField(g), 0.4, short_run(), q);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_THROW((void)picard_solve(DistributionField(g), 5.0, short_run(), q), DomainError);
}

TEST(Picard, AgreesWithStrangForSmallData) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(4, 8);
  SolverConfig c = short_run();
  c.picard_tol = 1e-18;
  const DistributionField f0 = gaussian(g, 0.05);
  const PicardResult p = picard_solve(f0, 0.4, c, q);
  const Trajectory s = run(f0, c, q);
  EXPECT_TRUE(p.report.converged);
  EXPECT_LT(p.report.contraction, 0.1);
  EXPECT_LE(trajectory_sup_difference(p.trajectory, s, 0.0), 1e-4 * f0.max_abs());
}

TEST(GainOnly, MonotoneAndNonnegative) {
  const auto g = small_grid();
  const SphereQuadrature q = make_sphere_quadrature(4, 8);
  SolverConfig c = short_run();
  c.picard_tol = 1e-18;
  const DistributionField f0 = gaussian(g, 0.2);
  const GainOnlyResult r = gain_only_solve(f0, c, q);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.max_monotonicity_violation, 0.0);
  for (const auto& s : r.trajectory.snapshots) EXPECT_GE(s.min_value(), 0.0);
  for (std::size_t i = 0; i < f0.values().size(); ++i) EXPECT_GE(r.trajectory.back().values()[i], f0.values()[i]);
  DistributionField neg = f0;
  neg.values()[0] = -1.0;
  EXPECT_THROW((void)gain_only_solve(neg, c, q), DomainError);
}

TEST(Step, NonFiniteInputRaisesInstability) {
  const auto g = small_grid();
  DistributionField f = gaussian(g, 0.1);
  f.values()[3] = std::nan("");
  EXPECT_THROW((void)step_strang(f, 0.1, make_sphere_quadrature(2, 4)), InstabilityError);
}
