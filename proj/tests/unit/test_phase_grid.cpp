#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kwe/errors.hpp"
#include "kwe/phase_grid.hpp"

using namespace kwe;

TEST(VelocityGrid, RejectsEvenOrTinyAxes) {
  EXPECT_THROW(VelocityGrid(1.0, 4), ConfigError);
  EXPECT_THROW(VelocityGrid(1.0, 1), ConfigError);
  EXPECT_THROW(VelocityGrid(-1.0, 5), ConfigError);
}

TEST(VelocityGrid, NodesAreSymmetric) {
  const VelocityGrid g(3.0, 7);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  for (int i = 0; i < g.n(); ++i) EXPECT_EQ(g.coordinate(i), -g.coordinate(g.n() - 1 - i));
  EXPECT_EQ(g.coordinate(3), 0.0);
  const Vec3 v = g.node(g.index(6, 0, 2));
  EXPECT_EQ(v, (Vec3{3.0, -3.0, -1.0}));
}

TEST(SpatialGrid, HomogeneousModeHasUnitMeasure) {
  const SpatialGrid x;
  EXPECT_EQ(x.dim(), 0);
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(x.cell_measure(), 1.0);
  EXPECT_THROW(SpatialGrid(2, 1.0, 4), ConfigError);
}

TEST(WeightParams, Validation) {
  WeightParams w;
  EXPECT_NO_THROW(w.validate());
  w.alpha = w.M;
  try {
    w.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("WeightParams"), std::string::npos);
  }
  w = {};
  w.M = 8.0;
  EXPECT_THROW(w.validate(), ConfigError);
  w = {};
  w.alpha = 2.5;
  EXPECT_THROW(w.validate(), ConfigError);
}

TEST(SphereQuadrature, IntegratesLowDegreeExactly) {
  const SphereQuadrature q = make_sphere_quadrature(8, 16);
  EXPECT_NEAR(q.integrate([](const Vec3&) { return 1.0; }), 4.0 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(q.integrate([](const Vec3& s) { return s.x * s.x; }), 4.0 * std::numbers::pi / 3.0, 1e-13);
  EXPECT_NEAR(q.integrate([](const Vec3& s) { return s.x * s.y * s.z; }), 0.0, 1e-14);
  EXPECT_NEAR(q.integrate([](const Vec3& s) { return std::pow(s.z, 4); }), 4.0 * std::numbers::pi / 5.0, 1e-13);
  EXPECT_GE(q.degree(), 7);
}

TEST(SphereQuadrature, NodesComeInAntipodalPairs) {
  const SphereQuadrature q = make_sphere_quadrature(4, 8);
  for (const Vec3& s : q.nodes) {
    EXPECT_NEAR(norm(s), 1.0, 1e-15);
    bool found = false;
    for (const Vec3& t : q.nodes) found = found || t == -s;
    EXPECT_TRUE(found);
  }
}

TEST(SphereQuadrature, RejectsBadCounts) {
  EXPECT_THROW(make_sphere_quadrature(1, 8), ConfigError);
  EXPECT_THROW(make_sphere_quadrature(4, 7), ConfigError);
}

TEST(MixedNorm, SingleCellIndicator) {
  const GridHandle g = make_grid(SpatialGrid(1, 2.0, 5), VelocityGrid(2.0, 5));
  DistributionField f(g);
  const std::size_t iv = g->v.index(3, 2, 2);
  f.at(2, iv) = 2.0;
  const double dx = g->x.cell_measure(), dv = g->v.cell_volume();
  EXPECT_DOUBLE_EQ(mixed_norm(f, 0.0, 1.0, 1.0), 2.0 * dx * dv);
  EXPECT_DOUBLE_EQ(mixed_norm(f, 0.0, INFINITY, INFINITY), 2.0);
  EXPECT_DOUBLE_EQ(mixed_norm(f, 0.0, 2.0, 1.0), std::sqrt(dx) * 2.0 * dv);
  const double w = std::sqrt(1.0 + norm2(g->v.node(iv)));
  EXPECT_NEAR(weighted_norm(f, 3.0, NormKind::Linf_xv), 2.0 * w * w * w, 1e-14);
}

TEST(Interpolation, ReproducesLinearFunctions) {
  const VelocityGrid g(2.0, 5);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 v = g.node(i);
    s[i] = 1.0 + 2.0 * v.x - v.y + 0.5 * v.z;
  }
  for (const Vec3 p : {Vec3{0.3, -1.2, 1.9}, Vec3{-2.0, 2.0, 0.0}, Vec3{1.99, 0.01, -0.7}})
    EXPECT_NEAR(interpolate_velocity(g, s, p), 1.0 + 2.0 * p.x - p.y + 0.5 * p.z, 1e-13);
  EXPECT_EQ(interpolate_velocity(g, s, {2.5, 0.0, 0.0}), 0.0);
}

TEST(DistributionField, AxpyAndScale) {
  const GridHandle g = make_grid(SpatialGrid(), VelocityGrid(1.0, 3));
  DistributionField a(g), b(g);
  for (auto& x : b.values()) x = 1.5;
  a.axpy(2.0, b).scale(0.5);
  for (double x : a.values()) EXPECT_EQ(x, 1.5);
  EXPECT_EQ(a.max_abs(), 1.5);
  const GridHandle h = make_grid(SpatialGrid(), VelocityGrid(1.0, 5));
  DistributionField c(h);
  EXPECT_THROW(a.axpy(1.0, c), DomainError);
}
