#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "kwe/config.hpp"
#include "kwe/errors.hpp"
#include "kwe/initial_conditions.hpp"
#include "kwe/io.hpp"

using namespace kwe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "kwe_unit_io";
  fs::create_directories(d);
  return d / name;
}

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Csv, HeaderIsExact) {
  const fs::path p = scratch("empty.csv");
  write_csv(p.string(), std::vector<NormReport>{});
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line,
            "time,l1_xv,linfM_xv,linfx_l2v_alpha,l2x_l1v_w,mass,px,py,pz,energy,momentN,min_value,"
            "boundary_mass_lost");
}

TEST(Csv, RoundTripIsBitwise) {
  NormReport r;
  r.time = 0.1;
  r.l1_xv = 1.0 / 3.0;
  r.linfM_xv = 6.02214076e23;
  r.momentum = {-1e-300, 2.0 / 7.0, 0.0};
  r.min_value = -5e-324;
  r.energy = std::nextafter(1.0, 2.0);
  const fs::path p = scratch("one.csv");
  write_csv(p.string(), std::vector<NormReport>{r, r});
  const auto back = read_csv(p.string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].time, r.time);
  EXPECT_EQ(back[1].l1_xv, r.l1_xv);
  EXPECT_EQ(back[1].linfM_xv, r.linfM_xv);
  EXPECT_EQ(back[1].momentum, r.momentum);
  EXPECT_EQ(back[1].min_value, r.min_value);
  EXPECT_EQ(back[1].energy, r.energy);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Snapshot, RoundTripIsBitwise) {
  const auto g = make_grid(SpatialGrid(1, 1.5, 4), VelocityGrid(2.0, 3));
  DistributionField f(g, 0.75);
  for (std::size_t i = 0; i < f.values().size(); ++i) f.values()[i] = std::sin(1.0 + i) / 3.0;
  const fs::path p = scratch("f.bin");
  write_snapshot(p.string(), f);
  EXPECT_EQ(fs::file_size(p), 4 + 3 * 4 + 3 * 8 + f.values().size() * 8);
  const DistributionField h = read_snapshot(p.string());
  EXPECT_EQ(h.grid(), f.grid());
  EXPECT_EQ(h.time, 0.75);
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_EQ(h.values()[i], f.values()[i]);
}

TEST(Snapshot, RejectsBadMagicAndTruncation) {
  const auto g = make_grid(SpatialGrid(), VelocityGrid(1.0, 3));
  const fs::path p = scratch("g.bin");
  write_snapshot(p.string(), DistributionField(g));
  fs::resize_file(p, fs::file_size(p) - 3);
  EXPECT_THROW((void)read_snapshot(p.string()), DomainError);
  {
    std::ofstream o(p, std::ios::binary);
    o << "KWE2 and some more bytes to pass the length check";
  }
  EXPECT_THROW((void)read_snapshot(p.string()), DomainError);
  EXPECT_THROW((void)read_snapshot(scratch("missing.bin").string()), Error);
}

TEST(Config, ParsesKnownKeys) {
  const RunConfig c = parse_config(
      "[grid]\nv_max = 4\nn_v = 9\ndim_x = 1\nx_max = 3\nn_x = 16\n"
      "[solver]\ndt = 0.05\nt_end = 1\ngain_only = true\nseed = 42\n"
      "[weights]\nM = 10\nalpha = 5\n"
      "[initial]\nname = bump\namplitude = 1e-3\nv0x = 0.5\n"
      "[output]\nprefix = demo\nwrite_snapshots = false\n");
  EXPECT_EQ(c.v_max, 4.0);
  EXPECT_EQ(c.n_v, 9);
  EXPECT_EQ(c.dim_x, 1);
  EXPECT_EQ(c.n_x, 16);
  EXPECT_EQ(c.solver.dt, 0.05);
  EXPECT_TRUE(c.solver.gain_only);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.solver.weights.M, 10.0);
  EXPECT_EQ(c.initial.name, "bump");
  EXPECT_EQ(c.initial.v0.x, 0.5);
  EXPECT_EQ(c.output.prefix, "demo");
  EXPECT_FALSE(c.output.write_snapshots);
}

TEST(Config, UnknownKeyNamesItsPath) {
  EXPECT_NE(error_of("[solver]\ndtt = 0.1\n").find("solver.dtt"), std::string::npos);
  EXPECT_NE(error_of("[colour]\nred = 1\n").find("colour.red"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nn_v = nine\n").find("grid.n_v"), std::string::npos);
}

TEST(Config, InvalidWeightsNameTheParameterStruct) {
  const std::string e = error_of("[weights]\nM = 9\nalpha = 9\n");
  EXPECT_NE(e.find("WeightParams"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nn_v = 8\n").find("grid.n_v"), std::string::npos);
}

TEST(InitialCondition, GaussianMassMatchesClosedForm) {
  InitialSpec s;
  s.amplitude = 0.3;
  s.s_x = 1.2;
  s.s_v = 0.9;
  const auto g = make_grid(SpatialGrid(1, 9.0, 73), VelocityGrid(6.0, 25));
  const DistributionField f = initial_condition(s, g);
  double m = 0.0;
  for (double x : f.values()) m += x;
  m *= g->cell_measure();
  const double expected = 0.3 * std::sqrt(2.0 * std::numbers::pi) * 1.2 * std::pow(2.0 * std::numbers::pi, 1.5) *
                          std::pow(0.9, 3);
  EXPECT_NEAR(m, expected, 1e-7 * expected);
}

TEST(InitialCondition, ZeroAmplitudeAndLinearScaling) {
  InitialSpec s;
  const auto g = make_grid(SpatialGrid(1, 3.0, 9), VelocityGrid(2.0, 5));
  s.amplitude = 0.0;
  EXPECT_EQ(initial_condition(s, g).max_abs(), 0.0);
  s.amplitude = 0.01;
  const NormReport a = report(initial_condition(s, g), WeightParams{});
  s.amplitude = 0.04;
  const NormReport b = report(initial_condition(s, g), WeightParams{});
  EXPECT_NEAR(b.l1_xv, 4.0 * a.l1_xv, 1e-15);
  EXPECT_NEAR(b.linfM_xv, 4.0 * a.linfM_xv, 1e-12 * b.linfM_xv);
  EXPECT_NEAR(b.l2x_l1v_w, 4.0 * a.l2x_l1v_w, 1e-15);
}

TEST(InitialCondition, UnknownNameAndShapes) {
  InitialSpec s;
  const auto g = make_grid(SpatialGrid(), VelocityGrid(5.0, 11));
  s.name = "maxwellian";
  EXPECT_THROW((void)initial_condition(s, g), ConfigError);
  s.name = "bump";
  s.s_v = 2.0;
  const DistributionField b = initial_condition(s, g);
  EXPECT_DOUBLE_EQ(b.values()[g->v.index(5, 5, 5)], s.amplitude);
  EXPECT_EQ(b.values()[g->v.index(7, 5, 5)], 0.0);
  s.name = "rayleigh_jeans_cutoff";
  const DistributionField r = initial_condition(s, g);
  EXPECT_DOUBLE_EQ(r.values()[g->v.index(6, 5, 5)], s.amplitude / 2.0);
  EXPECT_EQ(r.values()[g->v.index(10, 5, 5)], 0.0);
  EXPECT_THROW((void)initial_condition(s, make_grid(SpatialGrid(1, 1.0, 3), VelocityGrid(1.0, 3))), ConfigError);
}

TEST(InitialCondition, NoiseIsSeeded) {
  InitialSpec s;
  s.noise = 1e-3;
  const auto g = make_grid(SpatialGrid(), VelocityGrid(1.0, 3));
  const DistributionField a = initial_condition(s, g, 7), b = initial_condition(s, g, 7),
                          c = initial_condition(s, g, 8);
  EXPECT_EQ(a.values()[4], b.values()[4]);
  EXPECT_NE(a.values()[4], c.values()[4]);
}

TEST(SmoothCutoff, Profile) {
  EXPECT_EQ(smooth_cutoff(1.0, 4.0), 1.0);
  EXPECT_EQ(smooth_cutoff(4.0, 4.0), 0.0);
  EXPECT_NEAR(smooth_cutoff(3.0, 4.0), 0.5, 1e-15);
}
