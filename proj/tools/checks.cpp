#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "kwe/collision.hpp"
#include "kwe/errors.hpp"
#include "kwe/io.hpp"
#include "kwe/separable.hpp"
#include "kwe/transport.hpp"

namespace kwe::tools {

namespace {

Check make(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, std::isfinite(measured) && measured <= tol};
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 s{n(rng), n(rng), n(rng)};
  return (1.0 / norm(s)) * s;
}

Vec3 random_ball(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return {u(rng), u(rng), u(rng)};
}

// max |C| / max |G| over a spread of nodes, analytic profile input
double stationarity(const VelocityGrid& grid, const SphereQuadrature& q, const VelocityProfile& p) {
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < grid.size(); i += 97) nodes.push_back(i);
  const CollisionTerms t = collision_direct(CollisionInput::from_profiles(grid, p, p, p), q, kAllTerms, nodes);
  double c = 0.0, g = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    c = std::max(c, std::abs(t.gain1[i] + t.gain2[i] - t.loss1[i] - t.loss2[i]));
    g = std::max(g, std::abs(t.gain1[i] + t.gain2[i]));
  }
  return g > 0.0 ? c / g : c;
}

}  // namespace

std::vector<Check> lemma_suite(const RunConfig& cfg) {
  std::vector<Check> out;
  std::mt19937_64 rng(cfg.seed);
  const VelocityGrid grid(cfg.v_max, cfg.n_v);
  const SphereQuadrature q = cfg.make_quadrature();

  {
    const SphereQuadrature fine = make_sphere_quadrature(32, 64);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec3 v = random_ball(rng, 3.0), v1 = random_ball(rng, 3.0);
      const double gamma = (k % 3) * 1.0;
      const double ref = angular_average_reference(v, v1, gamma);
      const double num = angular_average_quadrature(v, v1, gamma, fine);
      if (ref > 0.0) worst = std::max(worst, std::abs(num - ref) / ref);
    }
    out.push_back(make("angular_average_rel_error", worst, 1e-6));
  }
  {
    double round = 0.0, pair = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Vec3 u = random_ball(rng, 4.0);
      Vec3 s = random_unit(rng);
      if (dot(u, s) < 0.0) s = -s;  // support of the cutoff
      const Vec3 nu = r_sigma(u, s);
      round = std::max(round, norm(r_sigma_inverse(nu, s) - u) / norm(u));
      const Vec3 v = random_ball(rng, 4.0), v1 = random_ball(rng, 4.0);
      const PostCollisionPair pc = post_collision(v, v1, s);
      const double scale = 1.0 + norm2(v) + norm2(v1);
      pair = std::max({pair, norm(pc.v_star + pc.v1_star - v - v1) / std::sqrt(scale),
                       std::abs(norm2(pc.v_star) + norm2(pc.v1_star) - norm2(v) - norm2(v1)) / scale,
                       std::abs(norm(pc.v_star - pc.v1_star) - norm(v - v1)) / std::sqrt(scale)});
    }
    out.push_back(make("r_sigma_round_trip", round, 1e-12));
    double jac = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec3 s = random_unit(rng);
      jac = std::max(jac, std::abs(r_sigma_jacobian(s, s) - 4.0));
    }
    out.push_back(make("r_sigma_jacobian_at_sigma_minus_4", jac, 8.0 * std::numeric_limits<double>::epsilon()));
    out.push_back(make("post_collision_invariants", pair, 1e-12));
  }
  {
    const auto F = SeparableProfile::isotropic_gaussian(0.5, {0.3, -0.2, 0.1}, 1.0).sample(grid);
    const auto G = SeparableProfile::isotropic_gaussian(0.7, {-0.4, 0.1, 0.0}, 1.2).sample(grid);
    const CollisionTerms t = collision_kernel(CollisionInput::from_grid(grid, F, G, G), q, kLoss1 | kLoss2);
    const std::vector<double> R = collision_frequency(grid, G, G, q);
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      d = std::max(d, std::abs(F[i] * R[i] - (t.loss1[i] + t.loss2[i])));
      s = std::max(s, std::abs(t.loss1[i] + t.loss2[i]));
    }
    out.push_back(make("loss_equals_f_times_frequency", s > 0.0 ? d / s : d, 1e-13));
  }
  {
    const auto F = SeparableProfile::isotropic_gaussian(0.5, {0.3, -0.2, 0.1}, 1.0);
    const auto G = SeparableProfile::isotropic_gaussian(0.7, {-0.4, 0.1, 0.0}, 1.2);
    const auto H = SeparableProfile::isotropic_gaussian(0.9, {0.0, 0.5, -0.3}, 0.8);
    const OperatorMoments a = separable_moments(grid, q, F, G, H, SeparableMode::analytic);
    const OperatorMoments b = separable_moments(grid, q, H, G, F, SeparableMode::analytic);
    out.push_back(make("l1_gain_loss_duality", std::abs(a.gain1[kMomOne] - b.loss2[kMomOne]) / b.loss2[kMomOne], 1e-2));

    const OperatorMoments m = separable_moments(grid, q, F, F, F, SeparableMode::analytic);
    const double norm = m.gain1[kMomOne] + m.gain2[kMomOne] + m.gain1[kMomEnergy] + m.gain2[kMomEnergy];
    const char* names[] = {"weak_form_phi_1", "weak_form_phi_vx", "weak_form_phi_vy", "weak_form_phi_vz",
                           "weak_form_phi_energy"};
    for (int p = 0; p < 5; ++p) {
      const double r = m.gain1[p] + m.gain2[p] - m.loss1[p] - m.loss2[p];
      out.push_back(make(names[p], std::abs(r) / norm, 1e-4));
    }
  }
  {
    const double beta = cfg.initial.beta, mu = cfg.initial.mu;
    out.push_back(make("rayleigh_jeans_stationarity",
                       stationarity(grid, q, [=](const Vec3& v) { return 1.0 / (beta * norm2(v) + mu); }), 1e-12));
    out.push_back(make("constant_stationarity", stationarity(grid, q, [](const Vec3&) { return 1.0; }), 1e-12));
  }
  return out;
}

std::vector<Check> transport_suite(const RunConfig& cfg) {
  std::vector<Check> out;
  const GridHandle g = make_grid(SpatialGrid(1, 40.0, 401), VelocityGrid(3.0, cfg.n_v));
  DistributionField f0(g);
  for (std::size_t ix = 0; ix < g->x.size(); ++ix) {
    const double x = g->x.node(ix).x;
    for (std::size_t iv = 0; iv < g->v.size(); ++iv)
      f0.at(ix, iv) = std::exp(-0.5 * x * x) * std::exp(-0.5 * norm2(g->v.node(iv)));
  }
  double drift = 0.0;
  for (double t : {0.37, 1.0, 2.5, 4.0}) {
    const DistributionField ft = apply_transport(f0, t);
    long double s0 = 0.0L, s1 = 0.0L;
    for (double x : f0.values()) s0 += x;
    for (double x : ft.values()) s1 += x;
    drift = std::max(drift, static_cast<double>(std::abs(s1 - s0) / std::abs(s0)));
  }
  out.push_back(make("interior_mass_conservation", drift, 1e-13));

  std::vector<double> times;
  for (int k = 0; k < 8; ++k) times.push_back(2.0 * std::pow(4.0, k / 7.0));
  const DecayProbe d21 = dispersive_decay_probe(f0, times, 2.0, 1.0);
  out.push_back(make("dispersive_slope_p2_r1_minus_half", std::abs(d21.slope + 0.5), 0.1));
  for (double p : {1.0, 2.0}) {
    const DecayProbe dp = dispersive_decay_probe(f0, times, p, p);
    out.push_back(make(p == 1.0 ? "dispersive_slope_p1_r1" : "dispersive_slope_p2_r2", std::abs(dp.slope), 0.02));
  }
  const double wscale = weighted_norm(f0, 4.0, NormKind::Linf_xv);
  out.push_back(
      make("weights_commute_with_transport", transport_commutes_with_weights_check(f0, 1.3, 4.0) / wscale, 1e-14));
  return out;
}

void write_checks(const std::string& path, const std::vector<Check>& checks) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << "check,measured,tolerance,pass\n";
  for (const auto& c : checks)
    f << c.name << ',' << format_double(c.measured) << ',' << format_double(c.tolerance) << ',' << (c.pass ? 1 : 0)
      << '\n';
}

}  // namespace kwe::tools
