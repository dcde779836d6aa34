#include "kwe/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kwe/errors.hpp"

namespace kwe {

namespace {

inline PostCollisionPair post_collision_unchecked(const Vec3& v, const Vec3& v1, const Vec3& sigma) {
  const Vec3 mid = 0.5 * (v + v1);
  const double r = 0.5 * norm(v - v1);
  return {mid + r * sigma, mid - r * sigma};
}

inline void neumaier(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

struct Compensated {
  double s = 0.0, c = 0.0;
  void add(double x) { neumaier(s, c, x); }
  [[nodiscard]] double value() const { return s + c; }
};

}  // namespace

PostCollisionPair post_collision(const Vec3& v, const Vec3& v1, const Vec3& sigma) {
  if (std::abs(norm(sigma) - 1.0) > 1e-12) throw DomainError("post_collision: sigma is not a unit vector");
  return post_collision_unchecked(v, v1, sigma);
}

CollisionInput CollisionInput::from_grid(const VelocityGrid& grid, std::span<const double> f,
                                         std::span<const double> g, std::span<const double> h) {
  CollisionInput in;
  in.mode = Mode::grid;
  in.grid = grid;
  in.f = f;
  in.g = g;
  in.h = h;
  in.validate();
  return in;
}

CollisionInput CollisionInput::from_profiles(const VelocityGrid& grid, VelocityProfile f, VelocityProfile g,
                                             VelocityProfile h) {
  CollisionInput in;
  in.mode = Mode::analytic;
  in.grid = grid;
  in.pf = std::move(f);
  in.pg = std::move(g);
  in.ph = std::move(h);
  in.validate();
  return in;
}

void CollisionInput::validate() const {
  if (mode == Mode::grid) {
    const std::size_t nv = grid.size();
    if (f.size() != nv || g.size() != nv || h.size() != nv)
      throw DomainError("CollisionInput: slice length does not match the velocity grid");
  } else if (!pf || !pg || !ph) {
    throw DomainError("CollisionInput: analytic mode needs three profiles");
  }
}

CollisionTerms evaluate_collision(const CollisionInput& in, const SphereQuadrature& q, unsigned request,
                                  const KernelOptions& opt) {
  if (in.mode == CollisionInput::Mode::grid) return collision_kernel(in, q, request, opt);
  return collision_direct(in, q, request);
}

CollisionTerms collision_direct(const CollisionInput& in, const SphereQuadrature& q, unsigned request,
                                std::span<const std::size_t> nodes) {
  in.validate();
  const VelocityGrid& grid = in.grid;
  const std::size_t nv = grid.size();
  const bool analytic = in.mode == CollisionInput::Mode::analytic;

  std::vector<std::size_t> all;
  if (nodes.empty()) {
    all.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) all[i] = i;
    nodes = all;
  }
  for (std::size_t i : nodes)
    if (i >= nv) throw DomainError("collision_direct: output node index out of range");

  const bool want_g1 = request & kGain1, want_g2 = request & kGain2;
  const bool want_l1 = request & kLoss1, want_l2 = request & kLoss2, want_r = request & kFrequency;
  const bool need_a = want_g1 || want_g2, need_b = want_l1 || want_r, need_c = want_l2 || want_r;

  std::vector<Vec3> vnodes(nv);
  std::vector<double> fn(nv), gn(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    vnodes[i] = grid.node(i);
    fn[i] = analytic ? in.pf(vnodes[i]) : in.f[i];
    gn[i] = analytic ? in.pg(vnodes[i]) : in.g[i];
  }
  auto eval_g = [&](const Vec3& p) { return analytic ? in.pg(p) : interpolate_velocity(grid, in.g, p); };
  auto eval_h = [&](const Vec3& p) { return analytic ? in.ph(p) : interpolate_velocity(grid, in.h, p); };

  const std::size_t m = nodes.size();
  CollisionTerms out;
  if (want_g1) out.gain1.assign(m, 0.0);
  if (want_g2) out.gain2.assign(m, 0.0);
  if (want_l1) out.loss1.assign(m, 0.0);
  if (want_l2) out.loss2.assign(m, 0.0);
  if (want_r) out.frequency.assign(m, 0.0);
  const double K = 0.25 * grid.cell_volume();

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t iv = nodes[k];
    const Vec3 v = vnodes[iv];
    Compensated sG1, sA, sB, sC;
    for (std::size_t i1 = 0; i1 < nv; ++i1) {
      const Vec3 v1 = vnodes[i1];
      const Vec3 u = v - v1;
      const double un = norm(u);
      if (un < 1e-14) continue;
      double ta = 0.0, tb = 0.0, tc = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        const Vec3& s = q.nodes[j];
        if (dot(u, s) <= 0.0) continue;
        const double c = q.weights[j] * un;
        const PostCollisionPair pc = post_collision_unchecked(v, v1, s);
        double gs = 0.0, h1s = 0.0;
        if (need_a || need_c) gs = eval_g(pc.v_star);
        if (need_a || need_b) h1s = eval_h(pc.v1_star);
        if (need_a) ta += c * gs * h1s;
        if (need_b) tb += c * h1s;
        if (need_c) tc += c * (in.g.data() == in.h.data() && !analytic ? gs : eval_h(pc.v_star));
      }
      if (need_a) {
        sG1.add(fn[i1] * ta);
        sA.add(ta);
      }
      if (need_b) sB.add(gn[i1] * tb);
      if (need_c) sC.add(gn[i1] * tc);
    }
    const double fv = fn[iv];
    if (want_g1) out.gain1[k] = K * sG1.value();
    if (want_g2) out.gain2[k] = K * fv * sA.value();
    if (want_l1) out.loss1[k] = K * fv * sB.value();
    if (want_l2) out.loss2[k] = K * fv * sC.value();
    if (want_r) out.frequency[k] = K * (sB.value() + sC.value());
  }
  return out;
}

std::vector<double> gain1(const CollisionInput& in, const SphereQuadrature& q) {
  return evaluate_collision(in, q, kGain1).gain1;
}
std::vector<double> gain2(const CollisionInput& in, const SphereQuadrature& q) {
  return evaluate_collision(in, q, kGain2).gain2;
}
std::vector<double> loss1(const CollisionInput& in, const SphereQuadrature& q) {
  return evaluate_collision(in, q, kLoss1).loss1;
}
std::vector<double> loss2(const CollisionInput& in, const SphereQuadrature& q) {
  return evaluate_collision(in, q, kLoss2).loss2;
}

std::vector<double> collision_frequency(const VelocityGrid& grid, std::span<const double> g,
                                        std::span<const double> h, const SphereQuadrature& q) {
  return collision_kernel(CollisionInput::from_grid(grid, g, g, h), q, kFrequency).frequency;
}

namespace {

bool is_zero(std::span<const double> s) {
  return std::all_of(s.begin(), s.end(), [](double x) { return x == 0.0; });
}

}  // namespace

FieldCollision collision_split(const DistributionField& f, const SphereQuadrature& q, const KernelOptions& opt) {
  const auto& grid = f.grid();
  FieldCollision out{DistributionField(f.grid_handle(), f.time), DistributionField(f.grid_handle(), f.time),
                     DistributionField(f.grid_handle(), f.time)};
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const auto s = f.v_slice(ix);
    if (is_zero(s)) continue;
    const CollisionTerms t = collision_kernel(CollisionInput::from_grid(grid.v, s, s, s), q, kAllTerms, opt);
    auto gain = out.gain.v_slice(ix);
    auto loss = out.loss.v_slice(ix);
    auto freq = out.frequency.v_slice(ix);
    for (std::size_t i = 0; i < s.size(); ++i) {
      gain[i] = t.gain1[i] + t.gain2[i];
      loss[i] = t.loss1[i] + t.loss2[i];
      freq[i] = t.frequency[i];
    }
  }
  return out;
}

DistributionField collision_full(const DistributionField& f, const SphereQuadrature& q, const KernelOptions& opt) {
  const auto& grid = f.grid();
  DistributionField out(f.grid_handle(), f.time);
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const auto s = f.v_slice(ix);
    if (is_zero(s)) continue;
    const CollisionTerms t =
        collision_kernel(CollisionInput::from_grid(grid.v, s, s, s), q, kGain1 | kGain2 | kLoss1 | kLoss2, opt);
    auto o = out.v_slice(ix);
    for (std::size_t i = 0; i < s.size(); ++i) o[i] = (t.gain1[i] + t.gain2[i]) - (t.loss1[i] + t.loss2[i]);
  }
  return out;
}

DistributionField gain_full(const DistributionField& f, const SphereQuadrature& q, const KernelOptions& opt) {
  const auto& grid = f.grid();
  DistributionField out(f.grid_handle(), f.time);
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const auto s = f.v_slice(ix);
    if (is_zero(s)) continue;
    const CollisionTerms t = collision_kernel(CollisionInput::from_grid(grid.v, s, s, s), q, kGain1 | kGain2, opt);
    auto o = out.v_slice(ix);
    for (std::size_t i = 0; i < s.size(); ++i) o[i] = t.gain1[i] + t.gain2[i];
  }
  return out;
}

DistributionField frequency_full(const DistributionField& g, const SphereQuadrature& q, const KernelOptions& opt) {
  const auto& grid = g.grid();
  DistributionField out(g.grid_handle(), g.time);
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const auto s = g.v_slice(ix);
    if (is_zero(s)) continue;
    const CollisionTerms t = collision_kernel(CollisionInput::from_grid(grid.v, s, s, s), q, kFrequency, opt);
    std::copy(t.frequency.begin(), t.frequency.end(), out.v_slice(ix).begin());
  }
  return out;
}

double test_function(TestFunction phi, const Vec3& v) noexcept {
  switch (phi) {
    case TestFunction::one:
      return 1.0;
    case TestFunction::vx:
      return v.x;
    case TestFunction::vy:
      return v.y;
    case TestFunction::vz:
      return v.z;
    case TestFunction::energy:
      return norm2(v);
  }
  return 0.0;
}

double weak_form_residual(const DistributionField& f, TestFunction phi, const SphereQuadrature& q) {
  const DistributionField c = collision_full(f, q);
  const auto& grid = f.grid();
  const std::size_t nv = grid.v.size();
  std::vector<double> w(nv);
  for (std::size_t i = 0; i < nv; ++i) w[i] = test_function(phi, grid.v.node(i));
  double acc = 0.0;
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const auto s = c.v_slice(ix);
    for (std::size_t i = 0; i < nv; ++i) acc += w[i] * s[i];
  }
  return acc * grid.cell_measure();
}

double angular_average_reference(const Vec3& v, const Vec3& v1, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0)) throw DomainError("angular_average_reference: gamma must lie in [0, 2]");
  const Vec3 u = v - v1;
  const Vec3 V = 0.5 * (v + v1);
  const double un = norm(u);
  const double a = 1.0 + 0.5 * (norm2(v) + norm2(v1));
  const double c = un * norm(V);
  double I;
  if (c < 1e-8) {
    I = 4.0 * std::numbers::pi * std::pow(a, -1.5);
  } else {
    // (4 pi / c) [(a-c)^{-1/2} - (a+c)^{-1/2}] without the cancellation
    const double sm = std::sqrt(a - c), sp = std::sqrt(a + c);
    I = 8.0 * std::numbers::pi / (sm * sp * (sm + sp));
  }
  return (gamma == 0.0 ? 1.0 : std::pow(un, gamma)) * I;
}

double angular_average_quadrature(const Vec3& v, const Vec3& v1, double gamma, const SphereQuadrature& q) {
  if (!(gamma >= 0.0 && gamma <= 2.0)) throw DomainError("angular_average_quadrature: gamma must lie in [0, 2]");
  const double un = norm(v - v1);
  const double I = q.integrate([&](const Vec3& s) {
    const PostCollisionPair pc = post_collision_unchecked(v, v1, s);
    const double b2 = 1.0 + norm2(pc.v_star);
    return 1.0 / (b2 * std::sqrt(b2));
  });
  return (gamma == 0.0 ? 1.0 : std::pow(un, gamma)) * I;
}

Vec3 r_sigma(const Vec3& u, const Vec3& sigma) { return 0.5 * u + (0.5 * norm(u)) * sigma; }

Vec3 r_sigma_inverse(const Vec3& nu, const Vec3& sigma) {
  const double sn = dot(sigma, nu);
  if (!(sn > 0.0)) throw DomainError("r_sigma_inverse: requires nu . sigma > 0");
  return 2.0 * nu - (norm2(nu) / sn) * sigma;
}

double r_sigma_jacobian(const Vec3& nu, const Vec3& sigma) {
  const double sn = dot(sigma, nu);
  if (!(sn > 0.0)) throw DomainError("r_sigma_jacobian: requires nu . sigma > 0");
  return 4.0 * norm2(nu) / (sn * sn);
}

MonteCarloEstimate monte_carlo_oracle(const CollisionInput& in, std::size_t n_samples, std::uint64_t seed,
                                      unsigned request, std::span<const std::size_t> nodes) {
  in.validate();
  if (n_samples < 1000) throw DomainError("monte_carlo_oracle: n_samples must be >= 1000");
  const VelocityGrid& grid = in.grid;
  const std::size_t nv = grid.size();
  const bool analytic = in.mode == CollisionInput::Mode::analytic;
  std::vector<std::size_t> all;
  if (nodes.empty()) {
    all.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) all[i] = i;
    nodes = all;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-grid.v_max(), grid.v_max());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> v1s(n_samples), sig(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    v1s[k] = {box(rng), box(rng), box(rng)};
    Vec3 s{normal(rng), normal(rng), normal(rng)};
    sig[k] = (1.0 / norm(s)) * s;
  }
  auto ev = [&](const VelocityProfile& p, std::span<const double> sl, const Vec3& x) {
    return analytic ? p(x) : interpolate_velocity(grid, sl, x);
  };
  std::vector<double> f1(n_samples), g1(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    f1[k] = ev(in.pf, in.f, v1s[k]);
    g1[k] = ev(in.pg, in.g, v1s[k]);
  }

  const double L = 2.0 * grid.v_max();
  // 1/4 * |box| * |S^2|
  const double scale = 0.25 * L * L * L * 4.0 * std::numbers::pi;
  const std::size_t m = nodes.size();
  MonteCarloEstimate est;
  est.n_samples = n_samples;
  auto init = [&](CollisionTerms& t) {
    if (request & kGain1) t.gain1.assign(m, 0.0);
    if (request & kGain2) t.gain2.assign(m, 0.0);
    if (request & kLoss1) t.loss1.assign(m, 0.0);
    if (request & kLoss2) t.loss2.assign(m, 0.0);
    if (request & kFrequency) t.frequency.assign(m, 0.0);
  };
  init(est.mean);
  init(est.std_error);
  const double N = static_cast<double>(n_samples);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3 v = grid.node(nodes[k]);
    const double fv = analytic ? in.pf(v) : in.f[nodes[k]];
    double s[5] = {0, 0, 0, 0, 0}, s2[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < n_samples; ++i) {
      const Vec3 u = v - v1s[i];
      const double un = norm(u);
      double x[5] = {0, 0, 0, 0, 0};
      if (un >= 1e-14 && dot(u, sig[i]) > 0.0) {
        const PostCollisionPair pc = post_collision_unchecked(v, v1s[i], sig[i]);
        const double gs = ev(in.pg, in.g, pc.v_star);
        const double hs = ev(in.ph, in.h, pc.v_star);
        const double h1s = ev(in.ph, in.h, pc.v1_star);
        x[0] = un * f1[i] * gs * h1s;
        x[1] = un * fv * gs * h1s;
        x[2] = un * fv * g1[i] * h1s;
        x[3] = un * fv * g1[i] * hs;
        x[4] = un * g1[i] * (h1s + hs);
      }
      for (int t = 0; t < 5; ++t) {
        s[t] += x[t];
        s2[t] += x[t] * x[t];
      }
    }
    double mean[5], se[5];
    for (int t = 0; t < 5; ++t) {
      const double mu = s[t] / N;
      const double var = std::max(0.0, s2[t] / N - mu * mu);
      mean[t] = scale * mu;
      se[t] = scale * std::sqrt(var / (N - 1.0));
    }
    if (request & kGain1) est.mean.gain1[k] = mean[0], est.std_error.gain1[k] = se[0];
    if (request & kGain2) est.mean.gain2[k] = mean[1], est.std_error.gain2[k] = se[1];
    if (request & kLoss1) est.mean.loss1[k] = mean[2], est.std_error.loss1[k] = se[2];
    if (request & kLoss2) est.mean.loss2[k] = mean[3], est.std_error.loss2[k] = se[3];
    if (request & kFrequency) est.mean.frequency[k] = mean[4], est.std_error.frequency[k] = se[4];
  }
  return est;
}

}  // namespace kwe
