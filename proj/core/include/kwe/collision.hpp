#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kwe/phase_grid.hpp"

namespace kwe {

struct PostCollisionPair {
  Vec3 v_star;
  Vec3 v1_star;
};

/// v* = (v+v1)/2 + |v-v1| sigma/2, v1* = (v+v1)/2 - |v-v1| sigma/2.
/// Throws DomainError unless |sigma| = 1 within 1e-12.
[[nodiscard]] PostCollisionPair post_collision(const Vec3& v, const Vec3& v1, const Vec3& sigma);

/// Cutoff b(s): 1 for s > 0, else 0.
[[nodiscard]] constexpr double cutoff(double s) noexcept { return s > 0.0 ? 1.0 : 0.0; }

using VelocityProfile = std::function<double(const Vec3&)>;

/// The triple (f, g, h) of the multilinear operators. Grid mode reads
/// v-slices and interpolates off-grid; analytic mode calls the profiles
/// at the exact post-collision points. Output and v1 nodes are always the
/// nodes of `grid`.
struct CollisionInput {
  enum class Mode { grid, analytic };

  Mode mode = Mode::grid;
  VelocityGrid grid{1.0, 3};
  std::span<const double> f, g, h;
  VelocityProfile pf, pg, ph;

  [[nodiscard]] static CollisionInput from_grid(const VelocityGrid& grid, std::span<const double> f,
                                                std::span<const double> g, std::span<const double> h);
  [[nodiscard]] static CollisionInput from_profiles(const VelocityGrid& grid, VelocityProfile f, VelocityProfile g,
                                                    VelocityProfile h);
  /// Throws DomainError when a slice length differs from grid.size() or a profile is empty.
  void validate() const;
};

/// Bit set selecting the terms an evaluation produces.
enum Term : unsigned {
  kGain1 = 1u,
  kGain2 = 2u,
  kLoss1 = 4u,
  kLoss2 = 8u,
  kFrequency = 16u,
  kAllTerms = 31u,
};

/// Per-node values of G1[f,g,h], G2[f,g,h], L1[f,g,h], L2[f,g,h] and R[g,h].
/// Vectors for terms that were not requested are empty.
struct CollisionTerms {
  std::vector<double> gain1, gain2, loss1, loss2, frequency;
};

struct KernelOptions {
  /// Neumaier-compensated accumulation over v1; off only for benchmarking.
  bool compensated = true;
};

/// Dispatch: the shift-structured kernel for grid input, the direct
/// evaluator for analytic input.
[[nodiscard]] CollisionTerms evaluate_collision(const CollisionInput& in, const SphereQuadrature& q,
                                                unsigned request = kAllTerms, const KernelOptions& opt = {});

/// Shift-structured kernel (grid mode only). Parallel over output z-planes;
/// the summation order per output node does not depend on the thread count.
[[nodiscard]] CollisionTerms collision_kernel(const CollisionInput& in, const SphereQuadrature& q,
                                              unsigned request = kAllTerms, const KernelOptions& opt = {});

/// Straightforward loop over (v, v1, sigma) using post_collision and
/// pointwise evaluation. If `nodes` is non-empty only those output nodes
/// are evaluated and result vectors have nodes.size() entries.
[[nodiscard]] CollisionTerms collision_direct(const CollisionInput& in, const SphereQuadrature& q,
                                              unsigned request = kAllTerms, std::span<const std::size_t> nodes = {});

/// Number of (v, v1, sigma) triples with b = 1 visited by one kernel call.
[[nodiscard]] std::uint64_t kernel_active_triples(const VelocityGrid& grid, const SphereQuadrature& q);

[[nodiscard]] std::vector<double> gain1(const CollisionInput& in, const SphereQuadrature& q);
[[nodiscard]] std::vector<double> gain2(const CollisionInput& in, const SphereQuadrature& q);
[[nodiscard]] std::vector<double> loss1(const CollisionInput& in, const SphereQuadrature& q);
[[nodiscard]] std::vector<double> loss2(const CollisionInput& in, const SphereQuadrature& q);

/// R[g,h](v) = 1/4 int |v-v1| g(v1) (h(v1*) + h(v*)) b dsigma dv1.
[[nodiscard]] std::vector<double> collision_frequency(const VelocityGrid& grid, std::span<const double> g,
                                                      std::span<const double> h, const SphereQuadrature& q);

/// Gain, loss and frequency of one field, x-node by x-node, all arguments
/// equal to the local slice. Zero slices are skipped.
struct FieldCollision {
  DistributionField gain;       ///< G1 + G2
  DistributionField loss;       ///< L1 + L2
  DistributionField frequency;  ///< R[f,f]
};

[[nodiscard]] FieldCollision collision_split(const DistributionField& f, const SphereQuadrature& q,
                                             const KernelOptions& opt = {});

/// C[f] = G1 + G2 - L1 - L2 per x-node; time stamp copied from f.
[[nodiscard]] DistributionField collision_full(const DistributionField& f, const SphereQuadrature& q,
                                               const KernelOptions& opt = {});

/// G[f] = G1 + G2 per x-node.
[[nodiscard]] DistributionField gain_full(const DistributionField& f, const SphereQuadrature& q,
                                          const KernelOptions& opt = {});

/// R[g,g] per x-node.
[[nodiscard]] DistributionField frequency_full(const DistributionField& g, const SphereQuadrature& q,
                                               const KernelOptions& opt = {});

enum class TestFunction { one, vx, vy, vz, energy };

[[nodiscard]] double test_function(TestFunction phi, const Vec3& v) noexcept;

/// Discrete int int phi(v) C[f] dv dx.
[[nodiscard]] double weak_form_residual(const DistributionField& f, TestFunction phi, const SphereQuadrature& q);

/// Exact angular average F(v,v1) = |v-v1|^gamma I(v,v1) with
/// I = int_{S^2} <v*>^{-3} dsigma in closed form.
[[nodiscard]] double angular_average_reference(const Vec3& v, const Vec3& v1, double gamma);

/// The same integral by sphere quadrature, as an independent check.
[[nodiscard]] double angular_average_quadrature(const Vec3& v, const Vec3& v1, double gamma, const SphereQuadrature& q);

/// R_sigma(u) = u/2 + |u| sigma/2.
[[nodiscard]] Vec3 r_sigma(const Vec3& u, const Vec3& sigma);
/// u = 2 nu - (|nu|^2 / (sigma . nu)) sigma; throws DomainError if nu . sigma <= 0.
[[nodiscard]] Vec3 r_sigma_inverse(const Vec3& nu, const Vec3& sigma);
/// 4 |nu|^2 / (sigma . nu)^2; throws DomainError if nu . sigma <= 0.
[[nodiscard]] double r_sigma_jacobian(const Vec3& nu, const Vec3& sigma);

struct MonteCarloEstimate {
  CollisionTerms mean;
  CollisionTerms std_error;
  std::size_t n_samples = 0;
};

/// Uniform sigma on S^2 and uniform v1 in the velocity box; every output
/// node reuses the same sample set. Deterministic for a fixed seed.
[[nodiscard]] MonteCarloEstimate monte_carlo_oracle(const CollisionInput& in, std::size_t n_samples,
                                                    std::uint64_t seed, unsigned request = kAllTerms,
                                                    std::span<const std::size_t> nodes = {});

}  // namespace kwe
