#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "kwe/vec3.hpp"

namespace kwe {

/// Uniform node-centred Cartesian lattice on [-v_max, v_max]^3. The node
/// count per axis is odd so the origin is a node and the lattice is exactly
/// reflection symmetric.
class VelocityGrid {
 public:
  VelocityGrid(double v_max, int n_per_axis);

  [[nodiscard]] double v_max() const noexcept { return v_max_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] double cell_volume() const noexcept { return spacing_ * spacing_ * spacing_; }
  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  /// Coordinate of node i along one axis; exactly symmetric about the centre.
  [[nodiscard]] double coordinate(int i) const noexcept { return (i - half_) * spacing_; }
  [[nodiscard]] std::size_t index(int ix, int iy, int iz) const noexcept {
    return (static_cast<std::size_t>(iz) * n_ + iy) * n_ + ix;
  }
  [[nodiscard]] Vec3 node(std::size_t lin) const noexcept;

  friend bool operator==(const VelocityGrid&, const VelocityGrid&) = default;

 private:
  double v_max_;
  int n_;
  int half_;
  double spacing_;
};

/// Spatial lattice. dim = 0 is the homogeneous mode with a single cell of
/// unit measure; dim = 1 or 3 is a uniform lattice on [-x_max, x_max]^dim
/// with vacuum outside.
class SpatialGrid {
 public:
  SpatialGrid();
  SpatialGrid(int dim, double x_max, int n_per_axis);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] double x_max() const noexcept { return x_max_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] std::size_t size() const noexcept;
  [[nodiscard]] double cell_measure() const noexcept;
  [[nodiscard]] double coordinate(int i) const noexcept { return (i - 0.5 * (n_ - 1)) * spacing_; }
  /// Position of spatial node `lin` padded to three components (unused axes are 0).
  [[nodiscard]] Vec3 node(std::size_t lin) const noexcept;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  int dim_;
  double x_max_;
  int n_;
  double spacing_;
};

struct PhaseSpaceGrid {
  SpatialGrid x;
  VelocityGrid v;

  [[nodiscard]] std::size_t size() const noexcept { return x.size() * v.size(); }
  [[nodiscard]] double cell_measure() const noexcept { return x.cell_measure() * v.cell_volume(); }
  friend bool operator==(const PhaseSpaceGrid&, const PhaseSpaceGrid&) = default;
};

using GridHandle = std::shared_ptr<const PhaseSpaceGrid>;

[[nodiscard]] GridHandle make_grid(const SpatialGrid& x, const VelocityGrid& v);

/// Nodes and weights on the unit sphere. Product rule: Gauss-Legendre in
/// cos(theta), uniform in phi (offset by half a step).
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int n_polar = 0;
  int n_azimuthal = 0;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
  /// Largest total degree of spherical polynomials integrated exactly.
  [[nodiscard]] int degree() const noexcept;

  template <class F>
  [[nodiscard]] double integrate(F&& fn) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += weights[j] * fn(nodes[j]);
    return acc;
  }
};

/// Throws ConfigError unless n_polar >= 2 and n_azimuthal is even and >= 4.
[[nodiscard]] SphereQuadrature make_sphere_quadrature(int n_polar, int n_azimuthal);

/// Gauss-Legendre nodes/weights on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Sampled f(t, x, v). Values are stored x-major: value(ix, iv) lives at
/// ix * n_v + iv with iv = (iz * n + iy) * n + ix.
class DistributionField {
 public:
  DistributionField() = default;
  explicit DistributionField(GridHandle grid, double time = 0.0);
  DistributionField(GridHandle grid, std::vector<double> values, double time);

  [[nodiscard]] const PhaseSpaceGrid& grid() const noexcept { return *grid_; }
  [[nodiscard]] const GridHandle& grid_handle() const noexcept { return grid_; }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> v_slice(std::size_t ix) noexcept;
  [[nodiscard]] std::span<const double> v_slice(std::size_t ix) const noexcept;
  [[nodiscard]] double& at(std::size_t ix, std::size_t iv) noexcept { return values_[ix * grid_->v.size() + iv]; }
  [[nodiscard]] double at(std::size_t ix, std::size_t iv) const noexcept { return values_[ix * grid_->v.size() + iv]; }

  double time = 0.0;
  bool nonneg_asserted = false;

  /// Throws DomainError naming the first non-finite entry.
  void check_finite() const;
  [[nodiscard]] bool all_finite() const noexcept;
  [[nodiscard]] double min_value() const noexcept;
  [[nodiscard]] double max_abs() const noexcept;

  /// this += a * other (grids must match).
  DistributionField& axpy(double a, const DistributionField& other);
  DistributionField& scale(double a) noexcept;

 private:
  GridHandle grid_;
  std::vector<double> values_;
};

[[nodiscard]] bool same_grid(const DistributionField& a, const DistributionField& b) noexcept;

/// Weight exponents of the X_{M,alpha} norm plus the moment order.
struct WeightParams {
  double M = 9.0;
  double alpha = 4.0;
  double N_moment = 2.0;

  /// Throws ConfigError naming WeightParams unless M > 8, 5/2 < alpha < M - 3/2, N >= 0.
  void validate() const;
};

enum class NormKind { L1_xv, Linf_xv, Linfx_L2v, L2x_L1v };

/// Throws ConfigError for unknown names.
[[nodiscard]] NormKind parse_norm_kind(std::string_view name);

/// Discrete || <v>^l f || in the requested mixed norm. Inner v-norm first
/// per x-node, then the outer x-norm, both with cell measures.
[[nodiscard]] double weighted_norm(const DistributionField& f, double weight_power, NormKind kind);

/// General || <v>^l f ||_{L^p_x L^r_v}; p or r may be +infinity.
[[nodiscard]] double mixed_norm(const DistributionField& f, double weight_power, double p, double r);

/// <v>^l at every velocity node.
[[nodiscard]] std::vector<double> velocity_weights(const VelocityGrid& grid, double weight_power);

/// Trilinear interpolation of a v-slice; 0 outside [-v_max, v_max]^3.
[[nodiscard]] double interpolate_velocity(const VelocityGrid& grid, std::span<const double> slice, const Vec3& v);

}  // namespace kwe
