#include "kwe/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kwe/errors.hpp"

namespace kwe {

VelocityGrid::VelocityGrid(double v_max, int n_per_axis) : v_max_(v_max), n_(n_per_axis), half_(0), spacing_(0.0) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw ConfigError("grid.v_max: must be a positive finite number");
  if (n_per_axis < 3 || n_per_axis % 2 == 0) throw ConfigError("grid.n_v: must be odd and >= 3");
  half_ = (n_ - 1) / 2;
  spacing_ = 2.0 * v_max_ / (n_ - 1);
}

Vec3 VelocityGrid::node(std::size_t lin) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  const int ix = static_cast<int>(lin % n);
  const int iy = static_cast<int>((lin / n) % n);
  const int iz = static_cast<int>(lin / (n * n));
  return {coordinate(ix), coordinate(iy), coordinate(iz)};
}

SpatialGrid::SpatialGrid() : dim_(0), x_max_(0.0), n_(1), spacing_(0.0) {}

SpatialGrid::SpatialGrid(int dim, double x_max, int n_per_axis) : dim_(dim), x_max_(x_max), n_(n_per_axis), spacing_(0.0) {
  if (dim != 0 && dim != 1 && dim != 3) throw ConfigError("grid.dim_x: must be 0, 1 or 3");
  if (dim == 0) {
    x_max_ = 0.0;
    n_ = 1;
    return;
  }
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ConfigError("grid.x_max: must be a positive finite number");
  if (n_per_axis < 2) throw ConfigError("grid.n_x: must be >= 2");
  spacing_ = 2.0 * x_max_ / (n_ - 1);
}

std::size_t SpatialGrid::size() const noexcept {
  std::size_t s = 1;
  for (int k = 0; k < dim_; ++k) s *= static_cast<std::size_t>(n_);
  return s;
}

double SpatialGrid::cell_measure() const noexcept { return dim_ == 0 ? 1.0 : std::pow(spacing_, dim_); }

Vec3 SpatialGrid::node(std::size_t lin) const noexcept {
  if (dim_ == 0) return {};
  const auto n = static_cast<std::size_t>(n_);
  if (dim_ == 1) return {coordinate(static_cast<int>(lin)), 0.0, 0.0};
  return {coordinate(static_cast<int>(lin % n)), coordinate(static_cast<int>((lin / n) % n)),
          coordinate(static_cast<int>(lin / (n * n)))};
}

GridHandle make_grid(const SpatialGrid& x, const VelocityGrid& v) {
  return std::make_shared<const PhaseSpaceGrid>(PhaseSpaceGrid{x, v});
}

DistributionField::DistributionField(GridHandle grid, double t) : time(t), grid_(std::move(grid)) {
  values_.assign(grid_->size(), 0.0);
}

DistributionField::DistributionField(GridHandle grid, std::vector<double> values, double t)
    : time(t), grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw DomainError("DistributionField: value count does not match grid size");
}

std::span<double> DistributionField::v_slice(std::size_t ix) noexcept {
  const std::size_t nv = grid_->v.size();
  return std::span<double>(values_).subspan(ix * nv, nv);
}

std::span<const double> DistributionField::v_slice(std::size_t ix) const noexcept {
  const std::size_t nv = grid_->v.size();
  return std::span<const double>(values_).subspan(ix * nv, nv);
}

bool DistributionField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void DistributionField::check_finite() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "DistributionField: non-finite value at flat index " << i << " (t=" << time << ")";
      throw DomainError(os.str());
    }
  }
}

double DistributionField::min_value() const noexcept {
  if (values_.empty()) return 0.0;
  return *std::min_element(values_.begin(), values_.end());
}

double DistributionField::max_abs() const noexcept {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

DistributionField& DistributionField::axpy(double a, const DistributionField& other) {
  if (!same_grid(*this, other)) throw DomainError("DistributionField::axpy: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
  return *this;
}

DistributionField& DistributionField::scale(double a) noexcept {
  for (double& x : values_) x *= a;
  return *this;
}

bool same_grid(const DistributionField& a, const DistributionField& b) noexcept {
  return a.grid_handle() == b.grid_handle() || a.grid() == b.grid();
}

void WeightParams::validate() const {
  if (!(M > 8.0)) throw ConfigError("weights.M: WeightParams requires M > 8");
  if (!(alpha > 2.5 && alpha < M - 1.5))
    throw ConfigError("weights.alpha: WeightParams requires 5/2 < alpha < M - 3/2");
  if (!(N_moment >= 0.0)) throw ConfigError("weights.N_moment: WeightParams requires N_moment >= 0");
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "L1_xv") return NormKind::L1_xv;
  if (name == "Linf_xv") return NormKind::Linf_xv;
  if (name == "Linfx_L2v") return NormKind::Linfx_L2v;
  if (name == "L2x_L1v") return NormKind::L2x_L1v;
  throw ConfigError("unknown norm kind '" + std::string(name) + "'");
}

std::vector<double> velocity_weights(const VelocityGrid& grid, double weight_power) {
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = weight_power == 0.0 ? 1.0 : std::pow(1.0 + norm2(grid.node(i)), 0.5 * weight_power);
  }
  return w;
}

namespace {

double lp_accumulate(double acc, double x, double p) {
  if (std::isinf(p)) return std::max(acc, std::abs(x));
  if (p == 1.0) return acc + std::abs(x);
  if (p == 2.0) return acc + x * x;
  return acc + std::pow(std::abs(x), p);
}

double lp_finish(double acc, double p, double measure) {
  if (std::isinf(p)) return acc;
  if (p == 1.0) return acc * measure;
  if (p == 2.0) return std::sqrt(acc * measure);
  return std::pow(acc * measure, 1.0 / p);
}

}  // namespace

double mixed_norm(const DistributionField& f, double weight_power, double p, double r) {
  if (!(p >= 1.0) || !(r >= 1.0)) throw DomainError("mixed_norm: exponents must be >= 1");
  if (weight_power < 0.0) throw DomainError("mixed_norm: weight power must be >= 0");
  const auto& g = f.grid();
  const std::vector<double> w = velocity_weights(g.v, weight_power);
  const std::size_t nx = g.x.size();
  const std::size_t nv = g.v.size();
  double outer = 0.0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const auto slice = f.v_slice(ix);
    double inner = 0.0;
    for (std::size_t iv = 0; iv < nv; ++iv) inner = lp_accumulate(inner, w[iv] * slice[iv], r);
    outer = lp_accumulate(outer, lp_finish(inner, r, g.v.cell_volume()), p);
  }
  return lp_finish(outer, p, g.x.cell_measure());
}

double weighted_norm(const DistributionField& f, double weight_power, NormKind kind) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case NormKind::L1_xv:
      return mixed_norm(f, weight_power, 1.0, 1.0);
    case NormKind::Linf_xv:
      return mixed_norm(f, weight_power, inf, inf);
    case NormKind::Linfx_L2v:
      return mixed_norm(f, weight_power, inf, 2.0);
    case NormKind::L2x_L1v:
      return mixed_norm(f, weight_power, 2.0, 1.0);
  }
  throw ConfigError("weighted_norm: unknown norm kind");
}

namespace {

// Index-space position along one axis; snaps to a node when within
// rounding distance so that exact lattice points reproduce nodal values.
inline bool locate(double pos, int n, int& base, double& frac) {
  const double r = std::round(pos);
  if (std::abs(pos - r) <= 1e-12 * std::max(1.0, std::abs(pos))) pos = r;
  if (pos < 0.0 || pos > n - 1) return false;
  base = static_cast<int>(std::floor(pos));
  frac = pos - base;
  if (base == n - 1) {
    base = n - 2;
    frac = 1.0;
  }
  return true;
}

}  // namespace

double interpolate_velocity(const VelocityGrid& grid, std::span<const double> slice, const Vec3& v) {
  const int n = grid.n();
  const double inv_h = 1.0 / grid.spacing();
  const double half = 0.5 * (n - 1);
  int bx, by, bz;
  double tx, ty, tz;
  if (!locate(v.x * inv_h + half, n, bx, tx) || !locate(v.y * inv_h + half, n, by, ty) ||
      !locate(v.z * inv_h + half, n, bz, tz))
    return 0.0;
  auto at = [&](int i, int j, int k) { return slice[grid.index(i, j, k)]; };
  const double c00 = (1.0 - tx) * at(bx, by, bz) + tx * at(bx + 1, by, bz);
  const double c10 = (1.0 - tx) * at(bx, by + 1, bz) + tx * at(bx + 1, by + 1, bz);
  const double c01 = (1.0 - tx) * at(bx, by, bz + 1) + tx * at(bx + 1, by, bz + 1);
  const double c11 = (1.0 - tx) * at(bx, by + 1, bz + 1) + tx * at(bx + 1, by + 1, bz + 1);
  const double c0 = (1.0 - ty) * c00 + ty * c10;
  const double c1 = (1.0 - ty) * c01 + ty * c11;
  return (1.0 - tz) * c0 + tz * c1;
}

}  // namespace kwe
