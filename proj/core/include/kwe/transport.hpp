#pragma once

#include <vector>

#include "kwe/phase_grid.hpp"

namespace kwe {

/// (S(t) f)(x, v) = f(x - v t, v). Per velocity node the x-slice is
/// translated by a fractional shift with linear (dim 1) or trilinear
/// (dim 3) interpolation and zero inflow. dim 0 is the identity.
/// The result carries time f.time + t.
[[nodiscard]] DistributionField apply_transport(const DistributionField& f, double t);

/// Mass that left the box during apply_transport(f, t): mass(f) - mass(S(t) f).
[[nodiscard]] double transport_boundary_loss(const DistributionField& f, const DistributionField& shifted);

/// max over nodes of |<v>^l S(t) f - S(t)(<v>^l f)|.
[[nodiscard]] double transport_commutes_with_weights_check(const DistributionField& f, double t, double l);

struct DecayProbe {
  double slope = 0.0;
  double residual = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

/// Fits log ||S(t) f0||_{L^p_x L^r_v} against log t. Throws DomainError
/// naming the first sampled time at which mass reaches the box edge.
[[nodiscard]] DecayProbe dispersive_decay_probe(const DistributionField& f0, const std::vector<double>& times,
                                                double p, double r, double edge_tolerance = 1e-8);

/// Fraction of |f| carried by the outermost x-layer (support-exit check).
[[nodiscard]] double edge_mass_fraction(const DistributionField& f);

}  // namespace kwe
