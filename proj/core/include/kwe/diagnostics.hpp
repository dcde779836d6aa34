#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwe/phase_grid.hpp"

namespace kwe {

struct NormReport {
  double time = 0.0;
  double l1_xv = 0.0;
  double linfM_xv = 0.0;
  double linfx_l2v_alpha = 0.0;
  double l2x_l1v_w = 0.0;
  double mass = 0.0;
  Vec3 momentum;
  double energy = 0.0;
  double momentN = 0.0;
  double min_value = 0.0;
  double boundary_mass_lost = 0.0;
};

[[nodiscard]] NormReport report(const DistributionField& f, const WeightParams& w, double boundary_mass_lost = 0.0);

enum class ReportField { l1_xv, linfM_xv, linfx_l2v_alpha, l2x_l1v_w, mass, energy, momentN };

[[nodiscard]] ReportField parse_report_field(std::string_view name);
[[nodiscard]] double report_value(const NormReport& r, ReportField field) noexcept;

struct DecayFit {
  double slope = 0.0;
  double residual = 0.0;
  std::size_t points_used = 0;
  /// Times with t >= t_min whose norm was not positive.
  std::vector<double> excluded_times;
};

/// Least-squares slope of log(norm) vs log(t) over reports with t >= t_min.
/// Throws DomainError with fewer than five usable points.
[[nodiscard]] DecayFit decay_fit(std::span<const NormReport> reports, ReportField field, double t_min);

/// Same regression on raw samples.
[[nodiscard]] DecayFit decay_fit(std::span<const double> times, std::span<const double> values, double t_min);

struct DispersiveCertificate {
  bool certified = false;
  double budget = 0.0;
  double l1_xv = 0.0, linfM_xv = 0.0, linfx_l2v_alpha = 0.0, l2x_l1v_w = 0.0;
};

/// Certifies the dispersive regime only if each X-ingredient norm of f0
/// is below the budget.
[[nodiscard]] DispersiveCertificate certify_dispersive(const DistributionField& f0, const WeightParams& w,
                                                       double epsilon0_budget);

}  // namespace kwe
