#pragma once

#include <span>
#include <string>
#include <vector>

#include "kwe/diagnostics.hpp"
#include "kwe/phase_grid.hpp"

namespace kwe {

inline constexpr const char* kCsvHeader =
    "time,l1_xv,linfM_xv,linfx_l2v_alpha,l2x_l1v_w,mass,px,py,pz,energy,momentN,min_value,boundary_mass_lost";

/// 17 significant digits, enough to round-trip any double.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] std::string csv_row(const NormReport& r);
void write_csv(const std::string& path, std::span<const NormReport> reports);
/// Parses a file written by write_csv. Throws DomainError on a bad header or row.
[[nodiscard]] std::vector<NormReport> read_csv(const std::string& path);

/// Binary layout: "KWE1", u32 dim_x, n_x, n_v, f64 v_max, x_max, time, then
/// the values x-major with v lexicographic (x fastest). Little-endian.
void write_snapshot(const std::string& path, const DistributionField& f);
/// Throws DomainError on a wrong magic or a truncated file.
[[nodiscard]] DistributionField read_snapshot(const std::string& path);

}  // namespace kwe
