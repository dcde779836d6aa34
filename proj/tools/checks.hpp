#pragma once

#include <string>
#include <vector>

#include "kwe/config.hpp"

namespace kwe::tools {

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Collision identities: angular averaging, R_sigma Jacobian and round trip,
/// post-collision invariants, loss/frequency factorization, L1 duality,
/// Rayleigh-Jeans and constant stationarity, weak-form residuals.
[[nodiscard]] std::vector<Check> lemma_suite(const RunConfig& cfg);

/// Free transport: interior mass conservation, dispersive slopes, weight commutation.
[[nodiscard]] std::vector<Check> transport_suite(const RunConfig& cfg);

void write_checks(const std::string& path, const std::vector<Check>& checks);

}  // namespace kwe::tools
