#pragma once

#include <cmath>
#include <span>

#include "kwe/errors.hpp"

namespace kwe {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the fit.
  double residual = 0.0;
};

/// Ordinary least squares y = a + b x.
[[nodiscard]] inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("least_squares: need at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("least_squares: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace kwe
