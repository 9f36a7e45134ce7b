#pragma once

#include <span>

namespace kdvcrit::fit {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Unweighted least-squares line through (x_i, y_i).
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

/// Slope of log|y| against log x.
LineFit loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace kdvcrit::fit
