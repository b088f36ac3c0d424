#pragma once

#include <span>

namespace hyplab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = slope * x + intercept (needs >= 2 points).
LineFit fit_line(std::span<const double> x, std::span<const double> y);
// Fit of log(y) against log(x); all values must be positive.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace hyplab
