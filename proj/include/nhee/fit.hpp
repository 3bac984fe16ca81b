#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nhee/errors.hpp"

namespace nhee {

// Ordinary least squares y = slope*x + intercept with the usual slope
// standard error and coefficient of determination.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw solver_error("linear_fit: need >= 2 matched points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw solver_error("linear_fit: degenerate abscissa (all x equal)");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r_squared = (syy == 0.0) ? 1.0 : 1.0 - ss_res / syy;
  if (f.r_squared < 0.0) f.r_squared = 0.0;
  f.slope_stderr = (n > 2) ? std::sqrt(ss_res / (double(n) - 2.0) / sxx) : 0.0;
  return f;
}

}  // namespace nhee
