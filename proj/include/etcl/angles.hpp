#pragma once

#include <cmath>
#include <numbers>

namespace etcl {

// Wraps an angle to (-pi, pi]. std::remainder lands in [-pi, pi]; the -pi
// endpoint is folded onto +pi so the interval is half-open as documented.
inline double wrap_angle(double rad) {
  double w = std::remainder(rad, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w = std::numbers::pi;
  return w;
}

// Difference a - b wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace etcl
