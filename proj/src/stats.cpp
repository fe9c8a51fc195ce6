#include "etcl/stats.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "etcl/errors.hpp"

namespace etcl::stats {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.70710678118654752440;    // 1/sqrt(2)

// z * pdf(z) with the correct 0 limit at +/-inf (naive inf * 0 is NaN).
double z_times_pdf(double z) {
  if (!std::isfinite(z)) return 0.0;
  return z * kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

}  // namespace

double normal_pdf(double z) {
  if (!std::isfinite(z)) return 0.0;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double normal_tail(double z) {
  if (z == std::numeric_limits<double>::infinity()) return 0.0;
  if (z == -std::numeric_limits<double>::infinity()) return 1.0;
  return 0.5 * std::erfc(z * kInvSqrt2);
}

TruncatedMoments truncated_moments(double mu, double var,
                                   const TruncationWindow& window) {
  if (!(var > 0.0)) {
    throw DegenerateWindow("truncated_moments: variance must be positive");
  }
  if (!window.valid()) {
    throw DegenerateWindow("truncated_moments: window lower must be < upper");
  }

  const double sigma = std::sqrt(var);
  const double a = (window.lower - mu) / sigma;
  const double b = (window.upper - mu) / sigma;

  const double mass = normal_tail(a) - normal_tail(b);
  if (!(mass >= kMassFloor)) {
    throw DegenerateWindow("truncated_moments: window mass " +
                           std::to_string(mass) + " below floor");
  }

  const double pdf_gap = normal_pdf(a) - normal_pdf(b);
  const double ratio = pdf_gap / mass;

  TruncatedMoments out;
  out.mean_shift = ratio * sigma;
  out.variance_factor = ratio * ratio - (z_times_pdf(a) - z_times_pdf(b)) / mass;
  return out;
}

}  // namespace etcl::stats
