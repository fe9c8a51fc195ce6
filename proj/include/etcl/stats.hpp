#pragma once

#include <limits>

namespace etcl::stats {

// Scalar Gaussian primitives and truncated-Gaussian moment corrections.
//
// truncated_moments() is the workhorse behind implicit (censored) measurement
// fusion: conditioning a scalar Gaussian on a known interval shifts its mean
// and strictly shrinks its variance, and both corrections have closed forms
// in terms of the standard normal pdf and tail probability.

// Standard normal density. Returns 0 for +/-inf arguments.
double normal_pdf(double z);

// Tail probability Q(z) = P(Z > z) for standard normal Z. Computed via
// erfc so far-tail values keep full relative precision (1 - CDF would not).
// Accepts +/-inf and returns the exact limits 0/1.
double normal_tail(double z);

// Truncation interval [lower, upper], lower < upper. Open (infinite) bounds
// are expressed directly as -inf / +inf, not as large finite sentinels.
struct TruncationWindow {
  double lower;
  double upper;

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static TruncationWindow unbounded() { return {-kInf, kInf}; }
  bool valid() const { return lower < upper; }
};

// Corrections for a Gaussian N(mu, var) conditioned on z in [a, b]:
//   truncated mean     = mu + mean_shift
//   truncated variance = (1 - variance_factor) * var
// variance_factor lies in (0, 1) for any window with finite extent on at
// least one side; it is exactly 0 for the unbounded window.
struct TruncatedMoments {
  double mean_shift;       // \bar{z}
  double variance_factor;  // \vartheta
};

// Probability mass below which the moment ratios are numerically meaningless
// (0/0 in the far tail). truncated_moments throws DegenerateWindow instead of
// returning garbage; callers fall back to skipping the update.
inline constexpr double kMassFloor = 1e-12;

// Throws DegenerateWindow if the window mass under N(mu, var) is below
// kMassFloor. Requires var > 0 and a valid window.
TruncatedMoments truncated_moments(double mu, double var,
                                   const TruncationWindow& window);

}  // namespace etcl::stats
