#pragma once

// Test-only oracles, independent of the implementations they check:
// adaptive quadrature for truncated-Gaussian moments, central finite
// differences for Jacobians, a joint (vector) Kalman update, and brute-force
// grid minimization for the CI weight.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace oracle {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double eps,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double eps = 1e-13) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, eps, 48);
}

struct TruncatedOracle {
  double mass;
  double mean;      // conditional mean
  double variance;  // conditional variance
};

// Brute-force moments of N(mu, var) conditioned on [lo, hi] by quadrature of
// f, z f, z^2 f. Infinite bounds are clamped at 40 sigma (mass beyond is
// below double precision).
inline TruncatedOracle truncated_moments_quadrature(double mu, double var,
                                                    double lo, double hi) {
  const double sigma = std::sqrt(var);
  const double a = std::isfinite(lo) ? lo : mu - 40.0 * sigma;
  const double b = std::isfinite(hi) ? hi : mu + 40.0 * sigma;
  const auto pdf = [&](double z) {
    const double s = (z - mu) / sigma;
    return std::exp(-0.5 * s * s) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  const double mass = integrate(pdf, a, b);
  const double first = integrate([&](double z) { return z * pdf(z); }, a, b);
  const double second =
      integrate([&](double z) { return z * z * pdf(z); }, a, b);
  TruncatedOracle out;
  out.mass = mass;
  out.mean = first / mass;
  out.variance = second / mass - out.mean * out.mean;
  return out;
}

// Central finite differences of a vector-valued function.
inline Eigen::MatrixXd finite_difference_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double step = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (long c = 0; c < x.size(); ++c) {
    Eigen::VectorXd hi = x;
    Eigen::VectorXd lo = x;
    hi[c] += step;
    lo[c] -= step;
    jac.col(c) = (f(hi) - f(lo)) / (2.0 * step);
  }
  return jac;
}

// Joint Kalman update with an m-dimensional measurement (matrix form), the
// reference for sequential scalar fusion in the linear case.
inline void joint_kalman_update(Eigen::VectorXd& mean, Eigen::MatrixXd& cov,
                                const Eigen::MatrixXd& C,
                                const Eigen::MatrixXd& R,
                                const Eigen::VectorXd& y) {
  const Eigen::MatrixXd S = C * cov * C.transpose() + R;
  const Eigen::MatrixXd K = cov * C.transpose() * S.inverse();
  mean += K * (y - C * mean);
  cov = (Eigen::MatrixXd::Identity(cov.rows(), cov.cols()) - K * C) * cov;
  cov = 0.5 * (cov + cov.transpose()).eval();
}

// Brute-force minimizer of a scalar objective over a uniform grid on [0, 1].
inline std::pair<double, double> grid_minimize01(
    const std::function<double(double)>& f, int cells = 10000) {
  double best_x = 0.0;
  double best_v = f(0.0);
  for (int i = 1; i <= cells; ++i) {
    const double x = static_cast<double>(i) / cells;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return {best_x, best_v};
}

}  // namespace oracle
