#include "etcl/ci.hpp"

#include <cassert>
#include <cmath>

#include "etcl/angles.hpp"
#include "etcl/errors.hpp"

namespace etcl {

double weighted_trace(const Eigen::MatrixXd& P, const Eigen::VectorXd& alpha) {
  if (P.rows() != P.cols() || P.rows() != alpha.size()) {
    throw DimensionMismatch("weighted_trace: P is " + std::to_string(P.rows()) +
                            "x" + std::to_string(P.cols()) + ", alpha has " +
                            std::to_string(alpha.size()) + " entries");
  }
  return P.diagonal().dot(alpha);
}

GoldenResult golden_section_minimize(const std::function<double(double)>& f,
                                     double lo, double hi, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  GoldenResult out;
  out.x = 0.5 * (a + b);
  out.value = f(out.x);
  return out;
}

namespace {

// Inverse with the spec's regularization ladder: if the minimum eigenvalue is
// not above 1e-12, add 1e-9*I once; if still not, the input is singular.
Eigen::MatrixXd regularized_inverse(Eigen::MatrixXd P) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    if (es.eigenvalues().minCoeff() > 1e-12) {
      const int n = static_cast<int>(P.rows());
      return P.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    }
    P += 1e-9 * Eigen::MatrixXd::Identity(P.rows(), P.cols());
  }
  throw SingularCovariance("ci_fuse: covariance singular after regularization");
}

#ifndef NDEBUG
// Spot-check golden-section results against a coarse grid now and then.
void debug_check_against_grid(const std::function<double(double)>& f,
                              double found_value) {
  static thread_local unsigned long calls = 0;
  if (++calls % 64 != 1) return;
  double best = f(0.0);
  for (int i = 1; i <= 1000; ++i) best = std::min(best, f(i / 1000.0));
  assert(found_value <= best + 1e-6 * (1.0 + std::abs(best)));
}
#endif

}  // namespace

std::pair<GaussianBelief, double> ci_fuse(const GaussianBelief& a,
                                          const GaussianBelief& b,
                                          const Eigen::VectorXd& alpha,
                                          double tol,
                                          const std::vector<int>& angle_indices) {
  if (a.dim() != b.dim() || a.dim() != alpha.size()) {
    throw DimensionMismatch("ci_fuse: belief/alpha dimensions disagree");
  }
  const int n = a.dim();
  const Eigen::MatrixXd info_a = regularized_inverse(a.cov);
  const Eigen::MatrixXd info_b = regularized_inverse(b.cov);

  const auto objective = [&](double w) {
    const Eigen::MatrixXd combined = w * info_a + (1.0 - w) * info_b;
    const Eigen::MatrixXd fused =
        combined.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    return weighted_trace(fused, alpha);
  };

  const GoldenResult opt = golden_section_minimize(objective, 0.0, 1.0, tol);
#ifndef NDEBUG
  debug_check_against_grid(objective, opt.value);
#endif
  const double w = opt.x;

  const Eigen::MatrixXd combined = w * info_a + (1.0 - w) * info_b;
  GaussianBelief fused;
  fused.step = a.step;
  fused.cov = combined.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  fused.symmetrize();

  Eigen::VectorXd b_mean = b.mean;
  for (int idx : angle_indices) {
    b_mean[idx] = a.mean[idx] + angle_diff(b.mean[idx], a.mean[idx]);
  }
  fused.mean = fused.cov * (w * (info_a * a.mean) + (1.0 - w) * (info_b * b_mean));
  for (int idx : angle_indices) fused.mean[idx] = wrap_angle(fused.mean[idx]);

  return {std::move(fused), w};
}

bool ci_trigger(const CiState& state, const Eigen::MatrixXd& P,
                const Eigen::VectorXd& alpha) {
  return weighted_trace(P, alpha) > state.tau;
}

void update_tau(CiState& state, const std::vector<int>& neighbors,
                const CiConfig& config) {
  double agreement = 0.0;
  const double own_rate = state.rate();
  for (int j : neighbors) {
    const auto it = state.neighbor_rates.find(j);
    const double neighbor_rate = it == state.neighbor_rates.end() ? 0.0 : it->second;
    agreement += own_rate - neighbor_rate;
  }
  state.tau = std::min(config.tau_goal,
                       state.tau + config.epsilon1 * agreement +
                           config.epsilon2 * (config.tau_goal - state.tau));
}

}  // namespace etcl
