#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "etcl/belief.hpp"

namespace etcl {

// Covariance Intersection: conservative fusion of two estimates with unknown
// cross-correlation via a convex combination of information matrices,
// P_new^-1 = w Pa^-1 + (1-w) Pb^-1, with w chosen to minimize the weighted
// trace of the fused covariance. The objective is convex in w (matrix
// inversion is operator-convex), so a golden-section search suffices.

struct CiConfig {
  bool enabled = false;
  double tau_goal = 0.0;   // weighted-trace goal, m^2 units
  double epsilon1 = 0.0;   // agreement-term gain of the threshold dynamics
  double epsilon2 = 0.0;   // goal-restoring gain
  bool adaptive = false;   // run the threshold dynamics (else tau == tau_goal)
  double omega_tol = 1e-6;
  bool lossy = false;      // subject CI messages to the lossy channel
};

struct CiState {
  double tau = 0.0;
  long trigger_count = 0;
  long step_count = 0;
  std::map<int, double> neighbor_rates;  // last known, from DATA headers

  double rate() const {
    return step_count > 0
               ? static_cast<double>(trigger_count) / static_cast<double>(step_count)
               : 0.0;
  }
};

// sum_m alpha_m P_mm == trace(P diag(alpha)). Throws DimensionMismatch.
double weighted_trace(const Eigen::MatrixXd& P, const Eigen::VectorXd& alpha);

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

// Minimizes f over [lo, hi] to bracket width <= tol. Assumes unimodality.
GoldenResult golden_section_minimize(const std::function<double(double)>& f,
                                     double lo, double hi, double tol);

// Fuses two beliefs, optimizing the weight for diag(alpha). angle_indices
// lists state components that live on the circle; the partner's angles are
// aligned to a's branch before the means are combined. Throws
// SingularCovariance if an input stays singular after 1e-9*I regularization.
// Returns the fused belief and the optimal weight on a's information.
std::pair<GaussianBelief, double> ci_fuse(
    const GaussianBelief& a, const GaussianBelief& b,
    const Eigen::VectorXd& alpha, double tol,
    const std::vector<int>& angle_indices = {});

// True iff the weighted trace strictly exceeds the agent's current threshold.
bool ci_trigger(const CiState& state, const Eigen::MatrixXd& P,
                const Eigen::VectorXd& alpha);

// tau <- min(tau_goal, tau + eps1 * sum_j (r_i - r_j) + eps2 * (tau_goal - tau)).
// Unknown neighbor rates default to 0 until a DATA header provides one.
void update_tau(CiState& state, const std::vector<int>& neighbors,
                const CiConfig& config);

}  // namespace etcl
