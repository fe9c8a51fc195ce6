#pragma once

#include <Eigen/Dense>
#include <optional>

#include "etcl/belief.hpp"
#include "etcl/models.hpp"

namespace etcl {

// EKF kernels over stacked network beliefs. All measurement fusion is
// sequential and scalar (the measurement noise is diagonal and the
// truncated-Gaussian corrections exist only for scalars), with the
// observation row relinearized at the current working mean of whichever
// belief is being updated. Angle-valued innovations are wrapped before use.

// Dynamics prediction: mean through the nonlinear transition, covariance
// through P <- A P A^T + Q with block-diagonal A linearized at the prior
// mean. Advances the belief's time index by one.
void predict(GaussianBelief& belief, const DynamicsModel& dynamics,
             const StateLayout& layout, const Eigen::VectorXd& controls);

// Standard scalar Kalman update with gain K = P C^T / (C P C^T + r).
void fuse_explicit_scalar(GaussianBelief& belief, const MeasurementModel& model,
                          const StateLayout& layout, double y);

// Intermediate quantities of one implicit (censored-measurement) update,
// exposed for tests and diagnostics.
struct ImplicitUpdateContext {
  double mu = 0.0;              // h(x+) - h(x-), drift of the running posterior
  double innovation_var = 0.0;  // Q_e = C P- C^T + r
  double alpha = 0.0;           // h(x_ref) - h(x-), common-prior offset
  double mean_shift = 0.0;      // \bar{z}
  double variance_factor = 0.0; // \vartheta
  Eigen::VectorXd gain;         // K from the running posterior
};

// Fuses the set-valued knowledge that the censored component's innovation
// against the pair's common prior lay within [-delta, delta]. `prior` is the
// belief's own post-prediction, pre-fusion state at this step; `ref_mean` is
// the sender pair's common prior mean. Returns the update context, or
// nullopt when the truncation window's mass is degenerate, in which case the
// belief is left untouched (conservative fallback).
std::optional<ImplicitUpdateContext> fuse_implicit_scalar(
    GaussianBelief& belief, const GaussianBelief& prior,
    const Eigen::VectorXd& ref_mean, const MeasurementModel& model,
    const StateLayout& layout, double delta);

}  // namespace etcl
