#pragma once

#include <Eigen/Dense>

namespace etcl {

// Mean and covariance of the full network state as held by one estimator,
// together with the time index it is valid for. Covariances are kept
// symmetric by construction: every update ends with symmetrize().
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int step = 0;

  GaussianBelief() = default;
  GaussianBelief(Eigen::VectorXd m, Eigen::MatrixXd p, int k = 0)
      : mean(std::move(m)), cov(std::move(p)), step(k) {}

  int dim() const { return static_cast<int>(mean.size()); }

  void symmetrize() { cov = 0.5 * (cov + cov.transpose()).eval(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        cov, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  double max_symmetry_error() const {
    return (cov - cov.transpose()).cwiseAbs().maxCoeff();
  }

  bool is_finite() const { return mean.allFinite() && cov.allFinite(); }
};

}  // namespace etcl
