#include "etcl/filter.hpp"

#include "etcl/angles.hpp"
#include "etcl/errors.hpp"
#include "etcl/stats.hpp"

namespace etcl {

namespace {

double innovation(const MeasurementModel& model, double y, double predicted) {
  const double raw = y - predicted;
  return model.is_angle() ? wrap_angle(raw) : raw;
}

}  // namespace

void predict(GaussianBelief& belief, const DynamicsModel& dynamics,
             const StateLayout& layout, const Eigen::VectorXd& controls) {
  Eigen::MatrixXd jac;
  dynamics.propagate(layout, belief.mean, controls, &jac);
  belief.cov = jac * belief.cov * jac.transpose() +
               dynamics.network_process_noise(layout);
  belief.symmetrize();
  belief.step += 1;
}

void fuse_explicit_scalar(GaussianBelief& belief, const MeasurementModel& model,
                          const StateLayout& layout, double y) {
  const Eigen::RowVectorXd c = model.jacobian(belief.mean, layout);
  const Eigen::VectorXd pct = belief.cov * c.transpose();
  const double s = c.dot(pct) + model.noise_var;
  const Eigen::VectorXd gain = pct / s;
  const double z = innovation(model, y, model.observe(belief.mean, layout));
  belief.mean += gain * z;
  belief.cov -= gain * pct.transpose();
  belief.symmetrize();
}

std::optional<ImplicitUpdateContext> fuse_implicit_scalar(
    GaussianBelief& belief, const GaussianBelief& prior,
    const Eigen::VectorXd& ref_mean, const MeasurementModel& model,
    const StateLayout& layout, double delta) {
  const Eigen::RowVectorXd c = model.jacobian(belief.mean, layout);

  ImplicitUpdateContext ctx;
  const double h_post = model.observe(belief.mean, layout);
  const double h_prior = model.observe(prior.mean, layout);
  ctx.mu = innovation(model, h_post, h_prior);
  ctx.innovation_var =
      c.dot(prior.cov * c.transpose()) + model.noise_var;
  ctx.alpha = innovation(model, model.observe(ref_mean, layout), h_prior);

  stats::TruncationWindow window{-delta + ctx.alpha - ctx.mu,
                                 delta + ctx.alpha - ctx.mu};
  stats::TruncatedMoments moments;
  try {
    moments = stats::truncated_moments(0.0, ctx.innovation_var, window);
  } catch (const DegenerateWindow&) {
    return std::nullopt;  // far-tail window: skip the update, keep the belief
  }
  ctx.mean_shift = moments.mean_shift;
  ctx.variance_factor = moments.variance_factor;

  const Eigen::VectorXd pct = belief.cov * c.transpose();
  const double s = c.dot(pct) + model.noise_var;
  ctx.gain = pct / s;

  belief.mean += ctx.gain * ctx.mean_shift;
  belief.cov -= ctx.variance_factor * ctx.gain * pct.transpose();
  belief.symmetrize();
  return ctx;
}

}  // namespace etcl
