#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mgtune {

/// Anisotropic Matern nu=3/2 hyperparameters. Lengthscales are in the same
/// (normalized) units as the inputs.
struct KernelParams {
  std::vector<double> lengthscales;
  double signal_std = 1.0;
  double noise_std = 0.0;

  void validate(Eigen::Index dim) const;
};

/// k(x1, x2) = s^2 (1 + sqrt(3) d) exp(-sqrt(3) d), d the scaled distance.
double matern32(const KernelParams& k, const Eigen::Ref<const Eigen::VectorXd>& x1,
                const Eigen::Ref<const Eigen::VectorXd>& x2);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

ConfidenceInterval confidence_bounds(const Posterior& p, double beta);

/// Exact GP regression with a constant prior mean (prior_offset). Immutable;
/// add_observation returns a new model.
class GpModel {
 public:
  /// inputs: one row per observation. Throws std::invalid_argument on empty
  /// or mismatched data and std::runtime_error when the Gram matrix stays
  /// indefinite after jitter escalation.
  static GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, KernelParams kernel,
                     double prior_offset = 0.0);

  Posterior posterior_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Rank-1 extension of the Cholesky factor; falls back to a full refit if
  /// the extension is not positive.
  GpModel add_observation(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const;

  /// k(x, X) for all training inputs X.
  Eigen::VectorXd cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// L^{-1} k(x, X).
  Eigen::VectorXd whiten(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dim() const { return inputs_.cols(); }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& targets() const { return targets_; }  // centered
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const KernelParams& kernel() const { return kernel_; }
  double prior_offset() const { return prior_offset_; }
  /// Extra diagonal added to K + noise^2 I to make it factorizable.
  double jitter() const { return jitter_; }

 private:
  GpModel() = default;
  void solve_alpha();

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  KernelParams kernel_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double prior_offset_ = 0.0;
  double jitter_ = 0.0;
};

}  // namespace mgtune
