#include "mgtune/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace mgtune {

namespace {
const double kSqrt3 = std::sqrt(3.0);
constexpr double kJitterLadder[] = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};
}  // namespace

void KernelParams::validate(Eigen::Index dim) const {
  if (static_cast<Eigen::Index>(lengthscales.size()) != dim)
    throw std::invalid_argument("kernel: one lengthscale per input dimension required");
  for (double l : lengthscales)
    if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("kernel: lengthscales must be > 0");
  if (!(signal_std > 0.0) || !std::isfinite(signal_std)) throw std::invalid_argument("kernel: signal_std must be > 0");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw std::invalid_argument("kernel: noise_std must be >= 0");
}

double matern32(const KernelParams& k, const Eigen::Ref<const Eigen::VectorXd>& x1,
                const Eigen::Ref<const Eigen::VectorXd>& x2) {
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < x1.size(); ++i) {
    const double z = (x1(i) - x2(i)) / k.lengthscales[static_cast<std::size_t>(i)];
    d2 += z * z;
  }
  const double r = kSqrt3 * std::sqrt(d2);
  return k.signal_std * k.signal_std * (1.0 + r) * std::exp(-r);
}

ConfidenceInterval confidence_bounds(const Posterior& p, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  const double half = beta * std::sqrt(p.variance);
  return {p.mean - half, p.mean + half};
}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets, KernelParams kernel,
                     double prior_offset) {
  if (inputs.rows() < 1) throw std::invalid_argument("gp fit: at least one observation required");
  if (inputs.rows() != targets.size()) throw std::invalid_argument("gp fit: inputs/targets size mismatch");
  if (!inputs.allFinite() || !targets.allFinite() || !std::isfinite(prior_offset))
    throw std::invalid_argument("gp fit: non-finite data");
  kernel.validate(inputs.cols());

  GpModel m;
  m.inputs_ = inputs;
  m.targets_ = targets.array() - prior_offset;
  m.kernel_ = std::move(kernel);
  m.prior_offset_ = prior_offset;

  const Eigen::Index n = inputs.rows();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = matern32(m.kernel_, inputs.row(i), inputs.row(j));
  const double s2 = m.kernel_.signal_std * m.kernel_.signal_std;
  const double noise2 = m.kernel_.noise_std * m.kernel_.noise_std;

  for (double rel : kJitterLadder) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += noise2 + rel * s2;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
      m.chol_ = llt.matrixL();
      m.jitter_ = rel * s2;
      m.solve_alpha();
      return m;
    }
  }
  throw std::runtime_error("gp fit: Gram matrix not positive definite (duplicate inputs with zero noise?)");
}

void GpModel::solve_alpha() {
  const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(targets_);
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(z);
}

Eigen::VectorXd GpModel::cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw std::invalid_argument("gp: query dimension mismatch");
  Eigen::VectorXd k(size());
  for (Eigen::Index i = 0; i < size(); ++i) k(i) = matern32(kernel_, x, inputs_.row(i).transpose());
  return k;
}

Eigen::VectorXd GpModel::whiten(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return chol_.triangularView<Eigen::Lower>().solve(cross_covariance(x));
}

Posterior GpModel::posterior_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd k = cross_covariance(x);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double prior_var = kernel_.signal_std * kernel_.signal_std;
  return {k.dot(alpha_) + prior_offset_, std::max(prior_var - v.squaredNorm(), 0.0)};
}

GpModel GpModel::add_observation(const Eigen::Ref<const Eigen::VectorXd>& x, double y) const {
  if (x.size() != dim()) throw std::invalid_argument("gp: observation dimension mismatch");
  if (!x.allFinite() || !std::isfinite(y)) throw std::invalid_argument("gp: non-finite observation");

  const Eigen::Index n = size();
  GpModel m;
  m.kernel_ = kernel_;
  m.prior_offset_ = prior_offset_;
  m.jitter_ = jitter_;
  m.inputs_.resize(n + 1, dim());
  m.inputs_.topRows(n) = inputs_;
  m.inputs_.row(n) = x.transpose();
  m.targets_.resize(n + 1);
  m.targets_.head(n) = targets_;
  m.targets_(n) = y - prior_offset_;

  const Eigen::VectorXd l = whiten(x);
  const double diag = kernel_.signal_std * kernel_.signal_std + kernel_.noise_std * kernel_.noise_std + jitter_;
  const double d2 = diag - l.squaredNorm();
  if (!(d2 > 0.0) || !std::isfinite(d2)) {
    Eigen::VectorXd raw = m.targets_.array() + prior_offset_;
    return fit(m.inputs_, raw, kernel_, prior_offset_);
  }
  m.chol_ = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.chol_.topLeftCorner(n, n) = chol_;
  m.chol_.row(n).head(n) = l.transpose();
  m.chol_(n, n) = std::sqrt(d2);
  m.solve_alpha();
  return m;
}

}  // namespace mgtune
