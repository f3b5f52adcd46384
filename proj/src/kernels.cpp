#include "mgtune/kernels.hpp"

#include "mgtune/runner.hpp"

namespace mgtune {

std::vector<Posterior> posterior_batch(const GpModel& gp, const Eigen::MatrixXd& points) {
  const auto n = static_cast<long>(points.rows());
  std::vector<Posterior> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = gp.posterior_at(points.row(i).transpose());
  return out;
}

std::vector<Posterior> posterior_batch_serial(const GpModel& gp, const Eigen::MatrixXd& points) {
  std::vector<Posterior> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.push_back(gp.posterior_at(points.row(i).transpose()));
  return out;
}

std::vector<double> sweep_performance(const EnvConfig& env, std::span<const PiGains> gains) {
  env.validate();
  const auto n = static_cast<long>(gains.size());
  std::vector<double> out(gains.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_episode(env, gains[static_cast<std::size_t>(i)]).j;
  return out;
}

std::vector<double> sweep_performance_serial(const EnvConfig& env, std::span<const PiGains> gains) {
  std::vector<double> out;
  out.reserve(gains.size());
  for (const auto& g : gains) out.push_back(run_episode(env, g).j);
  return out;
}

}  // namespace mgtune
