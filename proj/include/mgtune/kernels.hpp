#pragma once

// Data-parallel kernels. Each OpenMP version has a serial reference with the
// same signature and bitwise-identical results; tests compare the two and
// bench/ times them.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mgtune/control.hpp"
#include "mgtune/env.hpp"
#include "mgtune/gp.hpp"

namespace mgtune {

/// Posterior at every row of `points`.
std::vector<Posterior> posterior_batch(const GpModel& gp, const Eigen::MatrixXd& points);
std::vector<Posterior> posterior_batch_serial(const GpModel& gp, const Eigen::MatrixXd& points);

/// Episode performance J for each gain pair.
std::vector<double> sweep_performance(const EnvConfig& env, std::span<const PiGains> gains);
std::vector<double> sweep_performance_serial(const EnvConfig& env, std::span<const PiGains> gains);

}  // namespace mgtune
