#pragma once

#include <Eigen/Dense>

namespace mgtune {

/// Matrix exponential by scaling and squaring with the [13/13] Pade
/// approximant (Higham 2005). Throws std::runtime_error if the result is not
/// finite.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

}  // namespace mgtune
