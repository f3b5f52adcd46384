#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace mgtune {

/// Electrical parameters of the inverter, LC filter and RL load.
/// Defaults are the values of the reference single-inverter setup.
struct GridParams {
  double v_dc = 1000.0;    // V
  double f_grid = 50.0;    // Hz
  double l_filt = 2e-3;    // H
  double c_filt = 20e-6;   // F
  double r_filt = 0.0;     // Ohm, series resistance of the filter inductor
  double r_load = 20.0;    // Ohm
  double l_load = 1e-3;    // H

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Continuous LTI model dx/dt = A x + B u.
struct PlantModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::vector<std::string> state_labels;

  Eigen::Index n_states() const { return a.rows(); }
  Eigen::Index n_inputs() const { return b.cols(); }
};

/// Zero-order-hold discretization x' = a_d x + b_d u of a PlantModel.
struct DiscretePlant {
  Eigen::MatrixXd a_d;
  Eigen::MatrixXd b_d;
  double dt = 0.0;
};

struct PlantState {
  Eigen::VectorXd x;
  double t = 0.0;
};

/// Per-phase series RL branches driven by phase voltages.
/// State [i_a, i_b, i_c], input [v_a, v_b, v_c].
PlantModel build_rl_plant(const std::array<double, 3>& r, const std::array<double, 3>& l);

/// Inverter -> series L filter -> shunt C -> series RL load, per phase.
/// State [i_f_abc, v_c_abc, i_l_abc], input inverter phase voltages.
PlantModel build_lc_plant(const GridParams& p);

/// Offsets of the three state groups in the LC model.
inline constexpr Eigen::Index kFilterCurrent = 0;
inline constexpr Eigen::Index kCapVoltage = 3;
inline constexpr Eigen::Index kLoadCurrent = 6;

DiscretePlant zoh_discretize(const PlantModel& m, double dt);

PlantState step_zoh(const DiscretePlant& d, const PlantState& s, const Eigen::VectorXd& u);

/// Classical RK4 with the input held over dt, split into `substeps` steps.
PlantState step_rk4(const PlantModel& m, const PlantState& s, const Eigen::VectorXd& u, double dt,
                    int substeps);

}  // namespace mgtune
