#include "mgtune/plant.hpp"

#include <cmath>
#include <stdexcept>

#include "mgtune/expm.hpp"

namespace mgtune {

void GridParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!positive(v_dc)) throw std::invalid_argument("v_dc must be > 0");
  if (!positive(f_grid)) throw std::invalid_argument("f_grid must be > 0");
  if (!positive(l_filt) || !positive(c_filt) || !positive(l_load))
    throw std::invalid_argument("l_filt, c_filt and l_load must be > 0");
  if (!non_negative(r_filt) || !non_negative(r_load))
    throw std::invalid_argument("r_filt and r_load must be >= 0");
}

PlantModel build_rl_plant(const std::array<double, 3>& r, const std::array<double, 3>& l) {
  PlantModel m;
  m.a = Eigen::MatrixXd::Zero(3, 3);
  m.b = Eigen::MatrixXd::Zero(3, 3);
  static const char* names[] = {"i_a", "i_b", "i_c"};
  for (int p = 0; p < 3; ++p) {
    if (!(l[p] > 0.0) || !std::isfinite(l[p])) throw std::invalid_argument("inductance must be > 0");
    if (!(r[p] >= 0.0) || !std::isfinite(r[p])) throw std::invalid_argument("resistance must be >= 0");
    m.a(p, p) = -r[p] / l[p];
    m.b(p, p) = 1.0 / l[p];
    m.state_labels.emplace_back(names[p]);
  }
  return m;
}

PlantModel build_lc_plant(const GridParams& p) {
  p.validate();
  PlantModel m;
  m.a = Eigen::MatrixXd::Zero(9, 9);
  m.b = Eigen::MatrixXd::Zero(9, 3);
  for (int ph = 0; ph < 3; ++ph) {
    const Eigen::Index f = kFilterCurrent + ph, v = kCapVoltage + ph, l = kLoadCurrent + ph;
    m.a(f, f) = -p.r_filt / p.l_filt;
    m.a(f, v) = -1.0 / p.l_filt;
    m.b(f, ph) = 1.0 / p.l_filt;
    m.a(v, f) = 1.0 / p.c_filt;
    m.a(v, l) = -1.0 / p.c_filt;
    m.a(l, v) = 1.0 / p.l_load;
    m.a(l, l) = -p.r_load / p.l_load;
  }
  for (const char* group : {"i_f", "v_c", "i_l"})
    for (const char* ph : {"a", "b", "c"}) m.state_labels.push_back(std::string(group) + "_" + ph);
  return m;
}

DiscretePlant zoh_discretize(const PlantModel& m, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  const Eigen::Index n = m.n_states(), k = m.n_inputs();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + k, n + k);
  aug.topLeftCorner(n, n) = m.a * dt;
  aug.topRightCorner(n, k) = m.b * dt;
  const Eigen::MatrixXd e = expm(aug);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, k), dt};
}

PlantState step_zoh(const DiscretePlant& d, const PlantState& s, const Eigen::VectorXd& u) {
  if (s.x.size() != d.a_d.rows() || u.size() != d.b_d.cols())
    throw std::invalid_argument("step_zoh: dimension mismatch");
  return {d.a_d * s.x + d.b_d * u, s.t + d.dt};
}

PlantState step_rk4(const PlantModel& m, const PlantState& s, const Eigen::VectorXd& u, double dt,
                    int substeps) {
  if (substeps < 1) throw std::invalid_argument("step_rk4: substeps must be >= 1");
  if (s.x.size() != m.n_states() || u.size() != m.n_inputs())
    throw std::invalid_argument("step_rk4: dimension mismatch");
  const double h = dt / substeps;
  const Eigen::VectorXd bu = m.b * u;
  auto f = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return m.a * x + bu; };
  Eigen::VectorXd x = s.x;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {x, s.t + dt};
}

}  // namespace mgtune
