#include "mgtune/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgtune {

double link_voltage(LinkMapping mapping, double v_dc) {
  return mapping == LinkMapping::full ? v_dc : 0.5 * v_dc;
}

PiState pi_reset(const PiState&) { return PiState{}; }

PiStepResult pi_step(const PiGains& g, const PiState& s, const ThreePhase& i_meas_abc,
                     const Dq0& i_ref_dq0, Angle theta, double dt, double v_link,
                     const PiOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("pi_step: dt must be > 0");
  if (!(v_link > 0.0)) throw std::invalid_argument("pi_step: link voltage must be > 0");

  const Dq0 error = i_ref_dq0 - park(i_meas_abc, theta);
  PiState next{s.integrators + dt * error};
  auto command = [&](const Dq0& integ) { return g.kp * error + g.ki * integ; };

  Dq0 m_dq0 = command(next.integrators);
  ThreePhase m = inverse_park(m_dq0, theta);
  const bool saturated = std::abs(m.a) > 1.0 || std::abs(m.b) > 1.0 || std::abs(m.c) > 1.0;
  if (opts.anti_windup && saturated) {
    next = s;
    m_dq0 = command(next.integrators);
    m = inverse_park(m_dq0, theta);
  }

  auto clamp = [](double v) { return std::clamp(v, -1.0, 1.0); };
  return {{{clamp(m.a), clamp(m.b), clamp(m.c)}, v_link * m_dq0}, next};
}

}  // namespace mgtune
