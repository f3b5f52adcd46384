#pragma once

#include "mgtune/frames.hpp"

namespace mgtune {

/// PI gains. The controller output is a per-unit modulation command, so kp
/// is in 1/A and ki in 1/(A*s).
struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
};

/// Accumulated error*time per dq0 axis.
struct PiState {
  Dq0 integrators;
};

/// How a modulation index maps to an inverter phase voltage.
enum class LinkMapping {
  half,  // v = m * v_dc / 2
  full,  // v = m * v_dc
};

/// Voltage produced by a modulation index of 1.
double link_voltage(LinkMapping mapping, double v_dc);

struct ControlOutput {
  ThreePhase m_abc;   // saturated to [-1, 1]
  Dq0 v_cmd_dq0;      // commanded volts before saturation
};

struct PiOptions {
  /// Conditional integration: skip the integrator update on a step whose
  /// output saturates.
  bool anti_windup = false;
};

struct PiStepResult {
  ControlOutput output;
  PiState state;
};

PiState pi_reset(const PiState& s);

/// One control period of the dq0 PI current loop.
/// e = i_ref - park(i_meas); integrators += e*dt; m_dq0 = kp*e + ki*integrators;
/// m_abc = clamp(inverse_park(m_dq0), -1, 1); v_cmd = m_dq0 * v_link.
PiStepResult pi_step(const PiGains& g, const PiState& s, const ThreePhase& i_meas_abc,
                     const Dq0& i_ref_dq0, Angle theta, double dt, double v_link,
                     const PiOptions& opts = {});

}  // namespace mgtune
