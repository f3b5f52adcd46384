#pragma once

namespace mgtune {

/// Three samples in the stationary abc frame.
struct ThreePhase {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Three samples in the rotating dq0 frame.
struct Dq0 {
  double d = 0.0;
  double q = 0.0;
  double zero = 0.0;
};

/// Electrical angle of the rotating frame in radians. Not wrapped.
struct Angle {
  double rad = 0.0;
};

/// Amplitude-invariant Park transform: (2/3) * M(theta) * x.
Dq0 park(const ThreePhase& x, Angle theta);

/// Exact inverse of park() for the same angle.
ThreePhase inverse_park(const Dq0& x, Angle theta);

/// Open-loop frame angle 2*pi*f*t, zero at t = 0.
Angle grid_angle(double t, double f_grid);

inline ThreePhase operator+(const ThreePhase& x, const ThreePhase& y) { return {x.a + y.a, x.b + y.b, x.c + y.c}; }
inline ThreePhase operator*(double s, const ThreePhase& x) { return {s * x.a, s * x.b, s * x.c}; }
inline Dq0 operator+(const Dq0& x, const Dq0& y) { return {x.d + y.d, x.q + y.q, x.zero + y.zero}; }
inline Dq0 operator-(const Dq0& x, const Dq0& y) { return {x.d - y.d, x.q - y.q, x.zero - y.zero}; }
inline Dq0 operator*(double s, const Dq0& x) { return {s * x.d, s * x.q, s * x.zero}; }

}  // namespace mgtune
