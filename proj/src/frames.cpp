#include "mgtune/frames.hpp"

#include <cmath>
#include <numbers>

namespace mgtune {

namespace {
constexpr double kShiftB = 2.0 * std::numbers::pi / 3.0;
constexpr double kShiftC = 4.0 * std::numbers::pi / 3.0;
}  // namespace

Dq0 park(const ThreePhase& x, Angle theta) {
  const double t = theta.rad;
  const double ca = std::cos(t), cb = std::cos(t - kShiftB), cc = std::cos(t - kShiftC);
  const double sa = std::sin(t), sb = std::sin(t - kShiftB), sc = std::sin(t - kShiftC);
  constexpr double k = 2.0 / 3.0;
  return {k * (ca * x.a + cb * x.b + cc * x.c),
          -k * (sa * x.a + sb * x.b + sc * x.c),
          k * 0.5 * (x.a + x.b + x.c)};
}

ThreePhase inverse_park(const Dq0& x, Angle theta) {
  const double t = theta.rad;
  auto leg = [&](double shift) { return std::cos(t - shift) * x.d - std::sin(t - shift) * x.q + x.zero; };
  return {leg(0.0), leg(kShiftB), leg(kShiftC)};
}

Angle grid_angle(double t, double f_grid) { return {2.0 * std::numbers::pi * f_grid * t}; }

}  // namespace mgtune
