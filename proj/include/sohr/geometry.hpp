#pragma once

#include <cmath>

namespace sohr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Counter-clockwise rotation by `angle`.
inline Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a;
}

// Wraps a difference into (-pi, pi].
inline double wrap_pm_pi(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  a = std::fmod(a, two_pi);
  if (a <= -3.14159265358979323846) a += two_pi;
  if (a > 3.14159265358979323846) a -= two_pi;
  return a;
}

}  // namespace sohr
