#pragma once

#include <cmath>

namespace kan3 {

/// exp(-1/x) for x > 0, else 0.
inline double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

inline double glue_derivative(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }

/// Smooth step: 0 for x <= 0, 1 for x >= 1, slope at most 2.
inline double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = glue(x), b = glue(1.0 - x);
  return a / (a + b);
}

inline double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = glue(x), b = glue(1.0 - x);
  double da = glue_derivative(x), db = -glue_derivative(1.0 - x);
  double den = a + b;
  return (da * den - a * (da + db)) / (den * den);
}

/// 1 for u <= inner, 0 for u >= outer.
inline double plateau_bump(double u, double inner, double outer) {
  return 1.0 - smoothstep((u - inner) / (outer - inner));
}

inline double plateau_bump_derivative(double u, double inner, double outer) {
  return -smoothstep_derivative((u - inner) / (outer - inner)) / (outer - inner);
}

}  // namespace kan3
