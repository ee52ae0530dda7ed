#pragma once

#include <cmath>

#include "slip/types.hpp"

namespace slip {

struct QuadraticRoots {
  double plus;   // (-b + sqrt(disc)) / 2a
  double minus;  // (-b - sqrt(disc)) / 2a
};

/// Roots of a·x² + b·x + c, labelled by the sign in front of the square root
/// (not by magnitude). a = 0 with b ≠ 0 degrades to the linear root for both.
inline QuadraticRoots quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) throw GaitError(ErrorCode::DegenerateQuadratic, "a = b = 0");
    const double x = -c / b;
    return {x, x};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || !std::isfinite(disc)) {
    throw GaitError(ErrorCode::NegativeDiscriminant,
                    "b^2 - 4ac = " + std::to_string(disc));
  }
  const double sq = std::sqrt(disc);
  return {(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)};
}

}  // namespace slip
