// Coordinate-change reset maps between stance (polar) and flight (Cartesian).
#pragma once

#include <cmath>
#include <string>

#include "slip/types.hpp"

namespace slip {

/// Allowed mismatch between the flight height and r0·cos(theta_td) at touchdown.
inline constexpr double kTouchdownHeightTolerance = 1e-9;

/// Liftoff reset: stance state to flight state.
inline FlightState stance_to_flight(const StanceState& s) {
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  return {-s.theta_dot * s.r * c - s.r_dot * sn, s.r * c, -s.theta_dot * s.r * sn + s.r_dot * c};
}

/// Touchdown reset: flight state to stance state with the leg at rest length.
/// Throws TouchdownMismatch when the mass is not at r0·cos(theta_td).
inline StanceState flight_to_stance(const FlightState& f, double theta_td, const SlipParams& params,
                                    double tolerance = kTouchdownHeightTolerance) {
  const double c = std::cos(theta_td);
  const double sn = std::sin(theta_td);
  const double mismatch = f.y - params.r0 * c;
  if (!(std::abs(mismatch) <= tolerance)) {
    throw GaitError(ErrorCode::TouchdownMismatch,
                    "height differs from r0*cos(theta_td) by " + std::to_string(mismatch),
                    Phase::Touchdown);
  }
  return {params.r0, -sn * f.x_dot + c * f.y_dot, theta_td, (-c * f.x_dot - sn * f.y_dot) / params.r0};
}

}  // namespace slip
