// Ballistic flight: flow, descent (apex to touchdown) and ascent (liftoff to apex).
#pragma once

#include <cmath>
#include <string>

#include "slip/types.hpp"

namespace slip {

inline FlightState flight_flow(const FlightState& f0, double t, const SlipParams& p) {
  return {f0.x_dot, f0.y + f0.y_dot * t - 0.5 * p.g * t * t, f0.y_dot - p.g * t};
}

/// Time from apex until the toe, held at theta_td, reaches the ground.
inline double touchdown_time(const ApexState& apex, double theta_td, const SlipParams& p) {
  const double radicand = 2.0 * p.g * apex.y - 2.0 * p.g * p.r0 * std::cos(theta_td);
  if (radicand < 0.0) {
    throw GaitError(ErrorCode::UnreachableTouchdown,
                    "apex height " + std::to_string(apex.y) + " below touchdown height " +
                        std::to_string(p.r0 * std::cos(theta_td)),
                    Phase::Descent);
  }
  return std::sqrt(radicand) / p.g;
}

/// Descent map: apex to the flight state at touchdown. The height is snapped
/// to r0·cos(theta_td), which the closed-form time satisfies up to rounding.
inline FlightState integrate_descent(const ApexState& apex, double theta_td, const SlipParams& p) {
  const double t_td = touchdown_time(apex, theta_td, p);
  FlightState td = flight_flow({apex.x_dot, apex.y, 0.0}, t_td, p);
  td.y = p.r0 * std::cos(theta_td);
  return td;
}

/// Ascent map: liftoff to apex. A descending liftoff means immediate re-touchdown.
inline ApexState integrate_ascent(const FlightState& lo, const SlipParams& p) {
  if (lo.y_dot < 0.0) {
    throw GaitError(ErrorCode::DescendingAtLiftoff,
                    "vertical velocity at liftoff is " + std::to_string(lo.y_dot), Phase::Ascent);
  }
  return {lo.x_dot, lo.y + lo.y_dot * lo.y_dot / (2.0 * p.g)};
}

/// Inverse of the descent map: the apex a touchdown state came from.
inline ApexState apex_from_touchdown(const FlightState& td, const SlipParams& p) {
  return {td.x_dot, td.y + td.y_dot * td.y_dot / (2.0 * p.g)};
}

}  // namespace slip
