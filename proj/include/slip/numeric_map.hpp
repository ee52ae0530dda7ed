// Apex-to-apex return map of the full hybrid simulator.
#pragma once

#include <cmath>

#include "slip/controllers.hpp"
#include "slip/flight.hpp"
#include "slip/resets.hpp"
#include "slip/stance_sim.hpp"
#include "slip/trajectory.hpp"
#include "slip/types.hpp"

namespace slip {

/// Everything one simulated hop produced, for diagnostics.
struct NumericHop {
  ApexState next;
  AoaSolution aoa;
  FlightState touchdown_flight;
  StanceState touchdown;
  StanceState liftoff;
  FlightState liftoff_flight;
  double liftoff_momentum = 0.0;
  double stance_duration = 0.0;
  double hop_duration = 0.0;
  double horizontal_advance = 0.0;  // x travelled apex to apex
  double max_abs_torque = 0.0;
  HybridTrajectory trajectory;  // filled only when SimOptions::record is set
};

namespace detail {

inline void sample_flight(HybridTrajectory& traj, TrajectoryPhase phase, const FlightState& f0, double t0,
                          double x0, double duration, double leg_theta, const SimOptions& opt,
                          const SlipParams& p, long first = 0) {
  const long n = static_cast<long>(std::floor(duration / opt.sample_period));
  for (long i = first; i <= n; ++i) {
    const double t = static_cast<double>(i) * opt.sample_period;
    if (t >= duration && i > 0) break;
    const FlightState f = flight_flow(f0, t, p);
    traj.samples.push_back({t0 + t, phase, p.r0, 0.0, leg_theta, 0.0, x0 + f0.x_dot * t, f.y, f.x_dot,
                            f.y_dot, 0.0});
  }
}

}  // namespace detail

/// Composes AoA selection (implicit solver, E_v = m·g·y_apex), descent,
/// touchdown reset, simulated stance, liftoff reset and ascent. Errors are
/// re-tagged with the phase where the gait failed. `t0`/`x0` place the hop on
/// a global time/position axis for recorded trajectories.
inline NumericHop return_map_numeric(const ApexState& apex, const ControlInputs& inputs,
                                     const SlipParams& params, const SimOptions& opt = {},
                                     double t0 = 0.0, double x0 = 0.0) {
  apex.validate();
  NumericHop hop;
  const double E_v = params.m * params.g * apex.y;
  try {
    hop.aoa = solve_aoa_implicit(apex.x_dot, E_v, inputs.k_theta, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::AngleOfAttack);
  }
  const double theta_td = hop.aoa.theta_td;

  double t_td = 0.0;
  try {
    t_td = touchdown_time(apex, theta_td, params);
    hop.touchdown_flight = integrate_descent(apex, theta_td, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::Descent);
  }
  try {
    hop.touchdown = flight_to_stance(hop.touchdown_flight, theta_td, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::Touchdown);
  }
  if (!(hop.touchdown.r_dot < 0.0)) {
    throw GaitError(ErrorCode::InvalidState, "leg not compressing at touchdown", Phase::Touchdown);
  }

  const double x_td = x0 + apex.x_dot * t_td;
  const double x_toe = x_td + params.r0 * std::sin(theta_td);
  StanceResult stance;
  try {
    stance = integrate_stance(hop.touchdown, inputs, params, opt, x_toe);
  } catch (const GaitError& e) {
    throw e.in_phase(e.phase() == Phase::None ? Phase::Stance : e.phase());
  }
  hop.liftoff = stance.liftoff;
  hop.liftoff_momentum = stance.liftoff_momentum;
  hop.stance_duration = stance.duration;
  hop.max_abs_torque = stance.max_abs_torque;
  hop.liftoff_flight = stance_to_flight(stance.liftoff);
  try {
    hop.next = integrate_ascent(hop.liftoff_flight, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::Ascent);
  }
  const double t_rise = hop.liftoff_flight.y_dot / params.g;
  hop.hop_duration = t_td + stance.duration + t_rise;
  const double x_lo = x_toe - stance.liftoff.r * std::sin(stance.liftoff.theta);
  hop.horizontal_advance = x_lo + hop.liftoff_flight.x_dot * t_rise - x0;

  if (opt.record) {
    auto& traj = hop.trajectory;
    const double t_stance = t0 + t_td;
    const double t_lo = t_stance + stance.duration;
    traj.events.push_back({EventKind::Apex, t0});
    traj.events.push_back({EventKind::Touchdown, t_stance});
    if (stance.bottom_time >= 0.0) traj.events.push_back({EventKind::Bottom, t_stance + stance.bottom_time});
    traj.events.push_back({EventKind::Liftoff, t_lo});

    detail::sample_flight(traj, TrajectoryPhase::Descent, {apex.x_dot, apex.y, 0.0}, t0, x0, t_td, theta_td,
                          opt, params);
    for (auto s : stance.samples) {
      s.t += t_stance;
      traj.samples.push_back(s);
    }
    detail::sample_flight(traj, TrajectoryPhase::Ascent, hop.liftoff_flight, t_lo, x_lo, t_rise,
                          stance.liftoff.theta, opt, params, 1);
  }
  return hop;
}

}  // namespace slip
