// Numerical stance phase: full SLIP dynamics under the momentum controller,
// fixed-step RK4 with bisection-localized liftoff.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "slip/controllers.hpp"
#include "slip/resets.hpp"
#include "slip/trajectory.hpp"
#include "slip/types.hpp"

namespace slip {

struct StanceRates {
  double r_dot = 0.0;
  double r_ddot = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;
};

/// Polar SLIP equations of motion with hip torque:
///   r̈ = r·θ̇² − k/m·(r − r0) − b/m·ṙ − g·cosθ
///   θ̈ = −2·ṙ·θ̇/r + g/r·sinθ + τ/(m·r²)
inline StanceRates stance_dynamics(const StanceState& s, double torque, const SlipParams& p) {
  const double r_ddot = s.r * s.theta_dot * s.theta_dot - p.k / p.m * (s.r - p.r0) -
                        p.b / p.m * s.r_dot - p.g * std::cos(s.theta);
  const double theta_ddot = -2.0 * s.r_dot * s.theta_dot / s.r + p.g / s.r * std::sin(s.theta) +
                            torque / (p.m * s.r * s.r);
  return {s.r_dot, r_ddot, s.theta_dot, theta_ddot};
}

/// Leg force along the shaft; liftoff when it rises through zero.
inline double leg_force(const StanceState& s, const SlipParams& p) {
  return p.k * (s.r - p.r0) + p.b * s.r_dot;
}

enum class TorqueMode {
  ZeroOrderHold,  // controller sampled every control_period
  Continuous,     // controller sampled every integrator step
  Off,            // τ ≡ 0
};

struct SimOptions {
  double dt = 1e-5;
  double control_period = 1e-3;
  TorqueMode torque_mode = TorqueMode::ZeroOrderHold;
  double event_time_tolerance = 1e-10;
  // Stance may last at most this many undamped half periods π/sqrt(k/m).
  double time_budget_factor = 10.0;
  bool record = false;
  double sample_period = 1e-3;
};

struct StanceResult {
  StanceState liftoff;
  double duration = 0.0;
  double bottom_time = -1.0;
  double liftoff_momentum = 0.0;
  double max_abs_torque = 0.0;
  std::vector<TrajectorySample> samples;  // times relative to touchdown
};

namespace detail {

inline StanceState advance(const StanceState& s, const StanceRates& d, double h) {
  return {s.r + h * d.r_dot, s.r_dot + h * d.r_ddot, s.theta + h * d.theta_dot,
          s.theta_dot + h * d.theta_ddot};
}

inline StanceState rk4_step(const StanceState& s, double torque, double h, const SlipParams& p) {
  const StanceRates k1 = stance_dynamics(s, torque, p);
  const StanceRates k2 = stance_dynamics(advance(s, k1, 0.5 * h), torque, p);
  const StanceRates k3 = stance_dynamics(advance(s, k2, 0.5 * h), torque, p);
  const StanceRates k4 = stance_dynamics(advance(s, k3, h), torque, p);
  const double w = h / 6.0;
  return {s.r + w * (k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot),
          s.r_dot + w * (k1.r_ddot + 2.0 * k2.r_ddot + 2.0 * k3.r_ddot + k4.r_ddot),
          s.theta + w * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
          s.theta_dot + w * (k1.theta_ddot + 2.0 * k2.theta_ddot + 2.0 * k3.theta_ddot + k4.theta_ddot)};
}

inline TrajectorySample stance_sample(double t, const StanceState& s, double tau, double x_toe) {
  const FlightState f = stance_to_flight(s);
  return {t, TrajectoryPhase::Stance, s.r, s.r_dot, s.theta, s.theta_dot,
          x_toe - s.r * std::sin(s.theta), f.y, f.x_dot, f.y_dot, tau};
}

}  // namespace detail

/// Integrates stance from touchdown until the leg force returns to zero with
/// the leg extending. `x_toe` only positions recorded samples.
inline StanceResult integrate_stance(const StanceState& td, const ControlInputs& inputs,
                                     const SlipParams& params, const SimOptions& opt = {},
                                     double x_toe = 0.0) {
  td.validate();
  if (std::abs(td.r - params.r0) > kTouchdownHeightTolerance)
    throw GaitError(ErrorCode::InvalidState, "touchdown must be at rest length", Phase::Stance);
  if (!(td.r_dot < 0.0))
    throw GaitError(ErrorCode::InvalidState, "touchdown radial velocity must be negative", Phase::Stance);
  if (!(opt.dt > 0.0)) throw GaitError(ErrorCode::InvalidParams, "dt must be positive");

  const long steps_per_control =
      opt.torque_mode == TorqueMode::ZeroOrderHold
          ? std::max(1L, std::lround(opt.control_period / opt.dt))
          : 1L;
  const double control_dt = static_cast<double>(steps_per_control) * opt.dt;
  const long steps_per_sample = std::max(1L, std::lround(opt.sample_period / opt.dt));
  const double budget = opt.time_budget_factor * std::numbers::pi / std::sqrt(params.k / params.m);
  const long max_steps = static_cast<long>(std::ceil(budget / opt.dt));

  StanceResult out;
  StanceState s = td;
  PidState pid = PidState::at_touchdown(angular_momentum(td, params));
  double tau = 0.0;

  for (long step = 0; step < max_steps; ++step) {
    const double t = static_cast<double>(step) * opt.dt;
    if (opt.torque_mode != TorqueMode::Off && step % steps_per_control == 0) {
      std::tie(tau, pid) = hip_torque(inputs.p_bar, s, pid, inputs, params, control_dt);
      out.max_abs_torque = std::max(out.max_abs_torque, std::abs(tau));
    }
    if (opt.record && step % steps_per_sample == 0)
      out.samples.push_back(detail::stance_sample(t, s, tau, x_toe));

    const StanceState next = detail::rk4_step(s, tau, opt.dt, params);
    if (!next.finite() || next.r <= 0.0 || next.r * std::cos(next.theta) <= 0.0) {
      throw GaitError(ErrorCode::GroundFault,
                      "mass driven to the ground at t = " + std::to_string(t + opt.dt), Phase::Stance);
    }

    if (out.bottom_time < 0.0 && s.r_dot <= 0.0 && next.r_dot > 0.0)
      out.bottom_time = t + opt.dt * (-s.r_dot) / (next.r_dot - s.r_dot);

    const double f0 = leg_force(s, params);
    const double f1 = leg_force(next, params);
    if (f0 < 0.0 && f1 >= 0.0 && next.r_dot > 0.0) {
      double lo = 0.0;
      double hi = opt.dt;
      while (hi - lo > opt.event_time_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (leg_force(detail::rk4_step(s, tau, mid, params), params) < 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double h = 0.5 * (lo + hi);
      out.liftoff = detail::rk4_step(s, tau, h, params);
      if (!(out.liftoff.r_dot > 0.0))
        throw GaitError(ErrorCode::FailedLiftoff, "leg not extending at zero force", Phase::Liftoff);
      out.duration = t + h;
      out.liftoff_momentum = angular_momentum(out.liftoff, params);
      if (opt.record) out.samples.push_back(detail::stance_sample(out.duration, out.liftoff, tau, x_toe));
      return out;
    }
    s = next;
  }
  throw GaitError(ErrorCode::FailedLiftoff,
                  "leg force never returned to zero within " + std::to_string(budget) + " s",
                  Phase::Stance);
}

}  // namespace slip
