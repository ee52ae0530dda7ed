// Touchdown angle selection (angle-of-attack) and the stance angular-momentum
// controller.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "slip/quadratic.hpp"
#include "slip/types.hpp"

namespace slip {

// =============================================================================
// Angle of attack
// =============================================================================

enum class AoaMethod { Implicit, QuadraticApprox };

struct AoaSolution {
  double theta_aoa = 0.0;
  double theta_td = 0.0;  // k_theta * theta_aoa
  AoaMethod method = AoaMethod::Implicit;
  double residual = 0.0;  // |Phi(theta_aoa) - theta_aoa|
  int iterations = 0;
};

struct AoaSolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  // Relaxation for theta <- (1-w)·theta + w·Phi(theta); 1 is plain iteration.
  double relaxation = 1.0;
};

/// Vertical touchdown speed squared implied by the vertical energy when the
/// leg is at angle theta_td.
inline double touchdown_vertical_speed_sq(double E_v, double theta_td, const SlipParams& p) {
  return 2.0 * E_v / p.m - 2.0 * p.g * p.r0 * std::cos(theta_td);
}

/// The AoA constraint map: Phi(theta) = atan(x_dot / sqrt(2E_v/m - 2 g r0 cos(k_theta theta))).
inline double aoa_constraint(double theta, double x_dot, double E_v, double k_theta,
                             const SlipParams& p) {
  const double radicand = touchdown_vertical_speed_sq(E_v, k_theta * theta, p);
  if (!(radicand > 0.0)) {
    throw GaitError(ErrorCode::InsufficientEnergy,
                    "apex too low to touch down at theta_td = " + std::to_string(k_theta * theta),
                    Phase::AngleOfAttack);
  }
  return std::atan(x_dot / std::sqrt(radicand));
}

namespace detail {

inline AoaSolution aoa_bisection(double x_dot, double E_v, double k_theta, const SlipParams& p,
                                 const AoaSolverOptions& opt) {
  // Solve for |x_dot| on (0, 0.99·π/2) and restore the sign; Phi is odd in x_dot.
  const double speed = std::abs(x_dot);
  auto f = [&](double th) { return aoa_constraint(th, speed, E_v, k_theta, p) - th; };
  double lo = 0.0;
  double hi = 0.99 * std::numbers::pi / 2.0;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo * f_hi > 0.0)
    throw GaitError(ErrorCode::NoConvergence, "AoA bisection bracket invalid", Phase::AngleOfAttack);
  int it = 0;
  while (hi - lo > opt.tolerance && it < 200) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    ++it;
  }
  const double th = std::copysign(0.5 * (lo + hi), x_dot);
  const double res = std::abs(aoa_constraint(th, x_dot, E_v, k_theta, p) - th);
  return {th, k_theta * th, AoaMethod::Implicit, res, it};
}

}  // namespace detail

/// Solves theta = Phi(theta) by fixed-point iteration from 0, falling back to
/// bisection when the iteration stalls.
inline AoaSolution solve_aoa_implicit(double x_dot, double E_v, double k_theta, const SlipParams& p,
                                      const AoaSolverOptions& opt = {}) {
  double theta = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double next = aoa_constraint(theta, x_dot, E_v, k_theta, p);
    const double relaxed = (1.0 - opt.relaxation) * theta + opt.relaxation * next;
    if (std::abs(next - theta) <= opt.tolerance) {
      const double res = std::abs(aoa_constraint(relaxed, x_dot, E_v, k_theta, p) - relaxed);
      if (res <= opt.tolerance) return {relaxed, k_theta * relaxed, AoaMethod::Implicit, res, it};
    }
    theta = relaxed;
  }
  AoaSolution sol = detail::aoa_bisection(x_dot, E_v, k_theta, p, opt);
  if (!(sol.residual <= opt.tolerance))
    throw GaitError(ErrorCode::NoConvergence, "AoA solver did not converge", Phase::AngleOfAttack);
  return sol;
}

/// Closed-form AoA: arctan ≈ (π/4)·z and cos ≈ 1 − θ²/2 turn the constraint
/// into a quadratic in θ², whose positive root is mapped once through Phi.
inline AoaSolution solve_aoa_approx(double x_dot, double E_v, double k_theta, const SlipParams& p) {
  const double a = 16.0 * p.g * p.r0;
  const double b = 16.0 * (2.0 * E_v / p.m - 2.0 * p.g * p.r0);
  const double c = -x_dot * x_dot * std::numbers::pi * std::numbers::pi;
  QuadraticRoots q{};
  try {
    q = quadratic_roots(a, b, c);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::AngleOfAttack);
  }
  if (q.plus < 0.0) {
    throw GaitError(ErrorCode::NegativeDiscriminant, "approximate AoA root is negative",
                    Phase::AngleOfAttack);
  }
  const double seed = std::copysign(std::sqrt(q.plus), x_dot);
  const double theta = aoa_constraint(seed, x_dot, E_v, k_theta, p);
  const double res = std::abs(aoa_constraint(theta, x_dot, E_v, k_theta, p) - theta);
  return {theta, k_theta * theta, AoaMethod::QuadraticApprox, res, 1};
}

// =============================================================================
// Angular momentum PID + gravity feed-forward
// =============================================================================

/// Controller memory across control samples; reset at every touchdown.
struct PidState {
  double integral = 0.0;
  double previous_momentum = 0.0;

  static PidState at_touchdown(double momentum) { return {0.0, momentum}; }
};

/// One control sample of τ = kp·e + ki·Σe − kd·ṗ − m·g·r·sinθ with e = p̄ − p.
/// ṗ is the backward difference over dt. When tau_max is set the output is
/// clamped and the integral is frozen while saturated.
inline std::pair<double, PidState> hip_torque(double target_p, const StanceState& s, const PidState& pid,
                                              const ControlInputs& gains, const SlipParams& params,
                                              double dt) {
  if (!(dt > 0.0)) throw GaitError(ErrorCode::InvalidParams, "control period must be positive");
  const double p = angular_momentum(s, params);
  const double err = target_p - p;
  const double p_dot = (p - pid.previous_momentum) / dt;
  const double feed_forward = -params.m * params.g * s.r * std::sin(s.theta);

  PidState next{pid.integral + err, p};
  double tau = gains.kp * err + gains.ki * next.integral - gains.kd * p_dot + feed_forward;
  if (gains.tau_max && std::abs(tau) > *gains.tau_max) {
    next.integral = pid.integral;
    tau = gains.kp * err + gains.ki * next.integral - gains.kd * p_dot + feed_forward;
    tau = std::clamp(tau, -*gains.tau_max, *gains.tau_max);
  }
  return {tau, next};
}

}  // namespace slip
