// Closed-form stance flow of the Taylor-linearized SLIP.
//
// With constant angular momentum p̄ and radial gravity, expanding 1/r³ and
// 1/r² about the gravity-loaded length r_g gives
//
//   r̈ + 2ζω·ṙ + ω²·r = Γ,    θ̇ = p̄/(m r_g²)·(3 − 2 r/r_g),
//
// a damped oscillator driving a leg-angle integrator. For ζ < 1:
//
//   r(t) = M e^{−ζωt} cos(ω_d t + ψ) + Γ/ω²
//   ṙ(t) = −M ω e^{−ζωt} cos(ω_d t + ψ + ψ₂)
//   θ(t) = θ_td + X t + Y (e^{−ζωt} cos(ω_d t + ψ − ψ₂) − cos(ψ − ψ₂))
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "slip/types.hpp"

namespace slip {

struct StanceFlowCoeffs {
  double omega = 0.0;    // rad/s
  double zeta = 0.0;
  double omega_d = 0.0;  // rad/s
  double Gamma = 0.0;    // m/s²
  double A = 0.0;        // m
  double B = 0.0;        // m
  double M = 0.0;        // m
  double psi = 0.0;
  double psi2 = 0.0;
  double X = 0.0;        // rad/s
  double Y = 0.0;        // rad
  double M2 = 0.0;       // N/m

  /// Equilibrium of the linearized radial oscillator.
  double r_eq() const { return Gamma / (omega * omega); }
};

inline StanceFlowCoeffs flow_coeffs(const StanceState& td, double p_bar, const SlipParams& params) {
  const double m = params.m;
  const double rg = params.r_g();
  const double p2 = p_bar * p_bar;

  StanceFlowCoeffs c;
  c.omega = std::sqrt(params.k / m + 3.0 * p2 / (m * m * std::pow(rg, 4)));
  c.Gamma = p2 / (m * m * rg * rg * rg) + c.omega * c.omega * rg;
  c.zeta = params.b / (2.0 * m * c.omega);
  if (!(c.zeta < 1.0)) {
    throw GaitError(ErrorCode::Overdamped, "damping ratio " + std::to_string(c.zeta) + " >= 1",
                    Phase::Stance);
  }
  const double s = std::sqrt(1.0 - c.zeta * c.zeta);
  c.omega_d = c.omega * s;
  c.A = td.r - c.Gamma / (c.omega * c.omega);
  c.B = (td.r_dot + c.zeta * c.omega * c.A) / c.omega_d;
  c.M = std::hypot(c.A, c.B);
  c.psi = std::atan2(-c.B, c.A);
  c.psi2 = std::atan2(-s, c.zeta);
  c.X = p_bar / (m * rg * rg) * (3.0 - 2.0 * c.Gamma / (rg * c.omega * c.omega));
  c.Y = 2.0 * p_bar * c.M / (m * rg * rg * rg * c.omega);
  c.M2 = std::sqrt(params.k * params.k + params.b * params.b * c.omega * c.omega -
                   2.0 * params.b * params.k * c.omega * std::cos(c.psi2));
  return c;
}

/// Evaluates the closed-form flow at time t after touchdown.
inline StanceState stance_flow(double t, const StanceFlowCoeffs& c, const StanceState& td, double p_bar,
                               const SlipParams& params) {
  const double decay = std::exp(-c.zeta * c.omega * t);
  const double phase = c.omega_d * t + c.psi;
  const double rg = params.r_g();
  StanceState s;
  s.r = c.M * decay * std::cos(phase) + c.r_eq();
  s.r_dot = -c.M * c.omega * decay * std::cos(phase + c.psi2);
  s.theta = td.theta + c.X * t + c.Y * (decay * std::cos(phase - c.psi2) - std::cos(c.psi - c.psi2));
  s.theta_dot = p_bar / (params.m * rg * rg) *
                (3.0 - 2.0 * (c.M / rg) * decay * std::cos(phase) - 2.0 * c.Gamma / (rg * c.omega * c.omega));
  return s;
}

/// Phase offset of the leg force, k·cosφ − bω·cos(φ + ψ₂) = M₂·cos(φ + ψ₄).
inline double leg_force_phase(const StanceFlowCoeffs& c, const SlipParams& params) {
  const double s = std::sqrt(1.0 - c.zeta * c.zeta);
  return std::atan2(params.b * c.omega * s, params.k - params.b * c.omega * c.zeta);
}

/// Time of maximum compression (ṙ = 0), first branch.
inline double bottom_time(const StanceFlowCoeffs& c) {
  return (std::numbers::pi / 2.0 - c.psi - c.psi2) / c.omega_d;
}

struct LiftoffOptions {
  std::optional<double> psi4;  // defaults to leg_force_phase()
};

struct LiftoffTime {
  double t_lo = 0.0;
  double t_b = 0.0;
  double psi4 = 0.0;
};

/// Approximate liftoff time: leg force k(r − r0) + bṙ = 0 solved on the
/// closed-form flow with the decay frozen at e^{−2ζω t_b} (equal compression
/// and decompression times), taking the 2π − arccos branch.
inline LiftoffTime liftoff_time(const StanceFlowCoeffs& c, const SlipParams& params,
                                const LiftoffOptions& opt = {}) {
  LiftoffTime out;
  out.t_b = bottom_time(c);
  out.psi4 = opt.psi4.value_or(leg_force_phase(c, params));
  const double w2 = c.omega * c.omega;
  const double arg = params.k * (params.r0 * w2 - c.Gamma) /
                     (c.M2 * c.M * w2 * std::exp(-c.zeta * c.omega * 2.0 * out.t_b));
  if (!(arg >= -1.0 && arg <= 1.0)) {
    throw GaitError(ErrorCode::NoLiftoffRoot, "arccos argument " + std::to_string(arg) + " outside [-1, 1]",
                    Phase::Liftoff);
  }
  out.t_lo = (2.0 * std::numbers::pi - std::acos(arg) - c.psi - out.psi4) / c.omega_d;
  if (!(out.t_lo > 0.0) || !(out.t_b > 0.0)) {
    throw GaitError(ErrorCode::NonpositiveTime, "liftoff time " + std::to_string(out.t_lo), Phase::Liftoff);
  }
  return out;
}

struct AnalyticStance {
  StanceState liftoff;
  StanceFlowCoeffs coeffs;
  LiftoffTime timing;
};

/// Closed-form stance map. The liftoff angular rate follows from constant
/// momentum: θ̇_lo = p̄/(m r_lo²).
inline AnalyticStance stance_map_analytic(const StanceState& td, double p_bar, const SlipParams& params,
                                          const LiftoffOptions& opt = {}) {
  if (!(td.r_dot < 0.0))
    throw GaitError(ErrorCode::InvalidState, "touchdown radial velocity must be negative", Phase::Stance);
  AnalyticStance out;
  out.coeffs = flow_coeffs(td, p_bar, params);
  out.timing = liftoff_time(out.coeffs, params, opt);
  out.liftoff = stance_flow(out.timing.t_lo, out.coeffs, td, p_bar, params);
  out.liftoff.theta_dot = p_bar / (params.m * out.liftoff.r * out.liftoff.r);
  return out;
}

}  // namespace slip
