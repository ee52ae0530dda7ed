// Affine stance map used for the closed-form fixed points:
//
//   z_lo = [r0, C1·ṙ_td + C2, θ_td + C3·ṙ_td + C4, p̄/(m r0²)]
//
// C1..C4 come from the closed-form flow with touchdown at r0 and the liftoff
// time frozen at a nominal touchdown condition.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "slip/quadratic.hpp"
#include "slip/stance_flow.hpp"
#include "slip/types.hpp"

namespace slip {

/// Assumed touchdown leg-rate offset angle: (p̄/0.7)·(π/4)·(1 − kθ).
inline double theta_offset(double p_bar, double k_theta) {
  return (p_bar / 0.7) * (std::numbers::pi / 4.0) * (1.0 - k_theta);
}

struct StanceMapConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double t_lo = 0.0;             // frozen liftoff time
  double nominal_r_dot_td = 0.0; // touchdown radial velocity t_lo was evaluated at
};

/// C1..C4 for a given frozen liftoff time. A is taken at r_td = r0, so the
/// constants do not depend on the touchdown state.
inline StanceMapConstants stance_map_constants(double p_bar, double t_lo, const SlipParams& params) {
  const StanceFlowCoeffs c = flow_coeffs({params.r0, -1.0, 0.0, 0.0}, p_bar, params);
  const double m = params.m;
  const double rg = params.r_g();
  const double w = c.omega;
  const double wd = c.omega_d;
  const double z = c.zeta;
  const double s = std::sqrt(1.0 - z * z);
  const double A = c.A;
  const double e = std::exp(-z * w * t_lo);
  const double sn = std::sin(wd * t_lo);
  const double cs = std::cos(wd * t_lo);
  const double q = m * rg * rg * rg;

  StanceMapConstants k;
  k.t_lo = t_lo;
  k.C1 = w * e * (s * cs - z * sn) / wd;
  k.C2 = A * w * e / wd * (-s * wd * sn - z * z * w * sn + z * cs * (s * w - wd));
  k.C3 = 2.0 * s * p_bar * e * cs / (q * w * wd) + 2.0 * z * p_bar * e * sn / (q * w * wd) -
         2.0 * s * p_bar / (q * w * wd);
  k.C4 = -2.0 * A * s * z * p_bar / (q * wd) + 2.0 * A * z * z * p_bar * e * sn / (q * wd) -
         2.0 * A * s * p_bar * e * sn / (q * w) - 2.0 * A * z * p_bar / (q * w) +
         2.0 * A * s * z * p_bar * e * cs / (q * wd) + 2.0 * A * z * p_bar * e * cs / (q * w) -
         p_bar * t_lo * (2.0 * c.Gamma - 3.0 * rg * w * w) / (q * w * w);
  return k;
}

/// Coefficients (a, b, c) of the touchdown energy balance, quadratic in ṙ_td.
struct QuadraticCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

inline QuadraticCoeffs energy_coeffs(const StanceMapConstants& C, double p_bar, double k_theta,
                                     const SlipParams& params) {
  const double T = std::tan(theta_offset(p_bar, k_theta));
  const double m = params.m;
  return {0.5 * m * (1.0 - C.C1 * C.C1 + T * T), -C.C1 * C.C2 * m,
          -p_bar * p_bar / (2.0 * m * params.r0 * params.r0) - 0.5 * C.C2 * C.C2 * m};
}

/// Coefficients of the fore-aft speed balance, quadratic in θ_td given ṙ_td.
inline QuadraticCoeffs speed_coeffs(const StanceMapConstants& C, double r_dot_td, double p_bar,
                                    double k_theta, const SlipParams& params) {
  const double T = std::tan(theta_offset(p_bar, k_theta));
  const double P = p_bar / (params.m * params.r0);
  const double u = C.C4 + C.C3 * r_dot_td;  // θ_lo − θ_td
  const double w = C.C2 + C.C1 * r_dot_td;  // ṙ_lo
  return {-0.5 * r_dot_td * T - 0.5 * P, -r_dot_td - (P * u - w), w * u + r_dot_td * T - (-2.0 + u * u) * P / 2.0};
}

struct NominalOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
  LiftoffOptions liftoff;
};

/// Stance-map constants with t_lo evaluated at the self-consistent nominal
/// touchdown: ṙ_td is iterated through (liftoff time → C1..C4 → energy root)
/// until it stops changing.
inline StanceMapConstants nominal_stance_constants(double p_bar, double k_theta, const SlipParams& params,
                                                   const NominalOptions& opt = {}) {
  double r_dot = -std::sqrt(params.g * params.r0);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const StanceFlowCoeffs c = flow_coeffs({params.r0, r_dot, 0.0, 0.0}, p_bar, params);
    const LiftoffTime lt = liftoff_time(c, params, opt.liftoff);
    StanceMapConstants C = stance_map_constants(p_bar, lt.t_lo, params);
    const QuadraticCoeffs q = energy_coeffs(C, p_bar, k_theta, params);
    double next = 0.0;
    try {
      next = quadratic_roots(q.a, q.b, q.c).minus;
    } catch (const GaitError& e) {
      throw GaitError(ErrorCode::NoRealFixedPoint, e.detail(), Phase::FixedPoint);
    }
    if (!(next < 0.0)) {
      throw GaitError(ErrorCode::NonPhysical, "nominal touchdown radial velocity is not negative",
                      Phase::FixedPoint);
    }
    C.nominal_r_dot_td = next;
    if (std::abs(next - r_dot) <= opt.tolerance * std::max(1.0, std::abs(next))) return C;
    r_dot = next;
  }
  throw GaitError(ErrorCode::NoConvergence, "nominal touchdown iteration did not converge", Phase::FixedPoint);
}

/// Affine stance map with the given constants.
inline StanceState simplified_stance_map(const StanceState& td, double p_bar, const StanceMapConstants& C,
                                         const SlipParams& params) {
  return {params.r0, C.C1 * td.r_dot + C.C2, td.theta + C.C3 * td.r_dot + C.C4,
          p_bar / (params.m * params.r0 * params.r0)};
}

inline StanceState simplified_stance_map(const StanceState& td, double p_bar, double k_theta,
                                         const SlipParams& params) {
  return simplified_stance_map(td, p_bar, nominal_stance_constants(p_bar, k_theta, params), params);
}

}  // namespace slip
