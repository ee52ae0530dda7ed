// Gait fixed points: closed-form solution of the simplified map, Newton
// iteration on the analytic or simulated return map, and local stability.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "slip/analytic_map.hpp"
#include "slip/flight.hpp"
#include "slip/numeric_map.hpp"
#include "slip/quadratic.hpp"
#include "slip/resets.hpp"
#include "slip/simplified_map.hpp"
#include "slip/types.hpp"

namespace slip {

using Matrix2 = std::array<std::array<double, 2>, 2>;
using ApexMap = std::function<ApexState(const ApexState&)>;

enum class Provenance { ClosedForm, AnalyticNumeric, SimulatorNumeric };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::AnalyticNumeric: return "analytic-numeric";
    case Provenance::SimulatorNumeric: return "simulator-numeric";
  }
  return "unknown";
}

inline std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "closed-form") return Provenance::ClosedForm;
  if (s == "analytic-numeric") return Provenance::AnalyticNumeric;
  if (s == "simulator-numeric") return Provenance::SimulatorNumeric;
  return std::nullopt;
}

struct TouchdownFixedPoint {
  double r_dot_td = 0.0;
  double theta_td = 0.0;
  double theta_dot_td = 0.0;
  double theta_offset = 0.0;
};

struct Stability {
  Matrix2 jacobian{};
  double spectral_radius = 0.0;
  bool stable = false;
};

struct FixedPointResult {
  ApexState apex;
  std::optional<TouchdownFixedPoint> touchdown;
  Matrix2 jacobian{};
  double spectral_radius = 0.0;
  bool stable = false;
  Provenance provenance = Provenance::ClosedForm;
  double residual = 0.0;  // ‖P(z*) − z*‖∞ on the map used for the Jacobian
  int iterations = 0;
};

// =============================================================================
// Linear algebra on 2×2
// =============================================================================

/// Largest eigenvalue magnitude from the characteristic polynomial
/// λ² − tr·λ + det = 0.
inline double spectral_radius(const Matrix2& J) {
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    return std::max(std::abs(0.5 * tr + sq), std::abs(0.5 * tr - sq));
  }
  return std::sqrt(det);  // complex pair, |λ|² = det
}

// =============================================================================
// Stability
// =============================================================================

inline double fd_step(double v) { return std::max(1e-6, 1e-6 * std::abs(v)); }

/// Central-difference Jacobian of an apex map; `step_scale` widens the
/// default difference step.
inline Matrix2 apex_jacobian(const ApexMap& map, const ApexState& z, double step_scale = 1.0) {
  Matrix2 J{};
  const double hx = step_scale * fd_step(z.x_dot);
  const double hy = step_scale * fd_step(z.y);
  // Difference by the probe points as stored so rounding of z ± h cancels.
  const double x_hi = z.x_dot + hx, x_lo = z.x_dot - hx;
  const double y_hi = z.y + hy, y_lo = z.y - hy;
  const ApexState xp = map({x_hi, z.y});
  const ApexState xm = map({x_lo, z.y});
  const ApexState yp = map({z.x_dot, y_hi});
  const ApexState ym = map({z.x_dot, y_lo});
  J[0][0] = (xp.x_dot - xm.x_dot) / (x_hi - x_lo);
  J[1][0] = (xp.y - xm.y) / (x_hi - x_lo);
  J[0][1] = (yp.x_dot - ym.x_dot) / (y_hi - y_lo);
  J[1][1] = (yp.y - ym.y) / (y_hi - y_lo);
  return J;
}

/// Jacobian, spectral radius and stability at z_star. Throws IllConditioned
/// when a 100x wider difference step changes the Jacobian by more than 1% of
/// its scale, i.e. map noise swamps the difference signal.
inline Stability stability(const ApexMap& map, const ApexState& z_star) {
  Stability out;
  try {
    out.jacobian = apex_jacobian(map, z_star);
  } catch (const GaitError& e) {
    throw GaitError(ErrorCode::GaitFailure, std::string("map failed near fixed point: ") + e.what(),
                    Phase::FixedPoint);
  }
  double scale = 1.0;
  for (const auto& row : out.jacobian)
    for (double v : row) {
      if (!std::isfinite(v)) throw GaitError(ErrorCode::IllConditioned, "non-finite Jacobian", Phase::FixedPoint);
      scale = std::max(scale, std::abs(v));
    }
  std::optional<Matrix2> wide;
  try {
    wide = apex_jacobian(map, z_star, 100.0);
  } catch (const GaitError&) {
    // The wider probe left the gait's domain; keep the fine estimate.
  }
  if (wide) {
    double diff = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) diff = std::max(diff, std::abs(out.jacobian[i][j] - (*wide)[i][j]));
    if (diff > 1e-2 * scale)
      throw GaitError(ErrorCode::IllConditioned,
                      "finite-difference Jacobian not resolved (step sensitivity " + std::to_string(diff) + ")",
                      Phase::FixedPoint);
  }
  out.spectral_radius = spectral_radius(out.jacobian);
  out.stable = out.spectral_radius < 1.0;
  return out;
}

// =============================================================================
// Closed-form fixed point
// =============================================================================

struct ConstraintResiduals {
  double energy = 0.0;  // E_td − E_lo (J)
  double speed = 0.0;   // ẋ_td − ẋ_lo (m/s)
};

/// Energy and fore-aft speed balance of a touchdown candidate under the
/// affine stance map, small-angle forms, and the assumed touchdown leg rate.
inline ConstraintResiduals energy_speed_constraints(const TouchdownFixedPoint& cand, double p_bar,
                                                    double k_theta, const StanceMapConstants& C,
                                                    const SlipParams& params) {
  const double m = params.m;
  const double r0 = params.r0;
  const double T = std::tan(theta_offset(p_bar, k_theta));
  const double rd = cand.r_dot_td;
  const double th = cand.theta_td;
  const double r_dot_lo = C.C1 * rd + C.C2;
  const double theta_lo = th + C.C3 * rd + C.C4;

  const double E_td = 0.5 * m * rd * rd + 0.5 * m * (rd * T) * (rd * T);
  const double E_lo = 0.5 * m * r_dot_lo * r_dot_lo + p_bar * p_bar / (2.0 * m * r0 * r0);
  const double xd_td = -rd * th + rd * T * (1.0 - th * th / 2.0);
  const double xd_lo = -p_bar / (m * r0) * (1.0 - theta_lo * theta_lo / 2.0) - r_dot_lo * theta_lo;
  return {E_td - E_lo, xd_td - xd_lo};
}

inline ConstraintResiduals energy_speed_constraints(const TouchdownFixedPoint& cand, double p_bar,
                                                    double k_theta, const SlipParams& params) {
  return energy_speed_constraints(cand, p_bar, k_theta, nominal_stance_constants(p_bar, k_theta, params),
                                  params);
}

struct ClosedFormTouchdown {
  TouchdownFixedPoint touchdown;
  StanceMapConstants constants;
  ApexState apex;
};

/// Touchdown fixed point (R, Θ, Ξ) and its apex image, without stability.
/// R takes the minus root of the energy balance, Θ the plus root of the speed
/// balance; a non-physical branch is an error, never swapped.
inline ClosedFormTouchdown closed_form_touchdown(double p_bar, double k_theta, const SlipParams& params) {
  params.validate();
  if (!(k_theta >= 0.0 && k_theta <= 1.0))
    throw GaitError(ErrorCode::InvalidParams, "k_theta must lie in [0, 1]");
  ClosedFormTouchdown out;
  out.constants = nominal_stance_constants(p_bar, k_theta, params);
  const StanceMapConstants& C = out.constants;

  auto root = [](const QuadraticCoeffs& q) {
    try {
      return quadratic_roots(q.a, q.b, q.c);
    } catch (const GaitError& e) {
      throw GaitError(ErrorCode::NoRealFixedPoint, e.detail(), Phase::FixedPoint);
    }
  };
  const double R = root(energy_coeffs(C, p_bar, k_theta, params)).minus;
  if (!(R < 0.0))
    throw GaitError(ErrorCode::NonPhysical, "touchdown radial velocity is not negative", Phase::FixedPoint);
  const double Theta = root(speed_coeffs(C, R, p_bar, k_theta, params)).plus;
  const double offset = theta_offset(p_bar, k_theta);
  const double Xi = -R / params.r0 * std::tan(offset);
  out.touchdown = {R, Theta, Xi, offset};

  const FlightState td = stance_to_flight({params.r0, R, Theta, Xi});
  if (!(td.y_dot < 0.0) || !(td.y > 0.0)) {
    throw GaitError(ErrorCode::NonPhysical, "touchdown state is not descending above ground",
                    Phase::FixedPoint);
  }
  out.apex = apex_from_touchdown(td, params);
  if (!(out.apex.y > params.r0 * std::cos(Theta)))
    throw GaitError(ErrorCode::NonPhysical, "apex not above touchdown height", Phase::FixedPoint);
  return out;
}

inline ApexMap analytic_map_fn(const ControlInputs& inputs, const SlipParams& params,
                               const LiftoffOptions& liftoff = {}) {
  return [inputs, params, liftoff](const ApexState& z) { return return_map_analytic(z, inputs, params, liftoff); };
}

inline ApexMap simulator_map_fn(const ControlInputs& inputs, const SlipParams& params, SimOptions opt = {}) {
  opt.record = false;
  return [inputs, params, opt](const ApexState& z) { return return_map_numeric(z, inputs, params, opt).next; };
}

inline double apex_residual(const ApexMap& map, const ApexState& z) {
  const ApexState n = map(z);
  return std::max(std::abs(n.x_dot - z.x_dot), std::abs(n.y - z.y));
}

/// Closed-form fixed point with stability judged on the analytic return map.
inline FixedPointResult closed_form_fixed_point(double p_bar, double k_theta, const SlipParams& params) {
  const ClosedFormTouchdown cf = closed_form_touchdown(p_bar, k_theta, params);
  ControlInputs inputs;
  inputs.p_bar = p_bar;
  inputs.k_theta = k_theta;
  const ApexMap map = analytic_map_fn(inputs, params);

  FixedPointResult out;
  out.apex = cf.apex;
  out.touchdown = cf.touchdown;
  out.provenance = Provenance::ClosedForm;
  try {
    out.residual = apex_residual(map, cf.apex);
  } catch (const GaitError& e) {
    throw GaitError(ErrorCode::GaitFailure, std::string("analytic map failed at closed-form point: ") + e.what(),
                    Phase::FixedPoint);
  }
  const Stability st = stability(map, cf.apex);
  out.jacobian = st.jacobian;
  out.spectral_radius = st.spectral_radius;
  out.stable = st.stable;
  return out;
}

// =============================================================================
// Newton fixed point
// =============================================================================

struct NewtonOptions {
  double tolerance = 1e-9;
  int max_iterations = 50;
  int max_backtracks = 8;
};

/// Newton iteration on P(z) − z with a central-difference Jacobian and step
/// halving when a trial point leaves the gait's domain or does not reduce the
/// residual.
inline FixedPointResult numeric_fixed_point(const ApexMap& map, const ApexState& seed, Provenance provenance,
                                            const NewtonOptions& opt = {}) {
  auto residual_of = [&](const ApexState& z, ApexState& image) {
    image = map(z);
    return std::array<double, 2>{image.x_dot - z.x_dot, image.y - z.y};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

  ApexState z = seed;
  ApexState image;
  std::array<double, 2> F{};
  try {
    F = residual_of(z, image);
  } catch (const GaitError& e) {
    throw GaitError(ErrorCode::GaitFailure, std::string("map failed at seed: ") + e.what(), e.phase());
  }

  int it = 0;
  while (norm(F) > opt.tolerance) {
    if (it >= opt.max_iterations) {
      throw GaitError(ErrorCode::NoConvergence,
                      "Newton did not converge in " + std::to_string(opt.max_iterations) + " steps (residual " +
                          std::to_string(norm(F)) + ")",
                      Phase::FixedPoint);
    }
    ++it;
    Matrix2 J{};
    try {
      J = apex_jacobian(map, z);
    } catch (const GaitError& e) {
      throw GaitError(ErrorCode::GaitFailure, std::string("map failed computing Jacobian: ") + e.what(), e.phase());
    }
    // Residual Jacobian is J − I.
    const double a = J[0][0] - 1.0, b = J[0][1], c = J[1][0], d = J[1][1] - 1.0;
    const double det = a * d - b * c;
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det))
      throw GaitError(ErrorCode::NoConvergence, "singular Newton system", Phase::FixedPoint);
    const double dx = -(d * F[0] - b * F[1]) / det;
    const double dy = -(-c * F[0] + a * F[1]) / det;

    bool accepted = false;
    double alpha = 1.0;
    std::string last_failure;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, alpha *= 0.5) {
      const ApexState trial{z.x_dot + alpha * dx, z.y + alpha * dy};
      try {
        ApexState trial_image;
        const auto Ft = residual_of(trial, trial_image);
        if (norm(Ft) < norm(F) || bt == opt.max_backtracks) {
          z = trial;
          F = Ft;
          image = trial_image;
          accepted = true;
          break;
        }
      } catch (const GaitError& e) {
        last_failure = e.what();
      }
    }
    if (!accepted) {
      throw GaitError(ErrorCode::GaitFailure, "every Newton trial point failed: " + last_failure, Phase::FixedPoint);
    }
  }

  FixedPointResult out;
  out.apex = z;
  out.provenance = provenance;
  out.residual = norm(F);
  out.iterations = it;
  const Stability st = stability(map, z);
  out.jacobian = st.jacobian;
  out.spectral_radius = st.spectral_radius;
  out.stable = st.stable;
  return out;
}

}  // namespace slip
