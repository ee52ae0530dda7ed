// Domain value types for the hip-energized SLIP hopper.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace slip {

// =============================================================================
// Errors
// =============================================================================

enum class ErrorCode {
  InvalidParams,
  InvalidState,
  TouchdownMismatch,
  InsufficientEnergy,
  NoConvergence,
  NegativeDiscriminant,
  DegenerateQuadratic,
  FailedLiftoff,
  GroundFault,
  UnreachableTouchdown,
  DescendingAtLiftoff,
  Overdamped,
  NoLiftoffRoot,
  NonpositiveTime,
  NoRealFixedPoint,
  NonPhysical,
  GaitFailure,
  IllConditioned,
};

/// Hybrid phase in which a gait failed.
enum class Phase { None, AngleOfAttack, Descent, Touchdown, Stance, Liftoff, Ascent, FixedPoint };

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::TouchdownMismatch: return "TouchdownMismatch";
    case ErrorCode::InsufficientEnergy: return "InsufficientEnergy";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NegativeDiscriminant: return "NegativeDiscriminant";
    case ErrorCode::DegenerateQuadratic: return "DegenerateQuadratic";
    case ErrorCode::FailedLiftoff: return "FailedLiftoff";
    case ErrorCode::GroundFault: return "GroundFault";
    case ErrorCode::UnreachableTouchdown: return "UnreachableTouchdown";
    case ErrorCode::DescendingAtLiftoff: return "DescendingAtLiftoff";
    case ErrorCode::Overdamped: return "Overdamped";
    case ErrorCode::NoLiftoffRoot: return "NoLiftoffRoot";
    case ErrorCode::NonpositiveTime: return "NonpositiveTime";
    case ErrorCode::NoRealFixedPoint: return "NoRealFixedPoint";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::GaitFailure: return "GaitFailure";
    case ErrorCode::IllConditioned: return "IllConditioned";
  }
  return "Unknown";
}

inline std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::None: return "none";
    case Phase::AngleOfAttack: return "aoa";
    case Phase::Descent: return "descent";
    case Phase::Touchdown: return "touchdown";
    case Phase::Stance: return "stance";
    case Phase::Liftoff: return "liftoff";
    case Phase::Ascent: return "ascent";
    case Phase::FixedPoint: return "fixed-point";
  }
  return "unknown";
}

/// Every failure in the library is reported as a GaitError carrying a code and
/// the phase where it was raised. Composite maps re-tag the phase.
class GaitError : public std::runtime_error {
 public:
  GaitError(ErrorCode code, std::string message, Phase phase = Phase::None)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        phase_(phase),
        detail_(std::move(message)) {}

  ErrorCode code() const noexcept { return code_; }
  Phase phase() const noexcept { return phase_; }
  const std::string& detail() const noexcept { return detail_; }

  GaitError in_phase(Phase phase) const { return GaitError(code_, detail_, phase); }

 private:
  ErrorCode code_;
  Phase phase_;
  std::string detail_;
};

// =============================================================================
// Parameters
// =============================================================================

/// Physical constants of the point-mass hopper. Defaults are the Jerboa values.
struct SlipParams {
  double m = 3.3;     // kg
  double k = 4000.0;  // N/m
  double b = 20.0;    // N·s/m
  double r0 = 0.2;    // m
  double g = 9.81;    // m/s²

  /// Gravity-loaded leg equilibrium length.
  double r_g() const { return r0 - m * g / k; }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(finite(m) && finite(k) && finite(b) && finite(r0) && finite(g)))
      throw GaitError(ErrorCode::InvalidParams, "non-finite parameter");
    if (!(m > 0.0)) throw GaitError(ErrorCode::InvalidParams, "m must be positive");
    if (!(k > 0.0)) throw GaitError(ErrorCode::InvalidParams, "k must be positive");
    if (!(b >= 0.0)) throw GaitError(ErrorCode::InvalidParams, "b must be nonnegative");
    if (!(r0 > 0.0)) throw GaitError(ErrorCode::InvalidParams, "r0 must be positive");
    if (!(g > 0.0)) throw GaitError(ErrorCode::InvalidParams, "g must be positive");
    const double rg = r_g();
    if (!(rg > 0.0 && rg < r0))
      throw GaitError(ErrorCode::InvalidParams, "gravity-loaded length r_g must lie in (0, r0)");
  }
};

/// The two gait knobs plus the stance momentum controller gains.
///
/// `ki` multiplies a per-sample running sum of the momentum error, so its
/// effect depends on the control rate.
struct ControlInputs {
  double p_bar = -1.0;    // kg·m²/s, negative for forward travel
  double k_theta = 0.5;   // AoA gain in [0, 1]
  double kp = 100.0;
  double ki = 0.0;
  double kd = 0.0;
  std::optional<double> tau_max;  // N·m

  void validate() const {
    if (!std::isfinite(p_bar)) throw GaitError(ErrorCode::InvalidParams, "p_bar must be finite");
    if (!(k_theta >= 0.0 && k_theta <= 1.0))
      throw GaitError(ErrorCode::InvalidParams, "k_theta must lie in [0, 1]");
    if (!(std::isfinite(kp) && std::isfinite(ki) && std::isfinite(kd)))
      throw GaitError(ErrorCode::InvalidParams, "PID gains must be finite");
    if (tau_max && !(*tau_max > 0.0))
      throw GaitError(ErrorCode::InvalidParams, "tau_max must be positive when set");
  }
};

// =============================================================================
// States
// =============================================================================

/// Polar stance coordinates about the toe; theta = 0 is vertical and theta > 0
/// puts the toe ahead of the body in +x.
struct StanceState {
  double r = 0.0;
  double r_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  bool finite() const {
    return std::isfinite(r) && std::isfinite(r_dot) && std::isfinite(theta) &&
           std::isfinite(theta_dot);
  }
  void validate() const {
    if (!finite()) throw GaitError(ErrorCode::InvalidState, "non-finite stance state");
    if (!(r > 0.0)) throw GaitError(ErrorCode::InvalidState, "leg length must be positive");
  }
};

/// Cartesian flight coordinates of the mass (x position is not part of the map).
struct FlightState {
  double x_dot = 0.0;
  double y = 0.0;
  double y_dot = 0.0;

  bool finite() const { return std::isfinite(x_dot) && std::isfinite(y) && std::isfinite(y_dot); }
  void validate() const {
    if (!finite()) throw GaitError(ErrorCode::InvalidState, "non-finite flight state");
    if (!(y > 0.0)) throw GaitError(ErrorCode::InvalidState, "height must be positive");
  }
};

/// Apex section of the return map.
struct ApexState {
  double x_dot = 0.0;
  double y = 0.0;

  bool finite() const { return std::isfinite(x_dot) && std::isfinite(y); }
  void validate() const {
    if (!finite()) throw GaitError(ErrorCode::InvalidState, "non-finite apex state");
    if (!(y > 0.0)) throw GaitError(ErrorCode::InvalidState, "apex height must be positive");
  }
};

// Angular momentum about the toe.
inline double angular_momentum(const StanceState& s, const SlipParams& p) {
  return p.m * s.r * s.r * s.theta_dot;
}

inline double kinetic_energy(const StanceState& s, const SlipParams& p) {
  return 0.5 * p.m * (s.r_dot * s.r_dot + s.r * s.r * s.theta_dot * s.theta_dot);
}

inline double kinetic_energy(const FlightState& f, const SlipParams& p) {
  return 0.5 * p.m * (f.x_dot * f.x_dot + f.y_dot * f.y_dot);
}

/// Total mechanical energy in flight (ballistic).
inline double total_energy(const FlightState& f, const SlipParams& p) {
  return kinetic_energy(f, p) + p.m * p.g * f.y;
}

/// Total mechanical energy in stance including spring potential.
inline double total_energy(const StanceState& s, const SlipParams& p) {
  const double dr = s.r - p.r0;
  return kinetic_energy(s, p) + p.m * p.g * s.r * std::cos(s.theta) + 0.5 * p.k * dr * dr;
}

}  // namespace slip
