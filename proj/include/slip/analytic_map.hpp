// Closed-form approximate apex return map:
//   P = ascent ∘ liftoff reset ∘ analytic stance ∘ touchdown reset ∘ descent,
// with the touchdown angle from the approximate AoA solution.
#pragma once

#include "slip/controllers.hpp"
#include "slip/flight.hpp"
#include "slip/resets.hpp"
#include "slip/stance_flow.hpp"
#include "slip/types.hpp"

namespace slip {

struct AnalyticHop {
  ApexState next;
  AoaSolution aoa;
  StanceState touchdown;
  AnalyticStance stance;
  FlightState liftoff_flight;
};

inline AnalyticHop analytic_hop(const ApexState& apex, const ControlInputs& inputs, const SlipParams& params,
                                const LiftoffOptions& liftoff = {}) {
  apex.validate();
  AnalyticHop hop;
  hop.aoa = solve_aoa_approx(apex.x_dot, params.m * params.g * apex.y, inputs.k_theta, params);
  FlightState td_flight;
  try {
    td_flight = integrate_descent(apex, hop.aoa.theta_td, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::Descent);
  }
  hop.touchdown = flight_to_stance(td_flight, hop.aoa.theta_td, params);
  try {
    hop.stance = stance_map_analytic(hop.touchdown, inputs.p_bar, params, liftoff);
  } catch (const GaitError& e) {
    throw e.in_phase(e.phase() == Phase::None ? Phase::Stance : e.phase());
  }
  hop.liftoff_flight = stance_to_flight(hop.stance.liftoff);
  try {
    hop.next = integrate_ascent(hop.liftoff_flight, params);
  } catch (const GaitError& e) {
    throw e.in_phase(Phase::Ascent);
  }
  return hop;
}

inline ApexState return_map_analytic(const ApexState& apex, const ControlInputs& inputs,
                                     const SlipParams& params, const LiftoffOptions& liftoff = {}) {
  return analytic_hop(apex, inputs, params, liftoff).next;
}

}  // namespace slip
