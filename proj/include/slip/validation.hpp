// Quick self-check of model invariants, run by `slip validate`.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "slip/config.hpp"
#include "slip/fixed_point.hpp"
#include "slip/flight.hpp"
#include "slip/resets.hpp"
#include "slip/stance_sim.hpp"
#include "slip/sweep.hpp"

namespace slip {

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;  // worst observed quantity
  double limit = 0.0;
  std::string note;
};

namespace detail {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace detail

inline std::vector<InvariantCheck> run_invariant_checks(const SweepConfig& cfg) {
  const SlipParams& P = cfg.params;
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::vector<InvariantCheck> out;

  {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const FlightState f0{uni(-3, 3), uni(0.2, 1.0), uni(-2, 2)};
      const FlightState f1 = flight_flow(f0, uni(0, 0.5), P);
      worst = std::max(worst, detail::rel_diff(total_energy(f1, P), total_energy(f0, P)));
    }
    out.push_back({"flight energy conserved", worst <= 1e-10, worst, 1e-10, "relative"});
  }

  {
    double worst_ke = 0.0, worst_trip = 0.0;
    for (int i = 0; i < 200; ++i) {
      const StanceState s{P.r0, uni(-2, 2), uni(-0.8, 0.8), uni(-10, 10)};
      const FlightState f = stance_to_flight(s);
      worst_ke = std::max(worst_ke, detail::rel_diff(kinetic_energy(f, P), kinetic_energy(s, P)));
      const StanceState back = flight_to_stance(f, s.theta, P);
      worst_trip = std::max({worst_trip, std::abs(back.r_dot - s.r_dot), std::abs(back.theta_dot - s.theta_dot)});
    }
    out.push_back({"resets preserve kinetic energy", worst_ke <= 1e-12, worst_ke, 1e-12, "relative"});
    out.push_back({"reset round trip", worst_trip <= 1e-12, worst_trip, 1e-12, "absolute"});
  }

  {
    SlipParams undamped = P;
    undamped.b = 0.0;
    SimOptions opt = cfg.sim;
    opt.torque_mode = TorqueMode::Off;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const StanceState td{undamped.r0, uni(-1.5, -0.5), uni(-0.4, 0.4), uni(-4, 4)};
      try {
        const StanceResult res = integrate_stance(td, cfg.controls, undamped, opt);
        worst = std::max(worst, detail::rel_diff(total_energy(res.liftoff, undamped), total_energy(td, undamped)));
      } catch (const GaitError&) {
        // Some random touchdowns fall over; they say nothing about conservation.
      }
    }
    out.push_back({"undamped unforced stance conserves energy", worst <= 1e-8, worst, 1e-8, "relative, RK4"});
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double xd = uni(0.2, 3.0);
      const double Ev = P.m * P.g * uni(0.25, 0.6);
      const double kt = uni(0.0, 1.0);
      try {
        const double a = solve_aoa_implicit(xd, Ev, kt, P).theta_aoa;
        const double b = solve_aoa_implicit(-xd, Ev, kt, P).theta_aoa;
        worst = std::max(worst, std::abs(a + b));
      } catch (const GaitError&) {
      }
    }
    out.push_back({"angle of attack odd in speed", worst <= 1e-12, worst, 1e-12, "absolute"});
  }

  {
    const double p_bar = cfg.controls.p_bar, k_theta = cfg.controls.k_theta;
    InvariantCheck c{"closed-form roots satisfy constraints", false, 0.0, 1e-9, ""};
    try {
      const ClosedFormTouchdown cf = closed_form_touchdown(p_bar, k_theta, P);
      const ConstraintResiduals r = energy_speed_constraints(cf.touchdown, p_bar, k_theta, cf.constants, P);
      c.value = std::max(std::abs(r.energy), std::abs(r.speed));
      c.passed = c.value <= c.limit;
    } catch (const GaitError& e) {
      c.note = e.what();
    }
    out.push_back(c);
  }

  {
    InvariantCheck c{"simulator fixed point stable", false, 0.0, 1.0, "spectral radius"};
    SweepConfig one = cfg;
    one.pipelines = {Provenance::SimulatorNumeric};
    const PointResult pr = compute_point(one, cfg.controls.p_bar, cfg.controls.k_theta).front();
    if (pr.ok()) {
      c.value = pr.result->spectral_radius;
      c.passed = c.value < c.limit;
    } else {
      c.note = pr.status + " " + pr.message;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace slip
