#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slip/quadratic.hpp"
#include "slip/resets.hpp"
#include "slip/types.hpp"

using namespace slip;

namespace {

const SlipParams kJerboa{};

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const GaitError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected GaitError";
  return ErrorCode::InvalidState;
}

}  // namespace

TEST(Params, GravityLoadedLength) {
  EXPECT_NEAR(kJerboa.r_g(), 0.19191, 1e-4);
  EXPECT_DOUBLE_EQ(kJerboa.r_g(), 0.2 - 3.3 * 9.81 / 4000.0);
}

TEST(Params, Validation) {
  EXPECT_NO_THROW(kJerboa.validate());
  auto bad = [](auto mutate) {
    SlipParams p;
    mutate(p);
    return code_of([&] { p.validate(); });
  };
  EXPECT_EQ(bad([](SlipParams& p) { p.m = 0; }), ErrorCode::InvalidParams);
  EXPECT_EQ(bad([](SlipParams& p) { p.k = -1; }), ErrorCode::InvalidParams);
  EXPECT_EQ(bad([](SlipParams& p) { p.b = -0.1; }), ErrorCode::InvalidParams);
  EXPECT_EQ(bad([](SlipParams& p) { p.r0 = 0; }), ErrorCode::InvalidParams);
  EXPECT_EQ(bad([](SlipParams& p) { p.g = NAN; }), ErrorCode::InvalidParams);
  // Spring too soft to hold the mass: r_g <= 0.
  EXPECT_EQ(bad([](SlipParams& p) { p.k = 100; }), ErrorCode::InvalidParams);
  SlipParams no_damping;
  no_damping.b = 0;
  EXPECT_NO_THROW(no_damping.validate());
}

TEST(Controls, Validation) {
  ControlInputs c;
  EXPECT_NO_THROW(c.validate());
  c.k_theta = 1.2;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidParams);
  c.k_theta = 0.5;
  c.tau_max = 0.0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidParams);
  c.tau_max = 7.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(States, Validation) {
  EXPECT_EQ(code_of([] { StanceState{0.0, 0, 0, 0}.validate(); }), ErrorCode::InvalidState);
  EXPECT_EQ(code_of([] { StanceState{0.2, NAN, 0, 0}.validate(); }), ErrorCode::InvalidState);
  EXPECT_EQ(code_of([] { FlightState{1, -0.1, 0}.validate(); }), ErrorCode::InvalidState);
  EXPECT_EQ(code_of([] { ApexState{INFINITY, 0.3}.validate(); }), ErrorCode::InvalidState);
  EXPECT_NO_THROW((ApexState{1.0, 0.3}.validate()));
}

TEST(GaitErrorTest, CarriesCodeAndPhase) {
  const GaitError e(ErrorCode::GroundFault, "fell", Phase::Stance);
  EXPECT_EQ(e.code(), ErrorCode::GroundFault);
  EXPECT_EQ(e.phase(), Phase::Stance);
  EXPECT_EQ(e.detail(), "fell");
  EXPECT_STREQ(e.what(), "GroundFault: fell");
  const GaitError moved = e.in_phase(Phase::FixedPoint);
  EXPECT_EQ(moved.phase(), Phase::FixedPoint);
  EXPECT_EQ(moved.code(), ErrorCode::GroundFault);
}

TEST(StanceToFlight, VerticalLeg) {
  const FlightState f = stance_to_flight({0.2, 2.0, 0.0, -5.0});
  EXPECT_DOUBLE_EQ(f.x_dot, 1.0);
  EXPECT_DOUBLE_EQ(f.y, 0.2);
  EXPECT_DOUBLE_EQ(f.y_dot, 2.0);
}

TEST(StanceToFlight, Rest) {
  const FlightState f = stance_to_flight({0.2, 0.0, 0.0, 0.0});
  EXPECT_EQ(f.x_dot, 0.0);
  EXPECT_EQ(f.y, 0.2);
  EXPECT_EQ(f.y_dot, 0.0);
}

TEST(StanceToFlight, HandArithmetic) {
  const FlightState f = stance_to_flight({0.19, 1.5, 0.3, -4.0});
  EXPECT_NEAR(f.x_dot, 0.28277542174345127, 1e-14);
  EXPECT_NEAR(f.y, 0.18151393293386514, 1e-14);
  EXPECT_NEAR(f.y_dot, 1.657600090751027, 1e-14);
}

TEST(FlightToStance, VerticalLeg) {
  const StanceState s = flight_to_stance({1.0, 0.2, -2.0}, 0.0, kJerboa);
  EXPECT_DOUBLE_EQ(s.r, 0.2);
  EXPECT_DOUBLE_EQ(s.r_dot, -2.0);
  EXPECT_DOUBLE_EQ(s.theta, 0.0);
  EXPECT_DOUBLE_EQ(s.theta_dot, -5.0);
}

TEST(FlightToStance, HandArithmetic) {
  const StanceState s = flight_to_stance({1.2, 0.2 * std::cos(0.4), -1.8}, 0.4, kJerboa);
  EXPECT_EQ(s.r, 0.2);
  EXPECT_EQ(s.theta, 0.4);
  EXPECT_NEAR(s.r_dot, -2.125211799975574, 1e-14);
  EXPECT_NEAR(s.theta_dot, -2.021600883239455, 1e-13);
}

TEST(FlightToStance, HeightMismatch) {
  EXPECT_EQ(code_of([] { flight_to_stance({1.0, 0.2 + 1e-6, -2.0}, 0.0, kJerboa); }),
            ErrorCode::TouchdownMismatch);
  EXPECT_NO_THROW(flight_to_stance({1.0, 0.2 + 5e-10, -2.0}, 0.0, kJerboa));
}

TEST(Resets, RoundTripAndEnergy) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const StanceState s{kJerboa.r0, 3.0 * u(rng), 0.9 * u(rng), 15.0 * u(rng)};
    const FlightState f = stance_to_flight(s);
    const double ke_s = kinetic_energy(s, kJerboa);
    EXPECT_LE(std::abs(kinetic_energy(f, kJerboa) - ke_s), 1e-12 * std::max(ke_s, 1e-300));
    const StanceState back = flight_to_stance(f, s.theta, kJerboa);
    EXPECT_NEAR(back.r, s.r, 1e-12);
    EXPECT_NEAR(back.r_dot, s.r_dot, 1e-12);
    EXPECT_NEAR(back.theta, s.theta, 1e-12);
    EXPECT_NEAR(back.theta_dot, s.theta_dot, 1e-12);
    EXPECT_LE(std::abs(kinetic_energy(back, kJerboa) - ke_s), 1e-12 * std::max(ke_s, 1e-300));
  }
}

TEST(Energy, StanceAndFlightAgreeAtTouchdown) {
  const StanceState s{kJerboa.r0, -1.3, 0.4, -6.0};
  EXPECT_NEAR(total_energy(s, kJerboa), total_energy(stance_to_flight(s), kJerboa), 1e-12);
  EXPECT_NEAR(angular_momentum(s, kJerboa), 3.3 * 0.04 * -6.0, 1e-15);
}

TEST(Quadratic, Examples) {
  auto q = quadratic_roots(1, -3, 2);
  EXPECT_DOUBLE_EQ(q.plus, 2.0);
  EXPECT_DOUBLE_EQ(q.minus, 1.0);
  q = quadratic_roots(1, 0, 0);
  EXPECT_EQ(q.plus, 0.0);
  EXPECT_EQ(q.minus, 0.0);
  q = quadratic_roots(2, -4, -6);
  EXPECT_DOUBLE_EQ(q.plus, 3.0);
  EXPECT_DOUBLE_EQ(q.minus, -1.0);
}

TEST(Quadratic, NegativeLeadingCoefficientKeepsFormulaBranches) {
  // Q± = (−b ± sqrt(D))/(2a) even when a < 0.
  const auto q = quadratic_roots(-1, 0, 4);
  EXPECT_DOUBLE_EQ(q.plus, -2.0);
  EXPECT_DOUBLE_EQ(q.minus, 2.0);
}

TEST(Quadratic, Errors) {
  EXPECT_EQ(code_of([] { quadratic_roots(1, 0, 1); }), ErrorCode::NegativeDiscriminant);
  EXPECT_EQ(code_of([] { quadratic_roots(0, 0, 1); }), ErrorCode::DegenerateQuadratic);
  const auto lin = quadratic_roots(0, 2, -4);
  EXPECT_DOUBLE_EQ(lin.plus, 2.0);
  EXPECT_DOUBLE_EQ(lin.minus, 2.0);
}
