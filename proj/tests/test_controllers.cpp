#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "slip/controllers.hpp"

using namespace slip;

namespace {

const SlipParams kJerboa{};

double Ev(double y) { return kJerboa.m * kJerboa.g * y; }

}  // namespace

TEST(AoaImplicit, ZeroSpeed) {
  const AoaSolution s = solve_aoa_implicit(0.0, Ev(0.3), 0.6, kJerboa);
  EXPECT_EQ(s.theta_aoa, 0.0);
  EXPECT_EQ(s.theta_td, 0.0);
}

TEST(AoaImplicit, ZeroGainDecouples) {
  const double expect = std::atan(1.2 / std::sqrt(2 * Ev(0.3) / kJerboa.m - 2 * kJerboa.g * kJerboa.r0));
  const AoaSolution s = solve_aoa_implicit(1.2, Ev(0.3), 0.0, kJerboa);
  EXPECT_NEAR(s.theta_aoa, expect, 1e-15);
  EXPECT_EQ(s.theta_td, 0.0);
  EXPECT_LE(s.iterations, 2);
}

TEST(AoaImplicit, MatchesBisectionOracle) {
  const double ref = oracle::aoa(1.5, Ev(0.25), 0.6, kJerboa);
  const AoaSolution s = solve_aoa_implicit(1.5, Ev(0.25), 0.6, kJerboa);
  EXPECT_NEAR(s.theta_aoa, ref, 1e-10);
  EXPECT_DOUBLE_EQ(s.theta_td, 0.6 * s.theta_aoa);
  EXPECT_LE(s.residual, 1e-10);
  EXPECT_EQ(s.method, AoaMethod::Implicit);
}

TEST(AoaImplicit, OracleAcrossOperatingStates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xd(0.2, 4.0), y(0.22, 0.45), kt(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = xd(rng), h = y(rng), k = kt(rng);
    EXPECT_NEAR(solve_aoa_implicit(a, Ev(h), k, kJerboa).theta_aoa, oracle::aoa(a, Ev(h), k, kJerboa), 1e-9);
  }
}

TEST(AoaImplicit, OddInSpeed) {
  for (double x : {0.3, 1.0, 2.2, 3.5}) {
    const double a = solve_aoa_implicit(x, Ev(0.3), 0.6, kJerboa).theta_aoa;
    const double b = solve_aoa_implicit(-x, Ev(0.3), 0.6, kJerboa).theta_aoa;
    EXPECT_NEAR(a, -b, 1e-12);
    EXPECT_GT(a, 0.0);
  }
}

TEST(AoaImplicit, MonotoneInSpeed) {
  double prev = -1.0;
  for (double x = 0.0; x <= 4.0; x += 0.1) {
    const double th = solve_aoa_implicit(x, Ev(0.3), 0.7, kJerboa).theta_aoa;
    EXPECT_GT(th, prev);
    prev = th;
  }
}

TEST(AoaImplicit, InsufficientEnergy) {
  // Apex below the rest length cannot reach the ground with a vertical leg.
  try {
    solve_aoa_implicit(1.0, Ev(0.19), 0.5, kJerboa);
    FAIL();
  } catch (const GaitError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientEnergy);
    EXPECT_EQ(e.phase(), Phase::AngleOfAttack);
  }
}

TEST(AoaImplicit, BisectionFallbackAgrees) {
  // A relaxation that overshoots forces the fixed-point loop to stall.
  AoaSolverOptions opt;
  opt.relaxation = 1.999;
  opt.max_iterations = 3;
  const AoaSolution s = solve_aoa_implicit(2.0, Ev(0.3), 0.6, kJerboa, opt);
  EXPECT_NEAR(s.theta_aoa, oracle::aoa(2.0, Ev(0.3), 0.6, kJerboa), 1e-10);
}

TEST(AoaApprox, ZeroSpeed) {
  const AoaSolution s = solve_aoa_approx(0.0, Ev(0.3), 0.6, kJerboa);
  EXPECT_EQ(s.theta_aoa, 0.0);
  EXPECT_EQ(s.method, AoaMethod::QuadraticApprox);
}

TEST(AoaApprox, HandEvaluation) {
  // Quadratic in θ² then one pass through the constraint.
  const double a = 16 * 9.81 * 0.2;
  const double b = 16 * (2 * 9.81 * 0.25 - 2 * 9.81 * 0.2);
  const double c = -1.5 * 1.5 * M_PI * M_PI;
  const double seed = std::sqrt((-b + std::sqrt(b * b - 4 * a * c)) / (2 * a));
  const double expect = std::atan(1.5 / std::sqrt(2 * 9.81 * 0.25 - 2 * 9.81 * 0.2 * std::cos(0.6 * seed)));
  const AoaSolution s = solve_aoa_approx(1.5, Ev(0.25), 0.6, kJerboa);
  EXPECT_NEAR(s.theta_aoa, expect, 1e-14);
  EXPECT_DOUBLE_EQ(s.theta_td, 0.6 * s.theta_aoa);
}

TEST(AoaApprox, CloseToImplicitNearOperatingStates) {
  const double imp = solve_aoa_implicit(1.5, Ev(0.25), 0.6, kJerboa).theta_aoa;
  const double apx = solve_aoa_approx(1.5, Ev(0.25), 0.6, kJerboa).theta_aoa;
  EXPECT_LT(std::abs(imp - apx), 0.12);
}

TEST(AoaApprox, OddInSpeed) {
  EXPECT_NEAR(solve_aoa_approx(1.7, Ev(0.3), 0.5, kJerboa).theta_aoa,
              -solve_aoa_approx(-1.7, Ev(0.3), 0.5, kJerboa).theta_aoa, 1e-14);
}

TEST(AoaApprox, InsufficientEnergy) {
  try {
    solve_aoa_approx(1.0, Ev(0.1), 0.5, kJerboa);
    FAIL();
  } catch (const GaitError& e) {
    EXPECT_TRUE(e.code() == ErrorCode::InsufficientEnergy || e.code() == ErrorCode::NegativeDiscriminant);
    EXPECT_EQ(e.phase(), Phase::AngleOfAttack);
  }
}

TEST(HipTorque, AllTermsVanish) {
  ControlInputs g;
  g.kp = 40;
  g.ki = 2;
  g.kd = 0.2;
  const StanceState s{0.2, 0.0, 0.0, -1.0 / (3.3 * 0.04)};
  const double p = angular_momentum(s, kJerboa);
  const auto [tau, next] = hip_torque(p, s, PidState::at_touchdown(p), g, kJerboa, 1e-3);
  EXPECT_NEAR(tau, 0.0, 1e-12);
  EXPECT_NEAR(next.integral, 0.0, 1e-15);
}

TEST(HipTorque, PureFeedForward) {
  ControlInputs g;
  g.kp = g.ki = g.kd = 0.0;
  const StanceState s{0.19, -0.3, 0.3, -2.0};
  const auto [tau, next] = hip_torque(-1.0, s, {}, g, kJerboa, 1e-3);
  EXPECT_NEAR(tau, -3.3 * 9.81 * 0.19 * std::sin(0.3), 1e-14);
}

TEST(HipTorque, ProportionalOnly) {
  ControlInputs g;
  g.kp = 1;
  g.ki = g.kd = 0.0;
  // p = m r² θ̇ = −0.5 with θ = 0 (no feed-forward).
  const StanceState s{0.2, 0.0, 0.0, -0.5 / (3.3 * 0.04)};
  const auto [tau, next] = hip_torque(-1.0, s, PidState::at_touchdown(-0.5), g, kJerboa, 1e-3);
  EXPECT_NEAR(tau, -0.5, 1e-14);
}

TEST(HipTorque, IntegralAndDerivative) {
  ControlInputs g;
  g.kp = 0;
  g.ki = 2;
  g.kd = 0.5;
  const StanceState s{0.2, 0.0, 0.0, -0.6 / (3.3 * 0.04)};
  const PidState prev{0.3, -0.5};
  const auto [tau, next] = hip_torque(-1.0, s, prev, g, kJerboa, 1e-3);
  const double err = -1.0 - (-0.6);
  EXPECT_NEAR(next.integral, 0.3 + err, 1e-14);
  EXPECT_NEAR(next.previous_momentum, -0.6, 1e-14);
  EXPECT_NEAR(tau, 2 * (0.3 + err) - 0.5 * (-0.6 - -0.5) / 1e-3, 1e-9);
}

TEST(HipTorque, SaturationAndAntiWindup) {
  ControlInputs g;
  g.kp = 100;
  g.ki = 5;
  g.tau_max = 7.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  PidState pid{};
  for (int i = 0; i < 500; ++i) {
    const StanceState s{0.18 + 0.02 * u(rng), u(rng), 0.5 * u(rng), 20 * u(rng)};
    const auto [tau, next] = hip_torque(-1.0, s, pid, g, kJerboa, 1e-3);
    EXPECT_LE(std::abs(tau), 7.0);
    if (std::abs(tau) == 7.0) {
      EXPECT_EQ(next.integral, pid.integral);
    }
    pid = next;
  }
}

TEST(HipTorque, RejectsNonPositivePeriod) {
  EXPECT_THROW(hip_torque(-1.0, {0.2, 0, 0, 0}, {}, ControlInputs{}, kJerboa, 0.0), GaitError);
}
