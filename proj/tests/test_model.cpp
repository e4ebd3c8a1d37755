#include <gtest/gtest.h>

#include <cmath>

#include "atomwave/model.hpp"

using namespace atomwave;

namespace {

SystemParams params(double delta, double n, double gamma = 0.3, double alpha = 0.01) {
  SystemParams p;
  p.alpha = alpha;
  p.delta = delta;
  p.n = n;
  p.gamma_a = gamma;
  return p;
}

// Central difference of f at x.
template <class F>
double derivative(F f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST(Model, SteadyStateZeroesBlochRows) {
  for (double delta : {-24.0, 3.0, 24.0})
    for (double n : {10.0, 3000.0, 24000.0})
      for (double xi : {0.0, 0.4, 1.3, 2.9, 4.5}) {
        const SystemParams prm = params(delta, n);
        const auto b = steady_state_bloch(xi, prm);
        const auto d = rhs_reduced({xi, 0.0, b.u, b.v, b.z}, prm);
        const double scale = std::abs(b.u) + std::abs(b.v) + 1;
        EXPECT_NEAR(d.u / scale, 0, 1e-12);
        EXPECT_NEAR(d.v / (n + 1), 0, 1e-12);
        EXPECT_NEAR(d.z, 0, 1e-12);
      }
}

TEST(Model, SteadyStateKnownValueAtAntinode) {
  // -2 n delta / (delta^2 + 2n + gamma^2/4) at xi = 0
  const SystemParams prm = params(24, 3000);
  EXPECT_NEAR(steady_state_bloch(0.0, prm).u, -144000.0 / 6576.0225, 1e-9);
}

TEST(Model, AdiabaticForceIsMinusPotentialGradient) {
  for (double delta : {-24.0, 24.0})
    for (double xi : {0.2, 1.0, 2.5, 4.0}) {
      const SystemParams prm = params(delta, 3000);
      const double fd = -derivative([&](double x) { return optical_potential(x, prm); }, xi);
      EXPECT_NEAR(dipole_force_adiabatic(xi, prm), fd, 1e-6 * (1 + std::abs(fd)));
    }
}

TEST(Model, AdiabaticForceMatchesMomentumEquation) {
  // p' = -u sin(xi) evaluated at the stationary u.
  const SystemParams prm = params(24, 3000);
  for (double xi : {0.3, 1.1, 2.0}) {
    const auto b = steady_state_bloch(xi, prm);
    EXPECT_NEAR(dipole_force_adiabatic(xi, prm), -b.u * std::sin(xi), 1e-10);
  }
}

TEST(Model, PotentialIsFlatAtResonance) {
  const SystemParams prm = params(0, 3000);
  EXPECT_EQ(optical_potential(1.0, prm), 0.0);
  EXPECT_NEAR(dipole_force_adiabatic(1.0, prm), 0.0, 1e-15);
}

TEST(Model, ConservativeInvariantsHaveZeroRate) {
  // d/dtau of each invariant by the chain rule with a finite-difference
  // gradient, along the gamma_a = 0 vector field.
  const SystemParams prm = params(-7, 1500, 0.0);
  const ReducedState s{0.7, 42.0, 12.0, -30.0, 0.3};
  const ReducedState f = rhs_reduced(s, prm);
  auto rate = [&](auto inv) {
    const double h = 1e-6;
    auto shifted = [&](int k, double d) {
      ReducedState t = s;
      double* c[] = {&t.xi, &t.p, &t.u, &t.v, &t.z};
      *c[k] += d;
      return inv(t);
    };
    const double g[] = {(shifted(0, h) - shifted(0, -h)) / (2 * h), (shifted(1, h) - shifted(1, -h)) / (2 * h),
                        (shifted(2, h) - shifted(2, -h)) / (2 * h), (shifted(3, h) - shifted(3, -h)) / (2 * h),
                        (shifted(4, h) - shifted(4, -h)) / (2 * h)};
    return g[0] * f.xi + g[1] * f.p + g[2] * f.u + g[3] * f.v + g[4] * f.z;
  };
  EXPECT_NEAR(rate([&](const ReducedState& t) { return bloch_norm(t, prm); }), 0.0, 1e-3);
  EXPECT_NEAR(rate([&](const ReducedState& t) { return energy(t, prm); }), 0.0, 1e-6);
}

TEST(Model, FullSystemProjectsOntoReduced) {
  // At the steady pumped field the projected full flow equals the reduced
  // flow except for the atomic back-action on the field in v'.
  const SystemParams prm = SystemParams::pumped(0.01, 24, 3000, 0.3, 5.0);
  ASSERT_TRUE(prm.reduces_to_reduced());
  const auto field = FullState::steady_field(prm);
  EXPECT_NEAR((field[0] * field[0] + field[1] * field[1]) / 4, 3000, 1e-8);
  const ReducedState r{0.9, 55.0, 20.0, -15.0, -0.4};
  const FullState s = FullState::lift(r, field[0], field[1]);
  const ReducedState back = s.reduced();
  EXPECT_NEAR(back.u, r.u, 1e-10);
  EXPECT_NEAR(back.v, r.v, 1e-10);

  const FullState d = rhs_full(s, prm, 0.0);
  const ReducedState rr = rhs_reduced(r, prm);
  const double du = (d.e * s.x + s.e * d.x - d.g * s.y - s.g * d.y) / 2;
  const double dv = (d.g * s.x + s.g * d.x + d.e * s.y + s.e * d.y) / 2;
  const double back_action = std::cos(r.xi) * (s.x * s.x + s.y * s.y) / 2;
  EXPECT_NEAR(d.xi, rr.xi, 1e-12);
  EXPECT_NEAR(d.p, rr.p, 1e-9);
  EXPECT_NEAR(d.z, rr.z, 1e-9);
  EXPECT_NEAR(du, rr.u, 1e-9);
  EXPECT_NEAR(dv, rr.v + back_action, 1e-8);
}

TEST(Model, FrictionSignFollowsDetuning) {
  // Red detuning cools (F > 0 means |p| decreases), blue detuning heats.
  EXPECT_GT(friction_force_analytic(200, params(-24, 3000)), 0);
  EXPECT_LT(friction_force_analytic(200, params(24, 3000)), 0);
  EXPECT_EQ(friction_force_analytic(200, params(24, 3000, 0.0)), 0);
}

TEST(Model, TransitionTimeIsInverseFrictionSlope) {
  const SystemParams prm = params(-24, 3000);
  const double ps = 100, h = 1e-3;
  const double slope =
      (friction_force_analytic(ps + h, prm) - friction_force_analytic(ps - h, prm)) / (2 * h);
  EXPECT_NEAR(transition_time_estimate(ps, prm), 1 / slope, 1e-4 * std::abs(1 / slope));
}

TEST(Model, TrapFrequencyMatchesPotentialCurvature) {
  // For omega^2 << delta^2 the harmonic frequency of the adiabatic well is
  // sqrt(alpha * Pi''(3 pi / 2)).
  const SystemParams prm = params(24, 3000, 0.3, 0.001);
  const double h = 1e-4;
  const double curv = (optical_potential(kTrapCenter + h, prm) - 2 * optical_potential(kTrapCenter, prm) +
                       optical_potential(kTrapCenter - h, prm)) /
                      (h * h);
  EXPECT_NEAR(trap_frequency(prm), std::sqrt(prm.alpha * curv), 1e-3 * trap_frequency(prm));
}

TEST(Model, BallisticSolutionSatisfiesEquationsToLeadingOrder) {
  const SystemParams prm = params(24, 20, 0.3);
  const double ps = 300;
  for (double tau : {0.0, 1.0, 2.5}) {
    const auto sol = period1_ballistic_solution(tau, ps, prm);
    ASSERT_TRUE(sol.valid);
    const auto f = rhs_reduced(sol.state, prm);
    auto at = [&](double t) { return period1_ballistic_solution(t, ps, prm).state; };
    const double h = 1e-5;
    const auto a = at(tau + h), b = at(tau - h);
    // residuals are second order in the small amplitude A_b
    const double scale = 2 * prm.delta * sol.amplitude;
    EXPECT_NEAR((a.u - b.u) / (2 * h), f.u, 0.05 * scale * prm.delta);
    EXPECT_NEAR((a.v - b.v) / (2 * h), f.v, 0.05 * scale * prm.delta);
    // xi advances at alpha p_s; p carries the small oscillation
    EXPECT_NEAR((a.xi - b.xi) / (2 * h), f.xi, 1e-3 * f.xi);
  }
}

TEST(Model, NoiseIsDeterministicAndCalibrated) {
  NoiseSpec ns;
  ns.amplitude = NoiseSpec::amplitude_for_rms(10.0, 0.01);
  EXPECT_NEAR(ns.rms(), 0.1, 1e-12);
  const NoiseForce a(ns), b(ns);
  double sq = 0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double t = 0.37 * i;
    EXPECT_EQ(a(t), b(t));
    sq += a(t) * a(t);
  }
  EXPECT_NEAR(std::sqrt(sq / m), 0.1, 0.01);
  NoiseSpec other = ns;
  other.seed = 2;
  EXPECT_NE(NoiseForce(other)(3.0), a(3.0));
  EXPECT_EQ(NoiseForce(NoiseSpec{})(3.0), 0.0);
}

TEST(Model, ValidationRejectsBadParameters) {
  SystemParams p;
  p.alpha = 0;
  EXPECT_THROW(p.validate(), Error);
  p = SystemParams{};
  p.n = -1;
  EXPECT_THROW(p.validate(), Error);
  p = SystemParams{};
  p.gamma_a = std::nan("");
  EXPECT_THROW(p.validate(), Error);
  NoiseSpec ns;
  ns.f_min = 6;
  EXPECT_THROW(ns.validate(), Error);
}
