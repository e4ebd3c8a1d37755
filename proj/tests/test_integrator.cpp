#include <gtest/gtest.h>

#include <cmath>

#include "atomwave/integrator.hpp"

using namespace atomwave;

namespace {

SystemParams params(double delta, double n, double gamma = 0.3) {
  SystemParams p;
  p.delta = delta;
  p.n = n;
  p.gamma_a = gamma;
  return p;
}

}  // namespace

TEST(Integrator, FreeFlightAtResonance) {
  IntegratorConfig cfg;
  cfg.max_tau = 1000;
  cfg.sample_interval = 1.0;
  for (double p0 : {10.0, 50.0, 200.0}) {
    const Trajectory tr = integrate(ReducedState::ground(p0), params(0, 24000), cfg);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      ASSERT_NEAR(tr.states[i].p, p0, 1e-9);
      ASSERT_NEAR(tr.states[i].xi, 0.01 * p0 * tr.times[i], 1e-8 * (1 + tr.times[i]));
    }
  }
}

TEST(Integrator, BlochRelaxationWithoutField) {
  // n = 0: (u, v) rotate at delta and decay at gamma/2; z relaxes at gamma
  // while still driven by -2 v cos(xi), with xi pinned at 0 because p stays 0.
  const SystemParams prm = params(3.0, 0.0, 0.4);
  const ReducedState s0{0.0, 0.0, 0.5, 0.0, 0.2};
  IntegratorConfig cfg;
  cfg.max_tau = 20;
  cfg.sample_interval = 0.5;
  const Trajectory tr = integrate(s0, prm, cfg);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.times[i], d = std::exp(-0.2 * t);
    EXPECT_NEAR(tr.states[i].u, 0.5 * d * std::cos(3 * t), 1e-8);
    EXPECT_NEAR(tr.states[i].v, -0.5 * d * std::sin(3 * t), 1e-8);
    const double a = 0.2, b = 3.0;
    const double drive = (std::exp(a * t) * (a * std::sin(b * t) - b * std::cos(b * t)) + b) / (a * a + b * b);
    EXPECT_NEAR(tr.states[i].z, -1 + std::exp(-0.4 * t) * (1.2 + drive), 1e-8);
  }
}

TEST(Integrator, NodeCrossingEventsAreLocatedAccurately) {
  IntegratorConfig cfg;
  cfg.max_tau = 30;
  cfg.sample_interval = -1;
  const double p0 = 50;  // xi = 0.5 tau
  const Trajectory tr = integrate(ReducedState::ground(p0), params(0, 100), cfg,
                                  {EventSpec::node_crossing()});
  ASSERT_EQ(tr.events.size(), 5u);  // xi = pi/2 + k pi below 15
  for (std::size_t k = 0; k < tr.events.size(); ++k) {
    EXPECT_NEAR(tr.events[k].tau, (kPi / 2 + k * kPi) / 0.5, 1e-9);
    EXPECT_EQ(tr.events[k].direction, k % 2 == 0 ? -1 : 1);
  }
  EXPECT_TRUE(tr.empty());
}

TEST(Integrator, TerminalDetectorStopsTheRun) {
  IntegratorConfig cfg;
  cfg.max_tau = 1000;
  cfg.sample_interval = 0.25;
  const Trajectory tr = integrate(ReducedState::ground(20), params(0, 10), cfg,
                                  {EventSpec::detector(2 * kPi), EventSpec::detector(-2 * kPi)});
  ASSERT_TRUE(tr.stopped_by_event);
  EXPECT_NEAR(tr.final_tau, 2 * kPi / 0.2, 1e-9);
  EXPECT_NEAR(tr.final_state.xi, 2 * kPi, 1e-9);
  EXPECT_LE(tr.times.back(), tr.final_tau);
}

TEST(Integrator, UniformSamplingHonoursRecordFrom) {
  IntegratorConfig cfg;
  cfg.max_tau = 10;
  cfg.sample_interval = 0.5;
  cfg.record_from = 4;
  const Trajectory tr = integrate(ReducedState::ground(30), params(24, 3000), cfg);
  ASSERT_EQ(tr.size(), 13u);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_DOUBLE_EQ(tr.times[i], 4 + 0.5 * i);
}

TEST(Integrator, MethodsAgreeOnAShortRun) {
  const SystemParams prm = params(24, 3000);
  IntegratorConfig a;
  a.max_tau = 20;
  a.sample_interval = -1;
  IntegratorConfig b = a;
  b.method = Method::ClassicRK4;
  b.max_step = 1e-4;
  const auto ra = integrate(ReducedState::ground(60), prm, a).final_state;
  const auto rb = integrate(ReducedState::ground(60), prm, b).final_state;
  EXPECT_NEAR(ra.xi, rb.xi, 1e-6);
  EXPECT_NEAR(ra.p, rb.p, 1e-5);
  EXPECT_NEAR(ra.u, rb.u, 1e-4);
  EXPECT_NEAR(ra.z, rb.z, 1e-6);
}

TEST(Integrator, ContinuationMatchesSingleRun) {
  // Restarting from the final state of a shorter run reproduces the long run
  // up to the integrator tolerance.
  const SystemParams prm = params(24, 3000);
  IntegratorConfig cfg;
  cfg.sample_interval = -1;
  cfg.max_tau = 200;
  const auto full = integrate(ReducedState::ground(60), prm, cfg).final_state;
  cfg.max_tau = 100;
  const auto half = integrate(ReducedState::ground(60), prm, cfg);
  const auto rest = integrate_system(ReducedSystem{prm, nullptr}, half.final_state, cfg, {}, 100.0);
  EXPECT_NEAR(rest.final_tau, 200.0, 1e-12);
  EXPECT_NEAR(rest.final_state.xi, full.xi, 1e-5);
}

TEST(Integrator, StepLimitRaisesNumericalError) {
  IntegratorConfig cfg;
  cfg.max_tau = 1000;
  cfg.max_steps = 10;
  try {
    integrate(ReducedState::ground(60), params(24, 3000), cfg);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Numerical);
    EXPECT_EQ(e.last_state().size(), 5u);
  }
}

TEST(Integrator, RejectsNonFiniteStart) {
  IntegratorConfig cfg;
  EXPECT_THROW(integrate({0, std::nan(""), 0, 0, -1}, params(24, 3000), cfg), Error);
  cfg.max_tau = -1;
  EXPECT_THROW(integrate(ReducedState::ground(1), params(24, 3000), cfg), Error);
}

TEST(Integrator, SectionPointsFilterDirectionAndSign) {
  IntegratorConfig cfg;
  cfg.max_tau = 300;
  cfg.sample_interval = -1;
  EventSpec both = EventSpec::section_u0();
  both.direction = Direction::Both;
  const Trajectory tr = integrate(ReducedState::ground(60), params(24, 3000), cfg, {both});
  const auto rising = section_points(tr, EventSpec::section_u0());
  const auto negative = section_points(tr, both, true);
  ASSERT_FALSE(rising.empty());
  EXPECT_LT(rising.size(), tr.events.size());
  for (const auto& s : negative) EXPECT_LT(s.v, 0);
  for (const auto& s : rising) EXPECT_NEAR(s.u, 0, 1e-8);
}

TEST(Integrator, ConservativeInvariantsHoldOverALongRunAtTightTolerance) {
  // At the default rel_tol 1e-9 the Bloch norm drifts by a few 1e-5 over
  // this horizon; the drift shrinks in proportion to the tolerance.
  const SystemParams prm = params(-5, 8000, 0.0);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  cfg.max_tau = 1000;
  cfg.sample_interval = 10;
  const ReducedState s0{0.3, 40, 10, -20, -0.5};
  const Trajectory tr = integrate(s0, prm, cfg);
  const double b0 = bloch_norm(s0, prm), e0 = energy(s0, prm);
  for (const auto& s : tr.states) {
    EXPECT_NEAR(bloch_norm(s, prm) / b0, 1.0, 1e-6);
    EXPECT_NEAR(energy(s, prm) / std::abs(e0), e0 / std::abs(e0), 1e-6);
  }
}
