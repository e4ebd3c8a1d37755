#include <gtest/gtest.h>

#include <cmath>

#include "atomwave/observables.hpp"

using namespace atomwave;

namespace {

// Synthetic trajectory with p(tau) = p0 + a tau and node events at the
// given times.
Trajectory synthetic(double p0, double a, const std::vector<double>& nodes, double dt = 0.01) {
  Trajectory tr;
  for (double t = 0; t <= nodes.back() + 1e-9; t += dt) {
    tr.times.push_back(t);
    tr.states.push_back({0, p0 + a * t, 0, 0, -1});
  }
  for (double t : nodes) tr.events.push_back({EventKind::NodeCrossing, 0, t, {0, p0 + a * t, 0, 0, -1}, 1});
  return tr;
}

}  // namespace

TEST(FlightAverages, LinearMomentumGivesMidpointValuesAndSlope) {
  const Trajectory tr = synthetic(100, -0.5, {1.0, 2.3, 4.0, 5.1, 7.7});
  const FlightAverages fa = node_flight_averages(tr);
  ASSERT_FALSE(fa.trapped);
  ASSERT_EQ(fa.flights.size(), 4u);
  for (const auto& f : fa.flights) {
    EXPECT_NEAR(f.p_bar, 100 - 0.5 * f.tau_mid, 1e-9);
    EXPECT_NEAR(f.dp_bar_dtau, -0.5, 1e-9);
  }
}

TEST(FlightAverages, TooFewNodesMeansTrapped) {
  EXPECT_TRUE(node_flight_averages(synthetic(1, 0, {1.0, 2.0})).trapped);
}

TEST(Friction, ZerosAreClassifiedBySlope) {
  // F = (p - 100)(p - 200)(p - 300): attractor where F rises through zero.
  std::vector<FrictionSample> s;
  for (double p = 50; p <= 350; p += 10) s.push_back({p, p, (p - 100.5) * (p - 200.5) * (p - 300.5), false});
  const auto z = friction_zeros(s);
  ASSERT_EQ(z.size(), 3u);
  EXPECT_NEAR(z[0].p_zero, 100.5, 0.5);
  EXPECT_EQ(z[0].kind, ZeroKind::Attractor);
  EXPECT_EQ(z[1].kind, ZeroKind::Repellor);
  EXPECT_EQ(z[2].kind, ZeroKind::Attractor);
}

TEST(Friction, EmpiricalSignMatchesAnalyticAtHighMomentum) {
  // Far above the resonance band the analytic ballistic friction is valid.
  for (double delta : {-24.0, 24.0}) {
    SystemParams prm;
    prm.delta = delta;
    prm.n = 3000;
    const FrictionCurve c = empirical_friction_curve(prm, {700.0});
    ASSERT_EQ(c.samples.size(), 1u);
    const double analytic = friction_force_analytic(c.samples[0].p_bar, prm);
    EXPECT_GT(c.samples[0].F * analytic, 0) << "delta " << delta;
  }
}

TEST(Friction, ResonanceGivesNoFriction) {
  SystemParams prm;
  prm.delta = 0;
  const FrictionCurve c = empirical_friction_curve(prm, {50.0, 100.0});
  for (const auto& s : c.samples) EXPECT_NEAR(s.F, 0.0, 1e-9);
}

TEST(Friction, AllTrappedIsDegenerate) {
  SystemParams prm;
  prm.n = 3000;
  try {
    empirical_friction_curve(prm, {1.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Degenerate);
  }
}

TEST(Grouping, SingleMomentumIsTriviallyGrouped) {
  SystemParams prm;
  prm.delta = -24;
  const GroupingResult g = detect_grouping(prm, {60.0}, 600);
  EXPECT_TRUE(g.grouped);
  EXPECT_EQ(g.final_p.size(), 1u);
}

TEST(Grouping, FreeAtomsKeepTheirMomenta) {
  SystemParams prm;
  prm.delta = 0;
  const GroupingResult g = detect_grouping(prm, {20.0, 60.0}, 600);
  EXPECT_FALSE(g.grouped);
  EXPECT_NEAR(g.final_p[0], 20, 1e-6);
  EXPECT_NEAR(g.final_p[1], 60, 1e-6);
}

TEST(Grouping, RejectsBadHorizon) {
  SystemParams prm;
  EXPECT_THROW(detect_grouping(prm, {1.0}, 100), Error);
  EXPECT_THROW(detect_grouping(prm, {}, 1000), Error);
}
