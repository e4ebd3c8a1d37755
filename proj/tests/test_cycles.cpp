#include <gtest/gtest.h>

#include <cmath>

#include "atomwave/cycles.hpp"

using namespace atomwave;

namespace {

ReducedState section_state(double xi, double v) { return {xi, 10.0, 0.0, v, -0.5}; }

// m-cycle of section points repeated `reps` times with a tiny jitter.
std::vector<ReducedState> cycle_points(int m, int reps, double jitter = 0.0) {
  std::vector<ReducedState> out;
  for (int r = 0; r < reps; ++r)
    for (int k = 0; k < m; ++k) out.push_back(section_state(0.5 + k + jitter * (r % 3), -1.0 - k));
  return out;
}

}  // namespace

TEST(Clustering, SingleLinkageGroupsNearbyPoints) {
  std::vector<std::array<double, 5>> pts{{0, 0, 0, 0, 0}, {0.0005, 0, 0, 0, 0}, {0.0009, 0, 0, 0, 0},
                                         {1, 0, 0, 0, 0}, {1.0004, 0, 0, 0, 0}};
  const auto lab = detail::single_linkage(pts, {1, 1, 1, 1, 1}, 1e-3);
  EXPECT_EQ(lab, (std::vector<int>{0, 0, 0, 1, 1}));
  // chaining: the first and third points are 0.0009 apart only via the second
  const auto coarse = detail::single_linkage(pts, {0.1, 1, 1, 1, 1}, 1e-3);
  EXPECT_EQ(coarse, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Clustering, WindowsAgreeOnAStableCycle) {
  ClassifyConfig cfg;
  const std::array<double, 5> scale{1, 1, 1, 1, 1};
  for (int m : {1, 2, 3, 7}) {
    const auto w = detail::judge_windows(cycle_points(m, 5, 1e-5), cycle_points(m, 5, 1e-5), scale, cfg);
    EXPECT_TRUE(w.stable) << m;
    EXPECT_EQ(w.clusters, m);
  }
}

TEST(Clustering, DisagreeingWindowsAreNotStable) {
  ClassifyConfig cfg;
  const std::array<double, 5> scale{1, 1, 1, 1, 1};
  EXPECT_FALSE(detail::judge_windows(cycle_points(2, 5), cycle_points(3, 5), scale, cfg).stable);
  // broken visiting order
  auto b = cycle_points(3, 4);
  std::swap(b[4], b[5]);
  EXPECT_FALSE(detail::judge_windows(cycle_points(3, 4), b, scale, cfg).stable);
  // periods above max_period
  cfg.max_period = 4;
  EXPECT_FALSE(detail::judge_windows(cycle_points(5, 4), cycle_points(5, 4), scale, cfg).stable);
  // too few points per cluster
  EXPECT_FALSE(detail::judge_windows(cycle_points(3, 1), cycle_points(3, 1), scale, cfg).enough_points);
}

TEST(Labels, CategoriesAndNames) {
  AttractorLabel l;
  EXPECT_EQ(l.name(), "Unresolved");
  EXPECT_EQ(l.category(), 0);
  l.kind = AttractorKind::Period;
  for (int m : {1, 2, 3}) {
    l.period = m;
    EXPECT_EQ(l.category(), m);
  }
  l.period = 7;
  EXPECT_EQ(l.category(), 4);
  EXPECT_EQ(l.name(), "Period(7)");
  l.kind = AttractorKind::Chaotic;
  EXPECT_EQ(l.category(), 5);
}

TEST(Classification, PeriodOneAtModerateDrive) {
  SystemParams prm;
  prm.n = 3000;
  const AttractorLabel l = classify_attractor(prm, ReducedState::ground(60));
  EXPECT_TRUE(l.is_period(1)) << l.name() << " " << l.note;
}

TEST(Classification, NoFieldMeansNoSection) {
  SystemParams prm;
  prm.n = 0;
  ClassifyConfig cfg;
  cfg.max_transient = 2000;
  const AttractorLabel l = classify_attractor(prm, ReducedState::ground(60), cfg);
  EXPECT_EQ(l.kind, AttractorKind::Unresolved);
}

TEST(Classification, InvalidConfigThrows) {
  ClassifyConfig cfg;
  cfg.window = 0;
  EXPECT_THROW(classify_attractor(SystemParams{}, ReducedState::ground(60), cfg), Error);
}

TEST(Bifurcation, GridAndBranchCounting) {
  EXPECT_EQ(linear_grid(0, 1, 5), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(linear_grid(3, 9, 1), (std::vector<double>{3}));
  EXPECT_TRUE(linear_grid(3, 9, 0).empty());

  BifurcationRecord r;
  r.v_values = {-10, -9.99, -5, -4.999, -1};
  EXPECT_EQ(branch_count(r, 0.1), 3);
  r.v_values.clear();
  EXPECT_EQ(branch_count(r, 0.1), 0);
}

TEST(Bifurcation, PeriodOneBranchTracking) {
  auto rec = [](double v) {
    BifurcationRecord r;
    r.label.kind = AttractorKind::Period;
    r.label.period = 1;
    r.v_values = {v};
    return r;
  };
  // two interleaved branches drifting slowly, plus one isolated jump
  std::vector<BifurcationRecord> scan{rec(-45.0), rec(-44.5), rec(-45.02), rec(-44.52), rec(-40.0), rec(-45.04)};
  EXPECT_EQ(period1_branches(scan, 0.1), 3);
  EXPECT_EQ(period1_branches(scan, 10), 1);
}

TEST(Bifurcation, ScanIsIndependentOfWorkerCount) {
  SystemParams base;
  ClassifyConfig cfg;
  cfg.transient = 500;
  cfg.window = 200;
  cfg.max_transient = 500;
  const std::vector<double> ns{2000, 2500, std::nan("")};
  const auto a = bifurcation_scan(base, ns, ReducedState::ground(60), cfg, 1);
  const auto b = bifurcation_scan(base, ns, ReducedState::ground(60), cfg, 3);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].v_values, b[i].v_values);
    EXPECT_EQ(a[i].label.name(), b[i].label.name());
  }
  EXPECT_TRUE(a[0].error.empty());
  EXPECT_FALSE(a[2].error.empty());  // the NaN cell fails, the others complete
}

TEST(Noise, CalibrationUsesAttractorForce) {
  SystemParams prm;
  ClassifyConfig cfg;
  cfg.transient = 500;
  cfg.window = 100;
  const double f = attractor_force_scale(prm, ReducedState::ground(60), cfg);
  EXPECT_GT(f, 0);
  const NoiseSpec ns = calibrated_noise(f, 0.01, 5);
  EXPECT_NEAR(ns.rms(), 0.01 * f, 1e-12);
  EXPECT_EQ(ns.seed, 5u);
}
