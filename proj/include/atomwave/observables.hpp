#ifndef ATOMWAVE_OBSERVABLES_HPP
#define ATOMWAVE_OBSERVABLES_HPP

// Mechanical observables of ballistic atoms: node-to-node flight averages,
// empirical friction curves F(|p|) = -d|p|/dtau with their zeros, and
// velocity grouping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

struct FlightAverage {
  double tau_mid = 0.0;      // midpoint of the flight
  double duration = 0.0;
  double p_bar = 0.0;        // time-averaged momentum over the flight
  double dp_bar_dtau = 0.0;  // rate of change of p_bar between flights
};

struct FlightAverages {
  std::vector<FlightAverage> flights;
  bool trapped = false;  // fewer than two complete flights
};

/// Averages p over each flight between consecutive node crossings. Uses the
/// trajectory samples inside each flight plus the event states at its ends.
inline FlightAverages node_flight_averages(const Trajectory& tr) {
  std::vector<const Event*> nodes;
  for (const Event& e : tr.events)
    if (e.kind == EventKind::NodeCrossing) nodes.push_back(&e);
  FlightAverages out;
  if (nodes.size() < 3) {
    out.trapped = true;
    return out;
  }

  std::size_t k = 0;  // first sample not before the current flight
  for (std::size_t f = 0; f + 1 < nodes.size(); ++f) {
    const double ta = nodes[f]->tau, tb = nodes[f + 1]->tau;
    double t_prev = ta, p_prev = nodes[f]->state.p, integral = 0.0;
    while (k < tr.times.size() && tr.times[k] <= ta) ++k;
    for (; k < tr.times.size() && tr.times[k] < tb; ++k) {
      integral += 0.5 * (tr.states[k].p + p_prev) * (tr.times[k] - t_prev);
      t_prev = tr.times[k];
      p_prev = tr.states[k].p;
    }
    integral += 0.5 * (nodes[f + 1]->state.p + p_prev) * (tb - t_prev);
    const double dur = tb - ta;
    if (!(dur > 0)) continue;
    out.flights.push_back({0.5 * (ta + tb), dur, integral / dur, 0.0});
  }

  auto& fl = out.flights;
  if (fl.size() < 2) {
    out.trapped = true;
    return out;
  }
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == fl.size() ? i : i + 1;
    fl[i].dp_bar_dtau = (fl[b].p_bar - fl[a].p_bar) / (fl[b].tau_mid - fl[a].tau_mid);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Friction curve

enum class ZeroKind { Attractor, Repellor };

inline const char* to_string(ZeroKind k) {
  return k == ZeroKind::Attractor ? "attractor" : "repellor";
}

struct FrictionSample {
  double p0 = 0.0;     // launch momentum
  double p_bar = 0.0;  // mean |p_bar| over the measured flights
  double F = 0.0;      // -d|p_bar|/dtau
  bool trapped = false;
};

struct FrictionZero {
  double p_zero = 0.0;
  ZeroKind kind = ZeroKind::Attractor;
};

struct FrictionCurve {
  std::vector<FrictionSample> samples;  // ballistic points, sorted by p_bar
  std::vector<FrictionSample> trapped;  // grid points that failed the ballistic test
  std::vector<FrictionZero> zeros;
  double p_cr = std::numeric_limits<double>::quiet_NaN();
  double p_a = std::numeric_limits<double>::quiet_NaN();
  double p_b = std::numeric_limits<double>::quiet_NaN();
};

struct FrictionConfig {
  int flights = 20;               // measured flights per grid point
  int min_ballistic_crossings = 10;
  double settle_time = 0.0;       // Bloch relaxation before measuring; 0 picks 20/gamma_a
  IntegratorConfig integrator{};
  int workers = 1;
};

/// Zeros of F by sign change and linear interpolation between samples.
inline std::vector<FrictionZero> friction_zeros(const std::vector<FrictionSample>& s) {
  std::vector<FrictionZero> z;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double f0 = s[i].F, f1 = s[i + 1].F;
    if (f0 == 0.0 && i > 0) continue;  // counted at the previous interval
    if (!((f0 <= 0 && f1 > 0) || (f0 >= 0 && f1 < 0))) continue;
    const double x = s[i].p_bar + (s[i + 1].p_bar - s[i].p_bar) * f0 / (f0 - f1);
    z.push_back({x, f1 > f0 ? ZeroKind::Attractor : ZeroKind::Repellor});
  }
  return z;
}

namespace detail {

inline FrictionSample measure_friction(const SystemParams& prm, double p0,
                                       const FrictionConfig& cfg) {
  FrictionSample out;
  out.p0 = p0;
  const double settle =
      cfg.settle_time > 0 ? cfg.settle_time : (prm.gamma_a > 0 ? 20.0 / prm.gamma_a : 50.0);
  const ReducedState s0 = ReducedState::ground(p0);
  const double flight = kPi / std::max(prm.alpha * std::abs(p0), 1e-12);
  IntegratorConfig icfg = cfg.integrator;
  icfg.sample_interval = std::min(0.05, flight / 40);
  icfg.record_from = settle;
  const int needed = std::max(cfg.flights + 2, cfg.min_ballistic_crossings);
  icfg.max_tau = settle + 4 * flight * (needed + 2);
  int seen = 0;
  const double sign0 = p0 >= 0 ? 1.0 : -1.0;
  bool reversed = false;
  // Stop once enough flights are collected or as soon as p changes sign.
  std::vector<EventSpec> ev{
      EventSpec::node_crossing(),
      EventSpec::custom([sign0](double, const ReducedState& s) { return sign0 * s.p; },
                        Direction::Falling, true)};
  const Trajectory tr = integrate(s0, prm, icfg, ev);
  for (const Event& e : tr.events) {
    if (e.kind == EventKind::Custom) reversed = true;
    if (e.kind == EventKind::NodeCrossing && e.tau >= settle) ++seen;
  }
  if (reversed || seen < needed) {
    out.trapped = true;
    return out;
  }

  Trajectory measured;
  measured.times = tr.times;
  measured.states = tr.states;
  for (const Event& e : tr.events)
    if (e.kind == EventKind::NodeCrossing && e.tau >= settle) measured.events.push_back(e);
  const FlightAverages fa = node_flight_averages(measured);
  if (fa.trapped) {
    out.trapped = true;
    return out;
  }
  // Least-squares slope of |p_bar| against the flight midpoints.
  const auto& fl = fa.flights;
  const std::size_t m = std::min<std::size_t>(fl.size(), static_cast<std::size_t>(cfg.flights));
  double st = 0, sp = 0, stt = 0, stp = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = fl[i].tau_mid, p = std::abs(fl[i].p_bar);
    st += t;
    sp += p;
    stt += t * t;
    stp += t * p;
  }
  const double md = static_cast<double>(m);
  const double var = stt - st * st / md;
  out.p_bar = sp / md;
  out.F = var > 0 ? -(stp - st * sp / md) / var : 0.0;
  return out;
}

}  // namespace detail

/// Empirical friction curve over a momentum grid.
inline FrictionCurve empirical_friction_curve(const SystemParams& prm,
                                              const std::vector<double>& p_grid,
                                              const FrictionConfig& cfg = {}) {
  prm.validate();
  if (p_grid.empty()) fail(ErrorKind::InvalidArgument, "empirical_friction_curve: empty grid");
  if (cfg.flights < 2) fail(ErrorKind::InvalidArgument, "empirical_friction_curve: flights >= 2");
  const auto cells = run_sweep<FrictionSample>(p_grid.size(), cfg.workers, [&](std::size_t i) {
    return detail::measure_friction(prm, p_grid[i], cfg);
  });
  FrictionCurve fc;
  for (const auto& c : cells) {
    if (!c.ok()) fail(ErrorKind::Numerical, "empirical_friction_curve: " + c.error);
    (c.value->trapped ? fc.trapped : fc.samples).push_back(*c.value);
  }
  if (fc.samples.empty()) {
    double bound = 0;
    for (double p : p_grid) bound = std::max(bound, std::abs(p));
    fail(ErrorKind::Degenerate,
         "empirical_friction_curve: every grid point trapped (p_cr > " + std::to_string(bound) + ")");
  }
  std::sort(fc.samples.begin(), fc.samples.end(),
            [](const FrictionSample& a, const FrictionSample& b) { return a.p_bar < b.p_bar; });
  fc.p_cr = std::numeric_limits<double>::infinity();
  for (const auto& s : fc.samples) fc.p_cr = std::min(fc.p_cr, std::abs(s.p0));
  fc.zeros = friction_zeros(fc.samples);
  if (!fc.zeros.empty()) {
    fc.p_a = fc.zeros.front().p_zero;
    fc.p_b = fc.zeros.back().p_zero;
  }
  return fc;
}

// ---------------------------------------------------------------------------
// Velocity grouping

struct GroupingResult {
  bool grouped = false;
  double p_s = 0.0;     // mean final momentum magnitude
  double spread = 0.0;  // (max - min) / mean of the final momenta
  std::vector<double> final_p;
};

struct GroupingConfig {
  double window = 500.0;        // averaging window at the end of the run
  double tolerance = 0.05;      // relative spread accepted as grouped
  IntegratorConfig integrator{};
  int workers = 1;
};

/// Runs each launch momentum to `horizon` and compares |<p>| over the final
/// window.
inline GroupingResult detect_grouping(const SystemParams& prm, const std::vector<double>& p0_set,
                                      double horizon, const GroupingConfig& cfg = {}) {
  prm.validate();
  if (p0_set.empty()) fail(ErrorKind::InvalidArgument, "detect_grouping: no momenta");
  if (!(horizon > cfg.window) || !(cfg.window > 0))
    fail(ErrorKind::InvalidArgument, "detect_grouping: need horizon > window > 0");
  const auto cells = run_sweep<double>(p0_set.size(), cfg.workers, [&](std::size_t i) {
    IntegratorConfig icfg = cfg.integrator;
    icfg.max_tau = horizon;
    icfg.record_from = horizon - cfg.window;
    icfg.sample_interval = 0.05;
    const Trajectory tr = integrate(ReducedState::ground(p0_set[i]), prm, icfg);
    double integral = 0;
    for (std::size_t k = 1; k < tr.size(); ++k)
      integral += 0.5 * (tr.states[k].p + tr.states[k - 1].p) * (tr.times[k] - tr.times[k - 1]);
    return std::abs(integral / (tr.times.back() - tr.times.front()));
  });
  GroupingResult g;
  for (const auto& c : cells) {
    if (!c.ok()) fail(ErrorKind::Numerical, "detect_grouping: " + c.error);
    g.final_p.push_back(*c.value);
  }
  const auto [lo, hi] = std::minmax_element(g.final_p.begin(), g.final_p.end());
  double mean = 0;
  for (double p : g.final_p) mean += p;
  mean /= static_cast<double>(g.final_p.size());
  g.p_s = mean;
  g.spread = mean > 0 ? (*hi - *lo) / mean : (*hi > *lo ? 1.0 : 0.0);
  g.grouped = g.spread < cfg.tolerance && mean > 0;
  if (g.final_p.size() == 1) g.grouped = true;
  return g;
}

}  // namespace atomwave

#endif  // ATOMWAVE_OBSERVABLES_HPP
