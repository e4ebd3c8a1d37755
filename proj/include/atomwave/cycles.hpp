#ifndef ATOMWAVE_CYCLES_HPP
#define ATOMWAVE_CYCLES_HPP

// Attractor classification on the u = 0 section, bifurcation scans in n and
// the (n, delta) synchronisation map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "atomwave/chaos.hpp"
#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

enum class AttractorKind { Period, Chaotic, Unresolved };

struct AttractorLabel {
  AttractorKind kind = AttractorKind::Unresolved;
  int period = 0;  // Period only

  // diagnostics
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double lambda_stderr = std::numeric_limits<double>::quiet_NaN();
  int clusters = 0;
  double transient_used = 0.0;
  std::size_t section_points = 0;
  std::string note;

  bool is_period(int m) const { return kind == AttractorKind::Period && period == m; }

  /// Map category: 1, 2, 3 for the low periods, 4 for periods 4..12,
  /// 5 for chaos and 0 for unresolved cells.
  int category() const {
    switch (kind) {
      case AttractorKind::Period: return period <= 3 ? period : 4;
      case AttractorKind::Chaotic: return 5;
      case AttractorKind::Unresolved: return 0;
    }
    return 0;
  }

  std::string name() const {
    switch (kind) {
      case AttractorKind::Period: return "Period(" + std::to_string(period) + ")";
      case AttractorKind::Chaotic: return "Chaotic";
      case AttractorKind::Unresolved: return "Unresolved";
    }
    return "Unresolved";
  }
};

struct ClassifyConfig {
  double transient = 2000.0;
  double window = 400.0;          // length of each of the two observation windows
  double epsilon = 1e-3;          // merge distance in units of the attractor spread
  int max_period = 12;
  int max_extensions = 4;         // window shifts tried when the two windows disagree
  double max_transient = 32000.0; // cap for transient doubling on slowly settling orbits
  double lambda_min = 0.01;
  double lambda_horizon = 1.0e4;
  double sample_interval = 0.1;   // trajectory sampling for the coordinate spreads
  IntegratorConfig integrator{};
  std::optional<NoiseSpec> noise;

  void validate() const {
    if (transient < 0) fail(ErrorKind::InvalidArgument, "ClassifyConfig: transient must be >= 0");
    if (!(window > 0)) fail(ErrorKind::InvalidArgument, "ClassifyConfig: window must be > 0");
    if (!(epsilon > 0)) fail(ErrorKind::InvalidArgument, "ClassifyConfig: epsilon must be > 0");
    if (max_period < 1) fail(ErrorKind::InvalidArgument, "ClassifyConfig: max_period must be >= 1");
    if (max_extensions < 0)
      fail(ErrorKind::InvalidArgument, "ClassifyConfig: max_extensions must be >= 0");
    if (!(sample_interval > 0))
      fail(ErrorKind::InvalidArgument, "ClassifyConfig: sample_interval must be > 0");
  }
};

/// Label plus the raw u = 0 crossings of the final two windows.
struct AttractorObservation {
  AttractorLabel label;
  std::vector<Event> window_events;  // both crossing directions
  double window_begin = 0.0;
  double window_end = 0.0;
  ReducedState final_state{};
};

namespace detail {

inline std::array<double, 5> section_coords(const ReducedState& s) {
  return {std::cos(s.xi), std::sin(s.xi), s.p, s.v, s.z};
}

/// Single-linkage clusters of `pts` at distance eps after dividing each
/// coordinate by `scale`. Labels are numbered in order of first appearance.
inline std::vector<int> single_linkage(const std::vector<std::array<double, 5>>& pts,
                                       const std::array<double, 5>& scale, double eps) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double eps2 = eps * eps;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (int k = 0; k < 5; ++k) {
        const double d = (pts[i][k] - pts[j][k]) / scale[k];
        d2 += d * d;
      }
      if (d2 < eps2) parent[find(i)] = find(j);
    }
  std::vector<int> label(n, -1), root_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

/// Standard deviation of each section coordinate over trajectory samples.
inline std::array<double, 5> coordinate_spread(const std::vector<ReducedState>& samples) {
  std::array<double, 5> mean{}, var{};
  for (const auto& s : samples) {
    const auto c = section_coords(s);
    for (int k = 0; k < 5; ++k) mean[k] += c[k];
  }
  const double n = static_cast<double>(std::max<std::size_t>(samples.size(), 1));
  for (auto& m : mean) m /= n;
  for (const auto& s : samples) {
    const auto c = section_coords(s);
    for (int k = 0; k < 5; ++k) var[k] += (c[k] - mean[k]) * (c[k] - mean[k]);
  }
  std::array<double, 5> sd{};
  for (int k = 0; k < 5; ++k) {
    sd[k] = std::sqrt(var[k] / n);
    // A coordinate that does not move cannot separate clusters.
    if (!(sd[k] > 1e-300)) sd[k] = 1.0;
  }
  return sd;
}

struct WindowVerdict {
  bool stable = false;
  bool enough_points = true;
  int clusters = 0;
  std::size_t points = 0;
};

/// Compares the cluster structure of two consecutive windows of rising
/// section points.
inline WindowVerdict judge_windows(const std::vector<ReducedState>& a,
                                   const std::vector<ReducedState>& b,
                                   const std::array<double, 5>& scale, const ClassifyConfig& cfg) {
  WindowVerdict w;
  w.points = a.size() + b.size();
  std::vector<std::array<double, 5>> pts;
  for (const auto& s : a) pts.push_back(section_coords(s));
  for (const auto& s : b) pts.push_back(section_coords(s));
  const auto lab = single_linkage(pts, scale, cfg.epsilon);
  int m = 0;
  for (int l : lab) m = std::max(m, l + 1);
  w.clusters = m;
  if (m == 0 || a.size() < 2 * static_cast<std::size_t>(m) ||
      b.size() < 2 * static_cast<std::size_t>(m)) {
    w.enough_points = false;
    return w;
  }
  auto distinct = [&](std::size_t from, std::size_t to) {
    std::vector<int> v(lab.begin() + from, lab.begin() + to);
    std::sort(v.begin(), v.end());
    return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
  };
  const int ma = distinct(0, a.size()), mb = distinct(a.size(), lab.size());
  if (ma != m || mb != m || m > cfg.max_period) return w;
  // fixed cyclic visiting order
  for (std::size_t i = 0; i + m < lab.size(); ++i)
    if (lab[i] != lab[i + m]) return w;
  w.stable = true;
  return w;
}

}  // namespace detail

/// Long-term behaviour of the trajectory started at s0.
inline AttractorObservation observe_attractor(const SystemParams& prm, const ReducedState& s0,
                                              const ClassifyConfig& cfg = {}) {
  prm.validate();
  cfg.validate();
  std::optional<NoiseForce> nf;
  if (cfg.noise) nf.emplace(*cfg.noise);
  const ReducedSystem sys{prm, nf ? &*nf : nullptr};

  EventSpec section = EventSpec::section_u0();
  section.direction = Direction::Both;

  AttractorObservation obs;
  AttractorLabel& label = obs.label;
  std::vector<Event> events;
  std::vector<double> times;
  std::vector<ReducedState> samples;

  // One continuous run through the transient and both windows; later
  // extensions continue from the last state.
  IntegratorConfig icfg = cfg.integrator;
  icfg.record_from = cfg.transient;
  icfg.sample_interval = cfg.sample_interval;
  icfg.max_tau = cfg.transient + 2 * cfg.window;
  Trajectory tr = integrate_system(sys, s0, icfg, {section});
  events = std::move(tr.events);
  times = std::move(tr.times);
  samples = std::move(tr.states);
  ReducedState state = tr.final_state;
  double t_end = tr.final_tau;

  double begin = cfg.transient;
  auto advance = [&](double new_begin) {
    // drop what lies before the new window start
    std::erase_if(events, [&](const Event& e) { return e.tau < new_begin; });
    std::size_t keep = 0;
    while (keep < times.size() && times[keep] < new_begin) ++keep;
    times.erase(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(keep));
    samples.erase(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(keep));
    const double target = new_begin + 2 * cfg.window;
    icfg.record_from = std::max(new_begin, t_end);
    icfg.max_tau = target - t_end;
    Trajectory more = integrate_system(sys, state, icfg, {section}, t_end);
    events.insert(events.end(), more.events.begin(), more.events.end());
    times.insert(times.end(), more.times.begin(), more.times.end());
    samples.insert(samples.end(), more.states.begin(), more.states.end());
    state = more.final_state;
    t_end = more.final_tau;
    begin = new_begin;
  };
  auto judge = [&] {
    const double mid = begin + cfg.window, end = begin + 2 * cfg.window;
    std::vector<ReducedState> a, b;
    for (const Event& e : events) {
      if (e.direction != 1) continue;
      if (e.tau >= begin && e.tau < mid) a.push_back(e.state);
      else if (e.tau >= mid && e.tau <= end) b.push_back(e.state);
    }
    std::vector<ReducedState> win;
    for (std::size_t i = 0; i < times.size(); ++i)
      if (times[i] >= begin && times[i] <= end) win.push_back(samples[i]);
    return detail::judge_windows(a, b, detail::coordinate_spread(win), cfg);
  };
  auto finish = [&](const detail::WindowVerdict& v) {
    label.clusters = v.clusters;
    label.section_points = v.points;
    label.transient_used = begin;
    obs.window_begin = begin;
    obs.window_end = begin + 2 * cfg.window;
    obs.final_state = state;
    for (const Event& e : events)
      if (e.tau >= obs.window_begin && e.tau <= obs.window_end) obs.window_events.push_back(e);
    if (v.stable) {
      label.kind = AttractorKind::Period;
      label.period = v.clusters;
    }
    return obs;
  };

  // Disagreeing windows with few clusters: slide forward a little.
  detail::WindowVerdict verdict = judge();
  for (int ext = 0; ext < cfg.max_extensions && !verdict.stable && verdict.enough_points &&
                    verdict.clusters <= cfg.max_period;
       ++ext) {
    advance(begin + cfg.window);
    verdict = judge();
  }
  if (verdict.stable) return finish(verdict);
  if (verdict.points == 0 || (!verdict.enough_points && verdict.clusters <= cfg.max_period)) {
    label.note = "insufficient section points";
    return finish(verdict);
  }

  LyapunovConfig lc;
  lc.transient = 0.0;
  lc.horizon = cfg.lambda_horizon;
  lc.integrator = cfg.integrator;
  lc.noise = cfg.noise;
  const LyapunovEstimate le = max_lyapunov(prm, state, lc);
  label.lambda = le.lambda;
  label.lambda_stderr = le.stderr_;
  if (le.lambda > cfg.lambda_min) {
    label.kind = AttractorKind::Chaotic;
    return finish(verdict);
  }

  // Not chaotic: the orbit is still settling. Double the transient.
  while (2 * begin <= cfg.max_transient && begin > 0) {
    advance(2 * begin);
    verdict = judge();
    if (verdict.stable) return finish(verdict);
  }
  label.note = "no stable cluster structure and lambda below threshold";
  return finish(verdict);
}

inline AttractorLabel classify_attractor(const SystemParams& prm, const ReducedState& s0,
                                         const ClassifyConfig& cfg = {}) {
  return observe_attractor(prm, s0, cfg).label;
}

/// Largest |u sin xi| (the dipole force) along the unperturbed orbit after
/// the transient; the scale used to calibrate weak noise.
inline double attractor_force_scale(const SystemParams& prm, const ReducedState& s0,
                                    const ClassifyConfig& cfg = {}) {
  IntegratorConfig icfg = cfg.integrator;
  icfg.record_from = cfg.transient;
  icfg.max_tau = cfg.transient + 2 * cfg.window;
  icfg.sample_interval = std::min(cfg.sample_interval, 0.05);
  const Trajectory tr = integrate(s0, prm, icfg);
  double f = 0;
  for (const auto& s : tr.states) f = std::max(f, std::abs(s.u * std::sin(s.xi)));
  return f;
}

/// Noise whose rms force is `fraction` of the attractor force scale.
inline NoiseSpec calibrated_noise(double force_scale, double fraction = 0.01,
                                  std::uint64_t seed = 1, int n_harmonics = 100) {
  NoiseSpec ns;
  ns.n_harmonics = n_harmonics;
  ns.amplitude = NoiseSpec::amplitude_for_rms(force_scale, fraction, n_harmonics);
  ns.seed = seed;
  return ns;
}

// ---------------------------------------------------------------------------
// Bifurcation scan

struct BifurcationRecord {
  double n = 0.0;
  std::vector<double> v_values;  // v at u = 0 crossings with v < 0, sorted
  AttractorLabel label;
  std::string error;             // non-empty when the point failed
};

/// n-grid of `steps` points spanning [n_first, n_last].
inline std::vector<double> linear_grid(double first, double last, std::size_t steps) {
  if (steps == 0) return {};
  if (steps == 1) return {first};
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

inline std::vector<BifurcationRecord> bifurcation_scan(const SystemParams& base,
                                                       const std::vector<double>& n_values,
                                                       const ReducedState& s0,
                                                       const ClassifyConfig& cfg = {},
                                                       int workers = 1) {
  const auto cells = run_sweep<BifurcationRecord>(n_values.size(), workers, [&](std::size_t i) {
    SystemParams prm = base;
    prm.n = n_values[i];
    const AttractorObservation obs = observe_attractor(prm, s0, cfg);
    BifurcationRecord r;
    r.n = prm.n;
    r.label = obs.label;
    for (const Event& e : obs.window_events)
      if (e.state.v < 0) r.v_values.push_back(e.state.v);
    std::sort(r.v_values.begin(), r.v_values.end());
    return r;
  });
  std::vector<BifurcationRecord> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].ok()) {
      out.push_back(*cells[i].value);
    } else {
      BifurcationRecord r;
      r.n = n_values[i];
      r.label.note = cells[i].error;
      r.error = cells[i].error;
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Number of separate v-branches in a record; a gap wider than `gap`
/// between sorted values starts a new branch.
inline int branch_count(const BifurcationRecord& r, double gap) {
  if (r.v_values.empty()) return 0;
  int b = 1;
  for (std::size_t i = 1; i < r.v_values.size(); ++i)
    if (r.v_values[i] - r.v_values[i - 1] > gap) ++b;
  return b;
}

/// Number of distinct period-1 branches in an n-scan. Consecutive Period(1)
/// points whose v differs by less than `gap` continue a branch; otherwise
/// they join the nearest open branch within `gap` or start a new one.
inline int period1_branches(const std::vector<BifurcationRecord>& scan, double gap) {
  std::vector<double> tips;  // last v of each branch
  for (const auto& r : scan) {
    if (!r.label.is_period(1) || r.v_values.empty()) continue;
    const double v = r.v_values.front();
    std::size_t best = tips.size();
    double best_d = gap;
    for (std::size_t b = 0; b < tips.size(); ++b)
      if (std::abs(tips[b] - v) < best_d) best_d = std::abs(tips[b] - v), best = b;
    if (best == tips.size()) tips.push_back(v);
    else tips[best] = v;
  }
  return static_cast<int>(tips.size());
}

// ---------------------------------------------------------------------------
// Synchronisation map

struct SyncMap {
  std::vector<double> n_values;
  std::vector<double> delta_values;
  std::vector<AttractorLabel> labels;  // row-major, n outer, delta inner
  std::vector<std::string> errors;     // per cell, empty when fine

  const AttractorLabel& at(std::size_t i_n, std::size_t i_delta) const {
    return labels[i_n * delta_values.size() + i_delta];
  }
};

inline SyncMap synchronization_map(const SystemParams& base, const std::vector<double>& n_values,
                                   const std::vector<double>& delta_values, const ReducedState& s0,
                                   const ClassifyConfig& cfg = {}, int workers = 1) {
  SyncMap map;
  map.n_values = n_values;
  map.delta_values = delta_values;
  const std::size_t cols = delta_values.size();
  const auto cells = run_sweep<AttractorLabel>(n_values.size() * cols, workers, [&](std::size_t i) {
    SystemParams prm = base;
    prm.n = n_values[i / cols];
    prm.delta = delta_values[i % cols];
    return classify_attractor(prm, s0, cfg);
  });
  for (const auto& c : cells) {
    if (c.ok()) {
      map.labels.push_back(*c.value);
      map.errors.emplace_back();
    } else {
      AttractorLabel l;
      l.note = c.error;
      map.labels.push_back(l);
      map.errors.push_back(c.error);
    }
  }
  return map;
}

}  // namespace atomwave

#endif  // ATOMWAVE_CYCLES_HPP
