#ifndef ATOMWAVE_SCATTERING_HPP
#define ATOMWAVE_SCATTERING_HPP

// Exit-time experiments: atoms launched at xi = 0 between two detectors at
// xi = +-pi W, scans of the exit time over n or delta, and adaptive
// refinement of the intervals where T varies strongly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/spectra.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

struct ExitExperiment {
  SystemParams prm{};
  double detector_span = 2.0;  // wavelengths between the detectors
  double p0 = 50.0;
  double tau_max = 1.0e5;
  IntegratorConfig integrator{};

  void validate() const {
    prm.validate();
    if (!(detector_span > 0)) fail(ErrorKind::InvalidArgument, "ExitExperiment: detector_span must be > 0");
    if (!(tau_max > 0)) fail(ErrorKind::InvalidArgument, "ExitExperiment: tau_max must be > 0");
    if (!std::isfinite(p0)) fail(ErrorKind::InvalidArgument, "ExitExperiment: p0 must be finite");
  }
};

enum class ExitOutcome { Exit, Timeout };

inline const char* to_string(ExitOutcome o) { return o == ExitOutcome::Exit ? "exit" : "timeout"; }

struct ExitResult {
  ExitOutcome outcome = ExitOutcome::Timeout;
  double T = std::numeric_limits<double>::infinity();  // finite for Exit only
  int side = 0;  // +1 right detector, -1 left detector

  bool exited() const { return outcome == ExitOutcome::Exit; }
};

/// First time the atom reaches a detector, or Timeout after tau_max.
inline ExitResult exit_time(const ExitExperiment& exp) {
  exp.validate();
  const double xd = kPi * exp.detector_span;
  IntegratorConfig icfg = exp.integrator;
  icfg.max_tau = exp.tau_max;
  icfg.sample_interval = -1;
  const Trajectory tr = integrate(ReducedState::ground(exp.p0), exp.prm, icfg,
                                  {EventSpec::detector(xd), EventSpec::detector(-xd)});
  ExitResult r;
  if (tr.stopped_by_event) {
    r.outcome = ExitOutcome::Exit;
    r.T = tr.final_tau;
    r.side = tr.events.back().spec_index == 0 ? 1 : -1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scans and refinement

enum class ScanAxis { PhotonNumber, Detuning };

inline const char* to_string(ScanAxis a) { return a == ScanAxis::PhotonNumber ? "n" : "delta"; }

struct ScanSegment {
  int level = 0;
  long parent_interval = -1;  // index of the interval in the previous level's segment list
  std::size_t parent_segment = 0;
  std::vector<double> values;  // sorted
  std::vector<ExitResult> results;
};

struct LevelStats {
  int level = 0;
  std::size_t points = 0;
  std::size_t flagged = 0;             // intervals above the variation threshold
  std::size_t refined = 0;             // parent intervals rescanned to build this level
  double flagged_length_fraction = 0;  // flagged length / scanned length of the level
  double variation = 0;                // total variation of finite T over the level
  double variation_per_flagged = 0;
  double timeout_fraction = 0;
  double mean_T = 0;                   // mean of finite T
};

struct ExitScan {
  ScanAxis axis = ScanAxis::Detuning;
  ExitExperiment base{};
  std::function<ExitResult(double)> evaluate;  // outcome at one parameter value
  double threshold = 0.0;  // flagging threshold on |dT| per interval
  std::vector<ScanSegment> segments;  // level 0 first
  std::vector<LevelStats> stats;

  const ScanSegment& root() const { return segments.front(); }
  int depth() const { return stats.empty() ? 0 : stats.back().level; }
};

struct RefineConfig {
  int depth = 3;
  int zoom = 10;                  // sub-intervals per flagged interval
  std::size_t max_flagged = 64;   // largest-variation intervals refined per level
  int workers = 1;
};

namespace detail {

inline ExitExperiment at_value(const ExitExperiment& base, ScanAxis axis, double x) {
  ExitExperiment e = base;
  (axis == ScanAxis::PhotonNumber ? e.prm.n : e.prm.delta) = x;
  return e;
}

inline std::vector<ExitResult> evaluate(const std::function<ExitResult(double)>& f,
                                        const std::vector<double>& xs, int workers) {
  const auto cells =
      run_sweep<ExitResult>(xs.size(), workers, [&](std::size_t i) { return f(xs[i]); });
  std::vector<ExitResult> out;
  for (const auto& c : cells) {
    if (!c.ok()) fail(ErrorKind::Numerical, "exit scan point failed: " + c.error);
    out.push_back(*c.value);
  }
  return out;
}

/// Variation of finite T over one grid interval. Timeouts carry no finite
/// T, so an interval touching one contributes nothing; the timeout fraction
/// is reported separately.
inline double interval_variation(const ExitResult& a, const ExitResult& b) {
  return a.exited() && b.exited() ? std::abs(b.T - a.T) : 0.0;
}

inline LevelStats level_stats(const std::vector<const ScanSegment*>& segs, int level,
                              double threshold) {
  LevelStats st;
  st.level = level;
  double length = 0, flagged_length = 0, flagged_var = 0, sum_T = 0;
  std::size_t finite = 0, timeouts = 0;
  for (const ScanSegment* s : segs) {
    for (const auto& r : s->results) {
      ++st.points;
      if (r.exited()) {
        ++finite;
        sum_T += r.T;
      } else {
        ++timeouts;
      }
    }
    for (std::size_t i = 0; i + 1 < s->values.size(); ++i) {
      const double w = s->values[i + 1] - s->values[i];
      const double v = interval_variation(s->results[i], s->results[i + 1]);
      length += w;
      st.variation += v;
      if (v > threshold) {
        ++st.flagged;
        flagged_length += w;
        flagged_var += v;
      }
    }
  }
  st.flagged_length_fraction = length > 0 ? flagged_length / length : 0.0;
  st.variation_per_flagged = st.flagged ? flagged_var / static_cast<double>(st.flagged) : 0.0;
  st.timeout_fraction = st.points ? static_cast<double>(timeouts) / st.points : 0.0;
  st.mean_T = finite ? sum_T / static_cast<double>(finite) : 0.0;
  return st;
}

}  // namespace detail

struct ScanOptions {
  int workers = 1;
  double threshold_factor = 5.0;  // x median |dT| between neighbours of the level-0 scan
  double threshold = 0.0;         // > 0 overrides the adaptive threshold
};

/// Scan of an arbitrary outcome function over `values`.
inline ExitScan scan_function(std::function<ExitResult(double)> f, std::vector<double> values,
                              const ScanOptions& opt = {}) {
  if (values.size() < 2) fail(ErrorKind::InvalidArgument, "exit scan: need at least 2 points");
  std::sort(values.begin(), values.end());
  ExitScan scan;
  scan.evaluate = std::move(f);
  ScanSegment root;
  root.values = values;
  root.results = detail::evaluate(scan.evaluate, values, opt.workers);
  std::vector<double> jumps;
  for (std::size_t i = 0; i + 1 < root.results.size(); ++i)
    if (root.results[i].exited() && root.results[i + 1].exited())
      jumps.push_back(detail::interval_variation(root.results[i], root.results[i + 1]));
  scan.threshold = opt.threshold > 0 ? opt.threshold : opt.threshold_factor * median_of(jumps);
  scan.segments.push_back(std::move(root));
  scan.stats.push_back(detail::level_stats({&scan.segments.front()}, 0, scan.threshold));
  return scan;
}

/// Exit times over `values` of the scanned parameter.
inline ExitScan exit_scan(ScanAxis axis, std::vector<double> values, const ExitExperiment& base,
                          const ScanOptions& opt = {}) {
  base.validate();
  ExitScan scan = scan_function(
      [base, axis](double x) { return exit_time(detail::at_value(base, axis, x)); },
      std::move(values), opt);
  scan.axis = axis;
  scan.base = base;
  return scan;
}

/// Rescans flagged intervals level by level at `zoom` times finer spacing.
/// Grid points shared with the parent reuse the parent's results.
inline ExitScan refine_singular(ExitScan scan, const RefineConfig& cfg = {}) {
  if (scan.segments.empty() || !scan.evaluate)
    fail(ErrorKind::InvalidArgument, "refine_singular: empty scan");
  if (cfg.zoom < 2) fail(ErrorKind::InvalidArgument, "refine_singular: zoom must be >= 2");
  int level = scan.depth();
  for (int d = 0; d < cfg.depth; ++d, ++level) {
    struct Flag {
      std::size_t seg;
      std::size_t interval;
      double var;
    };
    std::vector<Flag> flags;
    for (std::size_t s = 0; s < scan.segments.size(); ++s) {
      const ScanSegment& seg = scan.segments[s];
      if (seg.level != level) continue;
      for (std::size_t i = 0; i + 1 < seg.values.size(); ++i) {
        const double v = detail::interval_variation(seg.results[i], seg.results[i + 1]);
        if (v > scan.threshold) flags.push_back({s, i, v});
      }
    }
    if (flags.empty()) {
      scan.stats.push_back(detail::level_stats({}, level + 1, scan.threshold));
      continue;
    }
    std::stable_sort(flags.begin(), flags.end(),
                     [](const Flag& a, const Flag& b) { return a.var > b.var; });
    if (flags.size() > cfg.max_flagged) flags.resize(cfg.max_flagged);
    std::stable_sort(flags.begin(), flags.end(), [](const Flag& a, const Flag& b) {
      return a.seg != b.seg ? a.seg < b.seg : a.interval < b.interval;
    });

    // New interior points of every flagged interval, evaluated in one sweep.
    std::vector<double> xs;
    for (const Flag& f : flags) {
      const ScanSegment& seg = scan.segments[f.seg];
      const double a = seg.values[f.interval], b = seg.values[f.interval + 1];
      for (int k = 1; k < cfg.zoom; ++k) xs.push_back(a + (b - a) * k / cfg.zoom);
    }
    const auto rs = detail::evaluate(scan.evaluate, xs, cfg.workers);

    std::size_t cursor = 0;
    std::vector<ScanSegment> children;
    for (const Flag& f : flags) {
      const ScanSegment& seg = scan.segments[f.seg];
      ScanSegment c;
      c.level = level + 1;
      c.parent_segment = f.seg;
      c.parent_interval = static_cast<long>(f.interval);
      c.values.push_back(seg.values[f.interval]);
      c.results.push_back(seg.results[f.interval]);
      for (int k = 1; k < cfg.zoom; ++k, ++cursor) {
        c.values.push_back(xs[cursor]);
        c.results.push_back(rs[cursor]);
      }
      c.values.push_back(seg.values[f.interval + 1]);
      c.results.push_back(seg.results[f.interval + 1]);
      children.push_back(std::move(c));
    }
    for (auto& c : children) scan.segments.push_back(std::move(c));
    std::vector<const ScanSegment*> at_level;
    for (const auto& s : scan.segments)
      if (s.level == level + 1) at_level.push_back(&s);
    scan.stats.push_back(detail::level_stats(at_level, level + 1, scan.threshold));
    scan.stats.back().refined = flags.size();
  }
  return scan;
}

enum class FractalVerdict { Fractal, Smooth, Inconclusive };

inline const char* to_string(FractalVerdict v) {
  switch (v) {
    case FractalVerdict::Fractal: return "fractal";
    case FractalVerdict::Smooth: return "smooth";
    case FractalVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct FractalReport {
  FractalVerdict verdict = FractalVerdict::Inconclusive;
  std::vector<LevelStats> levels;
  double branching = 0.0;      // geometric mean of flagged children per refined interval
  double mean_T_growth = 0.0;  // mean finite T at the deepest level over level 0
};

/// Singularities on a Cantor-like set keep spawning several flagged
/// sub-intervals per refined interval; an isolated jump spawns exactly one
/// and a smooth stretch none. The verdict is Fractal when the mean branching
/// ratio over the refinement levels reaches `min_branching`.
inline FractalReport fractal_signature(const ExitScan& scan, double min_branching = 1.5) {
  FractalReport r;
  r.levels = scan.stats;
  if (scan.stats.size() < 4) return r;  // level 0 plus at least three refinements
  double log_sum = 0;
  bool resolved = false;
  for (std::size_t l = 1; l < scan.stats.size(); ++l) {
    const auto& st = scan.stats[l];
    if (st.flagged == 0 || st.refined == 0) {
      resolved = true;
      break;
    }
    log_sum += std::log(static_cast<double>(st.flagged) / static_cast<double>(st.refined));
  }
  r.branching = resolved ? 0.0 : std::exp(log_sum / static_cast<double>(scan.stats.size() - 1));
  r.verdict = r.branching >= min_branching ? FractalVerdict::Fractal : FractalVerdict::Smooth;
  const double t0 = scan.stats.front().mean_T;
  r.mean_T_growth = t0 > 0 ? scan.stats.back().mean_T / t0 : 0.0;
  return r;
}

}  // namespace atomwave

#endif  // ATOMWAVE_SCATTERING_HPP
