#ifndef ATOMWAVE_CHAOS_HPP
#define ATOMWAVE_CHAOS_HPP

// Maximal Lyapunov exponent (Benettin renormalisation) and box-counting
// dimension of sampled attractors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

enum class LyapunovMethod { Tangent, TwoTrajectory };

struct LyapunovConfig {
  double transient = 2000.0;
  double horizon = 5.0e4;
  double renorm_interval = 1.0;
  double d0 = 1e-8;  // initial separation, TwoTrajectory only
  int blocks = 20;
  LyapunovMethod method = LyapunovMethod::Tangent;
  IntegratorConfig integrator{};
  std::optional<NoiseSpec> noise;

  void validate() const {
    if (!(renorm_interval > 0)) fail(ErrorKind::InvalidArgument, "renorm_interval must be > 0");
    if (horizon < 100 * renorm_interval)
      fail(ErrorKind::InvalidArgument, "Lyapunov horizon must be >= 100 renormalisation intervals");
    if (transient < 0) fail(ErrorKind::InvalidArgument, "transient must be >= 0");
    if (blocks < 2) fail(ErrorKind::InvalidArgument, "need at least 2 blocks");
    if (!(d0 > 0)) fail(ErrorKind::InvalidArgument, "d0 must be > 0");
  }
};

struct LyapunovEstimate {
  double lambda = 0.0;
  double stderr_ = 0.0;
  double horizon = 0.0;
  double renorm_interval = 0.0;
  ReducedState final_state{};
};

/// Weights of the separation metric. Position enters directly (it is the
/// small-angle limit of the (cos xi, sin xi) embedding), momentum through the
/// Doppler frequency alpha*p, dipole quadratures relative to sqrt(n).
struct SeparationMetric {
  std::array<double, 5> w{1, 1, 1, 1, 1};

  static SeparationMetric for_params(const SystemParams& prm) {
    const double q = 1.0 / std::sqrt(std::max(prm.n, 1.0));
    return {{1.0, prm.alpha, q, q, 1.0}};
  }
  double norm(const std::array<double, 5>& d) const {
    double s = 0;
    for (int i = 0; i < 5; ++i) s += (w[i] * d[i]) * (w[i] * d[i]);
    return std::sqrt(s);
  }
};

namespace detail {

/// Reduced system together with its linearisation along the trajectory.
struct TangentSystem {
  using State = std::array<double, 10>;
  static constexpr std::size_t dim = 10;
  using Array = State;

  SystemParams prm;
  const NoiseForce* noise = nullptr;

  void operator()(double tau, const Array& y, Array& dy) const {
    const double c = std::cos(y[0]), s = std::sin(y[0]);
    const double g2 = prm.gamma_a / 2;
    const double p = y[1], u = y[2], v = y[3], z = y[4];
    dy[0] = prm.alpha * p;
    dy[1] = -u * s + (noise ? (*noise)(tau) : 0.0);
    dy[2] = prm.delta * v - g2 * u;
    dy[3] = -prm.delta * u + 2 * prm.n * z * c - g2 * v;
    dy[4] = -2 * v * c - prm.gamma_a * (z + 1);
    const double dxi = y[5], dp = y[6], du = y[7], dv = y[8], dz = y[9];
    dy[5] = prm.alpha * dp;
    dy[6] = -du * s - u * c * dxi;
    dy[7] = prm.delta * dv - g2 * du;
    dy[8] = -prm.delta * du + 2 * prm.n * (c * dz - z * s * dxi) - g2 * dv;
    dy[9] = -2 * c * dv + 2 * v * s * dxi - prm.gamma_a * dz;
  }
  static Array pack(const State& s) { return s; }
  static State unpack(const Array& a) { return a; }
  static ReducedState reduced(const Array& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
};

/// Two copies of the reduced system advanced on one step sequence.
struct PairSystem {
  using State = std::array<double, 10>;
  static constexpr std::size_t dim = 10;
  using Array = State;

  ReducedSystem base;

  void operator()(double tau, const Array& y, Array& dy) const {
    std::array<double, 5> a{y[0], y[1], y[2], y[3], y[4]}, b{y[5], y[6], y[7], y[8], y[9]};
    std::array<double, 5> da, db;
    base(tau, a, da);
    base(tau, b, db);
    for (int i = 0; i < 5; ++i) {
      dy[i] = da[i];
      dy[5 + i] = db[i];
    }
  }
  static Array pack(const State& s) { return s; }
  static State unpack(const Array& a) { return a; }
  static ReducedState reduced(const Array& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
};

inline void block_statistics(const std::vector<double>& rates, int blocks, double& mean,
                             double& spread) {
  const std::size_t k = rates.size();
  mean = 0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(k);
  const std::size_t bl = k / blocks;
  std::vector<double> bm;
  for (int b = 0; b < blocks; ++b) {
    double s = 0;
    for (std::size_t i = b * bl; i < (b + 1) * bl; ++i) s += rates[i];
    bm.push_back(s / static_cast<double>(bl));
  }
  double bmean = 0;
  for (double x : bm) bmean += x;
  bmean /= blocks;
  double var = 0;
  for (double x : bm) var += (x - bmean) * (x - bmean);
  var /= (blocks - 1);
  // Statistical error of the block means combined with the drift between the
  // late half and the whole run (finite-time bias).
  double late = 0;
  for (int b = blocks / 2; b < blocks; ++b) late += bm[b];
  late /= (blocks - blocks / 2);
  spread = std::sqrt(var / blocks + (late - mean) * (late - mean));
}

}  // namespace detail

/// Largest Lyapunov exponent of the reduced system started at s0.
inline LyapunovEstimate max_lyapunov(const SystemParams& prm, const ReducedState& s0,
                                     const LyapunovConfig& cfg) {
  prm.validate();
  cfg.validate();
  std::optional<NoiseForce> nf;
  if (cfg.noise) nf.emplace(*cfg.noise);
  const NoiseForce* noise = nf ? &*nf : nullptr;

  // Transient on the plain system.
  ReducedState start = s0;
  IntegratorConfig icfg = cfg.integrator;
  icfg.sample_interval = -1;
  if (cfg.transient > 0) {
    icfg.max_tau = cfg.transient;
    start = integrate_system(ReducedSystem{prm, noise}, s0, icfg).final_state;
  }

  const SeparationMetric metric = SeparationMetric::for_params(prm);
  const long k_total = static_cast<long>(std::llround(cfg.horizon / cfg.renorm_interval));
  std::vector<double> rates;
  rates.reserve(k_total);
  const double t0 = cfg.transient;
  LyapunovEstimate out;

  auto check = [](const std::array<double, 10>& y) {
    for (double c : y)
      if (!std::isfinite(c)) fail(ErrorKind::Numerical, "max_lyapunov: trajectory escaped");
  };

  if (cfg.method == LyapunovMethod::Tangent) {
    std::array<double, 10> y{start.xi, start.p, start.u, start.v, start.z, 0, 0, 0, 0, 0};
    y[5] = 1.0 / metric.w[0];
    Stepper<detail::TangentSystem> st(detail::TangentSystem{prm, noise}, y, t0, icfg);
    for (long k = 1; k <= k_total; ++k) {
      st.advance_to(t0 + k * cfg.renorm_interval);
      std::array<double, 10> cur = st.y();
      check(cur);
      std::array<double, 5> d{cur[5], cur[6], cur[7], cur[8], cur[9]};
      const double nd = metric.norm(d);
      if (!(nd > 0)) fail(ErrorKind::Numerical, "max_lyapunov: tangent vector collapsed");
      rates.push_back(std::log(nd) / cfg.renorm_interval);
      for (int i = 0; i < 5; ++i) cur[5 + i] = d[i] / nd;
      st.reset(cur, st.t());
    }
    const auto& f = st.y();
    out.final_state = {f[0], f[1], f[2], f[3], f[4]};
  } else {
    std::array<double, 10> y{start.xi, start.p, start.u, start.v, start.z,
                             start.xi + cfg.d0 / metric.w[0], start.p, start.u, start.v, start.z};
    Stepper<detail::PairSystem> st(detail::PairSystem{ReducedSystem{prm, noise}}, y, t0, icfg);
    for (long k = 1; k <= k_total; ++k) {
      st.advance_to(t0 + k * cfg.renorm_interval);
      std::array<double, 10> cur = st.y();
      check(cur);
      std::array<double, 5> d;
      for (int i = 0; i < 5; ++i) d[i] = cur[5 + i] - cur[i];
      const double nd = metric.norm(d);
      if (!(nd > 0)) fail(ErrorKind::Numerical, "max_lyapunov: trajectories coincide");
      rates.push_back(std::log(nd / cfg.d0) / cfg.renorm_interval);
      for (int i = 0; i < 5; ++i) cur[5 + i] = cur[i] + d[i] * (cfg.d0 / nd);
      st.reset(cur, st.t());
    }
    const auto& f = st.y();
    out.final_state = {f[0], f[1], f[2], f[3], f[4]};
  }
  detail::block_statistics(rates, cfg.blocks, out.lambda, out.stderr_);
  out.horizon = k_total * cfg.renorm_interval;
  out.renorm_interval = cfg.renorm_interval;
  return out;
}

// ---------------------------------------------------------------------------
// Box counting

struct DimensionEstimate {
  double dimension = 0.0;
  double r2 = 1.0;
  int window_first = 0;  // dyadic level k of the first scale, eps = 2^-k
  int window_last = 0;
  std::vector<int> levels;
  std::vector<double> counts;  // occupied boxes per level
};

struct BoxCountConfig {
  int min_level = 1;
  int max_level = 12;
  int min_window = 3;             // scales in the fitted window
  double saturation_fraction = 0.1;  // drop levels with N > fraction * points
  std::size_t min_points = 100000;
};

/// Occupied-box count per dyadic level for points normalised to the unit cube.
inline std::vector<double> box_counts(const std::vector<std::vector<double>>& points,
                                      const std::vector<int>& levels) {
  if (points.empty()) return std::vector<double>(levels.size(), 0.0);
  const std::size_t dim = points.front().size();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity()),
      hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& p : points)
    for (std::size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  // Each axis is mapped onto [0, 1]; the dimension is invariant under this.
  std::vector<double> span(dim);
  for (std::size_t j = 0; j < dim; ++j) span[j] = hi[j] - lo[j];
  std::vector<double> out;
  for (int level : levels) {
    const double cells = std::ldexp(1.0, level);
    std::unordered_set<std::uint64_t> occupied;
    occupied.reserve(points.size());
    // Exact bit-packed box keys when they fit in 64 bits, hashed otherwise.
    const bool packed = static_cast<std::size_t>(level) * dim <= 64;
    for (const auto& p : points) {
      std::uint64_t key = packed ? 0 : 1469598103934665603ULL;
      for (std::size_t j = 0; j < dim; ++j) {
        double x = span[j] > 0 ? (p[j] - lo[j]) / span[j] : 0.0;
        auto idx = static_cast<std::uint64_t>(std::min(cells - 1, std::floor(x * cells)));
        if (packed) {
          key = (key << level) | idx;
        } else {
          key ^= idx + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2);
          key *= 1099511628211ULL;
        }
      }
      occupied.insert(key);
    }
    out.push_back(static_cast<double>(occupied.size()));
  }
  return out;
}

/// Slope of log N(eps) against log(1/eps) over the best linear window.
inline DimensionEstimate box_counting_dimension(const std::vector<std::vector<double>>& points,
                                                const BoxCountConfig& cfg = {}) {
  if (points.size() < cfg.min_points)
    fail(ErrorKind::InvalidArgument, "box_counting_dimension: too few points");
  DimensionEstimate est;
  for (int k = cfg.min_level; k <= cfg.max_level; ++k) est.levels.push_back(k);
  if (est.levels.size() < 5) fail(ErrorKind::InvalidArgument, "need at least 5 dyadic scales");
  est.counts = box_counts(points, est.levels);

  const double cap = cfg.saturation_fraction * static_cast<double>(points.size());
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < est.levels.size(); ++i)
    if (est.counts[i] <= cap) usable.push_back(i);
  if (static_cast<int>(usable.size()) < cfg.min_window)
    fail(ErrorKind::Degenerate, "box_counting_dimension: insufficient scaling window");

  // If every usable level sees the same count the set is a point.
  bool constant = true;
  for (std::size_t i : usable) constant = constant && est.counts[i] == est.counts[usable[0]];
  if (constant) {
    est.dimension = 0.0;
    est.r2 = 1.0;
    est.window_first = est.levels[usable.front()];
    est.window_last = est.levels[usable.back()];
    return est;
  }

  double best_r2 = -1, best_slope = 0;
  std::size_t best_a = 0, best_b = 0;
  for (std::size_t a = 0; a < usable.size(); ++a) {
    for (std::size_t b = a + cfg.min_window - 1; b < usable.size(); ++b) {
      // consecutive levels only
      if (usable[b] - usable[a] != b - a) continue;
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      const double m = static_cast<double>(b - a + 1);
      for (std::size_t i = a; i <= b; ++i) {
        const double x = est.levels[usable[i]] * std::log(2.0);
        const double y = std::log(est.counts[usable[i]]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
      }
      const double vx = sxx - sx * sx / m, vy = syy - sy * sy / m, cxy = sxy - sx * sy / m;
      const double slope = cxy / vx;
      const double r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
      // prefer higher R^2; among near-ties the longer window
      if (r2 > best_r2 + 1e-4 || (std::abs(r2 - best_r2) <= 1e-4 && b - a > best_b - best_a)) {
        best_r2 = r2;
        best_slope = slope;
        best_a = a;
        best_b = b;
      }
    }
  }
  est.dimension = best_slope;
  est.r2 = best_r2;
  est.window_first = est.levels[usable[best_a]];
  est.window_last = est.levels[usable[best_b]];
  return est;
}

/// Embedding (u, v, z, p, cos xi, sin xi) used for attractor dimensions.
inline std::vector<std::vector<double>> attractor_embedding(const std::vector<ReducedState>& states) {
  std::vector<std::vector<double>> out;
  out.reserve(states.size());
  for (const auto& s : states)
    out.push_back({s.u, s.v, s.z, s.p, std::cos(s.xi), std::sin(s.xi)});
  return out;
}

// ---------------------------------------------------------------------------
// Lyapunov map over (n, delta)

struct LyapunovMap {
  std::vector<double> n_values;
  std::vector<double> delta_values;
  std::vector<LyapunovEstimate> cells;  // row-major, n outer, delta inner
  std::vector<std::string> errors;      // per cell, empty when fine

  const LyapunovEstimate& at(std::size_t i_n, std::size_t i_delta) const {
    return cells[i_n * delta_values.size() + i_delta];
  }
};

/// Failed cells carry NaN estimates and a diagnostic in `errors`.
inline LyapunovMap lyapunov_map(const SystemParams& base, const std::vector<double>& n_values,
                                const std::vector<double>& delta_values, const ReducedState& s0,
                                const LyapunovConfig& cfg = {}, int workers = 1) {
  cfg.validate();
  LyapunovMap map;
  map.n_values = n_values;
  map.delta_values = delta_values;
  const std::size_t cols = delta_values.size();
  const auto res = run_sweep<LyapunovEstimate>(n_values.size() * cols, workers, [&](std::size_t i) {
    SystemParams prm = base;
    prm.n = n_values[i / cols];
    prm.delta = delta_values[i % cols];
    return max_lyapunov(prm, s0, cfg);
  });
  for (const auto& c : res) {
    LyapunovEstimate e;
    e.lambda = e.stderr_ = std::numeric_limits<double>::quiet_NaN();
    map.cells.push_back(c.ok() ? *c.value : e);
    map.errors.push_back(c.error);
  }
  return map;
}

}  // namespace atomwave

#endif  // ATOMWAVE_CHAOS_HPP
