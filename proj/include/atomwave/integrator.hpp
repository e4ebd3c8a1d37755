#ifndef ATOMWAVE_INTEGRATOR_HPP
#define ATOMWAVE_INTEGRATOR_HPP

// Adaptive Dormand-Prince 5(4) integration with dense output, a fixed-step
// classical RK4 alternative, and sign-change event detection with root
// polishing on the underlying one-step map.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "atomwave/error.hpp"
#include "atomwave/model.hpp"

namespace atomwave {

enum class Method { DormandPrince54, ClassicRK4 };

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0.5;          // step ceiling; the fixed step for ClassicRK4
  double max_tau = 1000.0;        // integrate over [0, max_tau]
  double sample_interval = 0.0;   // > 0: uniform grid, 0: every step, < 0: none
  double record_from = 0.0;       // samples before this time are dropped
  long max_steps = 200'000'000;
  Method method = Method::DormandPrince54;

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0))
      fail(ErrorKind::InvalidArgument, "IntegratorConfig: tolerances must be > 0");
    if (!(max_tau > 0)) fail(ErrorKind::InvalidArgument, "IntegratorConfig: max_tau must be > 0");
    if (!(max_step > 0)) fail(ErrorKind::InvalidArgument, "IntegratorConfig: max_step must be > 0");
  }
};

/// Raised when a step cannot be completed; carries the last good point.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double tau, std::vector<double> last)
      : Error(ErrorKind::Numerical, what), tau_(tau), last_(std::move(last)) {}
  double tau() const noexcept { return tau_; }
  const std::vector<double>& last_state() const noexcept { return last_; }

 private:
  double tau_;
  std::vector<double> last_;
};

// ---------------------------------------------------------------------------
// Systems

/// Reduced five-variable system, optionally forced by broadband noise on p.
struct ReducedSystem {
  using State = ReducedState;
  static constexpr std::size_t dim = 5;
  using Array = std::array<double, dim>;

  SystemParams prm;
  const NoiseForce* noise = nullptr;

  void operator()(double tau, const Array& y, Array& dy) const {
    const double c = std::cos(y[0]);
    const double s = std::sin(y[0]);
    const double g2 = prm.gamma_a / 2;
    dy[0] = prm.alpha * y[1];
    dy[1] = -y[2] * s;
    if (noise) dy[1] += (*noise)(tau);
    dy[2] = prm.delta * y[3] - g2 * y[2];
    dy[3] = -prm.delta * y[2] + 2 * prm.n * y[4] * c - g2 * y[3];
    dy[4] = -2 * y[3] * c - prm.gamma_a * (y[4] + 1);
  }
  static Array pack(const State& s) { return s.to_array(); }
  static State unpack(const Array& a) { return State::from_array(a); }
  static ReducedState reduced(const Array& a) { return State::from_array(a); }
};

/// Full seven-variable pumped-cavity system.
struct FullSystem {
  using State = FullState;
  static constexpr std::size_t dim = 7;
  using Array = std::array<double, dim>;

  SystemParams prm;

  void operator()(double tau, const Array& y, Array& dy) const {
    const FullState d = rhs_full(FullState::from_array(y), prm, tau);
    dy = d.to_array();
  }
  static Array pack(const State& s) { return s.to_array(); }
  static State unpack(const Array& a) { return State::from_array(a); }
  static ReducedState reduced(const Array& a) { return State::from_array(a).reduced(); }
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind { NodeCrossing, SectionU0, DetectorHit, Custom };
enum class Direction { Both, Rising, Falling };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::NodeCrossing: return "node";
    case EventKind::SectionU0: return "section_u0";
    case EventKind::DetectorHit: return "detector";
    case EventKind::Custom: return "custom";
  }
  return "unknown";
}

struct EventSpec {
  EventKind kind = EventKind::Custom;
  Direction direction = Direction::Both;
  double position = 0.0;  // DetectorHit only
  bool terminal = false;
  std::function<double(double, const ReducedState&)> function;  // Custom only

  /// cos(xi) = 0, either direction.
  static EventSpec node_crossing() { return {EventKind::NodeCrossing, Direction::Both, 0.0, false, {}}; }
  /// u = 0 with du/dtau > 0.
  static EventSpec section_u0() { return {EventKind::SectionU0, Direction::Rising, 0.0, false, {}}; }
  /// xi reaches `xi_detector`; stops the integration by default.
  static EventSpec detector(double xi_detector, bool stop = true) {
    return {EventKind::DetectorHit, Direction::Both, xi_detector, stop, {}};
  }
  static EventSpec custom(std::function<double(double, const ReducedState&)> f,
                          Direction dir = Direction::Both, bool stop = false) {
    return {EventKind::Custom, dir, 0.0, stop, std::move(f)};
  }

  double value(double tau, const ReducedState& s) const {
    switch (kind) {
      case EventKind::NodeCrossing: return std::cos(s.xi);
      case EventKind::SectionU0: return s.u;
      case EventKind::DetectorHit: return s.xi - position;
      case EventKind::Custom: return function(tau, s);
    }
    return 0.0;
  }
};

struct Event {
  EventKind kind;
  std::size_t spec_index;
  double tau;
  ReducedState state;
  int direction;  // +1 rising, -1 falling
};

template <class State>
struct BasicTrajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Event> events;
  double final_tau = 0.0;
  State final_state{};
  bool stopped_by_event = false;
  long steps = 0;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

using Trajectory = BasicTrajectory<ReducedState>;

// ---------------------------------------------------------------------------
// Stepper

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Single-trajectory stepper. After each step() the interval [t_prev(), t()]
/// carries a dense interpolant and an exact restart map step_from_prev().
template <class System>
class Stepper {
 public:
  static constexpr std::size_t N = System::dim;
  using Array = std::array<double, N>;

  Stepper(System sys, const Array& y0, double t0, const IntegratorConfig& cfg)
      : sys_(std::move(sys)), cfg_(cfg) {
    cfg_.validate();
    reset(y0, t0);
  }

  void reset(const Array& y, double t) {
    check_finite(y, t);
    y_ = y;
    t_ = t;
    y_prev_ = y;
    t_prev_ = t;
    sys_(t_, y_, k1_);
    if (cfg_.method == Method::ClassicRK4) {
      h_ = cfg_.max_step;
    } else if (h_ <= 0) {
      h_ = initial_step();
    }
    facold_ = 1e-4;
  }

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const Array& y() const { return y_; }
  const Array& y_prev() const { return y_prev_; }
  const System& system() const { return sys_; }
  long steps() const { return steps_; }

  /// One accepted step, not passing t_limit.
  void step(double t_limit = std::numeric_limits<double>::infinity()) {
    if (cfg_.method == Method::ClassicRK4)
      step_rk4(t_limit);
    else
      step_dopri(t_limit);
    ++steps_;
  }

  void advance_to(double t_end) {
    while (t_ < t_end) step(t_end);
  }

  /// Dense-output state at t in [t_prev, t].
  Array dense(double t) const {
    const double h = t_ - t_prev_;
    if (h == 0) return y_;
    const double th = (t - t_prev_) / h;
    Array out;
    if (cfg_.method == Method::ClassicRK4) {
      // Cubic Hermite on end values and slopes.
      const double th2 = th * th, th3 = th2 * th;
      const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
      const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
      for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * y_prev_[i] + h10 * h * kprev_[i] + h01 * y_[i] + h11 * h * k1_[i];
      return out;
    }
    const double th1 = 1 - th;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
    return out;
  }

  /// Exact one-step map from (t_prev, y_prev) over a step of size s <= t - t_prev.
  Array step_from_prev(double s) const {
    if (s == 0) return y_prev_;
    if (cfg_.method == Method::ClassicRK4) return rk4_map(t_prev_, y_prev_, kprev_, s);
    Array y1, err;
    std::array<Array, 7> k;
    k[0] = kprev_;
    dopri_stages(t_prev_, y_prev_, s, k, y1, err);
    return y1;
  }

 private:
  static void check_finite(const Array& y, double t) {
    for (double c : y)
      if (!std::isfinite(c)) {
        std::ostringstream os;
        os << "non-finite state at tau=" << t;
        throw IntegrationError(os.str(), t, std::vector<double>(y.begin(), y.end()));
      }
  }

  double initial_step() const {
    Array f0 = k1_;
    double dnf = 0, dny = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
      dnf += (f0[i] / sk) * (f0[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, cfg_.max_step);
    Array y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h * f0[i];
    sys_(t_ + h, y1, f1);
    double der2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
      der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 5);
    return std::min({100 * h, h1, cfg_.max_step});
  }

  void dopri_stages(double t, const Array& y, double h, std::array<Array, 7>& k, Array& y1,
                    Array& err) const {
    using T = detail::DopriTableau;
    Array tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * T::a21 * k[0][i];
    sys_(t + T::c2 * h, tmp, k[1]);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T::a31 * k[0][i] + T::a32 * k[1][i]);
    sys_(t + T::c3 * h, tmp, k[2]);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (T::a41 * k[0][i] + T::a42 * k[1][i] + T::a43 * k[2][i]);
    sys_(t + T::c4 * h, tmp, k[3]);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (T::a51 * k[0][i] + T::a52 * k[1][i] + T::a53 * k[2][i] +
                           T::a54 * k[3][i]);
    sys_(t + T::c5 * h, tmp, k[4]);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (T::a61 * k[0][i] + T::a62 * k[1][i] + T::a63 * k[2][i] +
                           T::a64 * k[3][i] + T::a65 * k[4][i]);
    sys_(t + h, tmp, k[5]);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (T::a71 * k[0][i] + T::a73 * k[2][i] + T::a74 * k[3][i] +
                          T::a75 * k[4][i] + T::a76 * k[5][i]);
    sys_(t + h, y1, k[6]);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (T::e1 * k[0][i] + T::e3 * k[2][i] + T::e4 * k[3][i] + T::e5 * k[4][i] +
                    T::e6 * k[5][i] + T::e7 * k[6][i]);
  }

  void step_dopri(double t_limit) {
    using T = detail::DopriTableau;
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    bool last_rejected = false;
    for (;;) {
      double h = std::min(h_, cfg_.max_step);
      bool clipped = false;
      if (t_ + h >= t_limit) {
        h = t_limit - t_;
        clipped = true;
      }
      if (h <= 1e-14 * std::max(1.0, std::abs(t_))) {
        std::ostringstream os;
        os << "step size underflow at tau=" << t_;
        throw IntegrationError(os.str(), t_, std::vector<double>(y_.begin(), y_.end()));
      }
      std::array<Array, 7> k;
      k[0] = k1_;
      Array y1, err;
      dopri_stages(t_, y_, h, k, y1, err);
      double e2 = 0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(y1[i])) finite = false;
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        e2 += (err[i] / sk) * (err[i] / sk);
      }
      double e = finite ? std::sqrt(e2 / N) : std::numeric_limits<double>::infinity();
      if (!std::isfinite(e)) {
        h_ = h * 0.1;
        last_rejected = true;
        continue;
      }
      const double fac11 = std::pow(e, expo1);
      if (e <= 1.0) {
        double fac = fac11 / std::pow(facold_, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;
        if (last_rejected) hnew = std::min(hnew, h);
        facold_ = std::max(e, 1e-4);
        // dense-output coefficients
        for (std::size_t i = 0; i < N; ++i) {
          r1_[i] = y_[i];
          const double dy = y1[i] - y_[i];
          r2_[i] = dy;
          const double bspl = h * k[0][i] - dy;
          r3_[i] = bspl;
          r4_[i] = dy - h * k[6][i] - bspl;
          r5_[i] = h * (T::d1 * k[0][i] + T::d3 * k[2][i] + T::d4 * k[3][i] + T::d5 * k[4][i] +
                        T::d6 * k[5][i] + T::d7 * k[6][i]);
        }
        y_prev_ = y_;
        t_prev_ = t_;
        kprev_ = k[0];
        y_ = y1;
        t_ = clipped ? t_limit : t_ + h;
        k1_ = k[6];
        if (!clipped) h_ = hnew;
        return;
      }
      h_ = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
    }
  }

  Array rk4_map(double t, const Array& y, const Array& f0, double h) const {
    Array k2, k3, k4, tmp, out;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * f0[i];
    sys_(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys_(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    sys_(t + h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      out[i] = y[i] + h / 6 * (f0[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
  }

  void step_rk4(double t_limit) {
    double h = cfg_.max_step;
    bool clipped = false;
    if (t_ + h >= t_limit) {
      h = t_limit - t_;
      clipped = true;
    }
    Array y1 = rk4_map(t_, y_, k1_, h);
    check_finite(y1, t_ + h);
    y_prev_ = y_;
    t_prev_ = t_;
    kprev_ = k1_;
    y_ = y1;
    t_ = clipped ? t_limit : t_ + h;
    sys_(t_, y_, k1_);
  }

  System sys_;
  IntegratorConfig cfg_;
  Array y_{}, y_prev_{}, k1_{}, kprev_{};
  Array r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
  double t_ = 0, t_prev_ = 0, h_ = 0, facold_ = 1e-4;
  long steps_ = 0;
};

// ---------------------------------------------------------------------------
// Driver

namespace detail {

inline bool direction_ok(Direction d, int dir) {
  return d == Direction::Both || (d == Direction::Rising && dir > 0) ||
         (d == Direction::Falling && dir < 0);
}

/// Root of the event function on the last step, polished on the one-step map.
template <class System>
std::pair<double, typename Stepper<System>::Array> locate_event(
    const Stepper<System>& st, const EventSpec& spec, double g0, double g1) {
  using Array = typename Stepper<System>::Array;
  const double t0 = st.t_prev();
  const double h = st.t() - t0;
  auto eval = [&](double s, Array& y) {
    y = st.step_from_prev(s);
    return spec.value(t0 + s, System::reduced(y));
  };
  if (g1 == 0.0) return {st.t(), st.y()};
  // Illinois false position on [a, b] in step-local time.
  double a = 0, b = h, fa = g0, fb = g1;
  Array ya = st.y_prev(), yb = st.y(), ym;
  int side = 0;
  for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(t0)); ++it) {
    double m = (a * fb - b * fa) / (fb - fa);
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    const double fm = eval(m, ym);
    if (fm == 0.0) return {t0 + m, ym};
    if ((fm > 0) == (fb > 0)) {
      b = m;
      fb = fm;
      yb = ym;
      if (side == -1) fa /= 2;
      side = -1;
    } else {
      a = m;
      fa = fm;
      ya = ym;
      if (side == 1) fb /= 2;
      side = 1;
    }
  }
  // Earlier endpoint on ties; otherwise the one closer to zero.
  const double va = spec.value(t0 + a, System::reduced(ya));
  const double vb = spec.value(t0 + b, System::reduced(yb));
  if (std::abs(va) <= std::abs(vb)) return {t0 + a, ya};
  return {t0 + b, yb};
}

}  // namespace detail

/// Integrates `sys` from s0 over [0, cfg.max_tau] (or [t0, t0 + max_tau]).
template <class System>
BasicTrajectory<typename System::State> integrate_system(
    const System& sys, const typename System::State& s0, const IntegratorConfig& cfg,
    const std::vector<EventSpec>& events = {}, double t0 = 0.0) {
  using State = typename System::State;
  using Array = typename Stepper<System>::Array;
  cfg.validate();
  const Array y0 = System::pack(s0);
  for (double c : y0)
    if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "integrate: non-finite initial state");

  BasicTrajectory<State> tr;
  Stepper<System> st(sys, y0, t0, cfg);
  const double t_end = t0 + cfg.max_tau;

  std::vector<double> g(events.size());
  for (std::size_t i = 0; i < events.size(); ++i)
    g[i] = events[i].value(t0, System::reduced(y0));

  const bool uniform = cfg.sample_interval > 0;
  const bool every_step = cfg.sample_interval == 0;
  const double sample_origin = std::max(t0, cfg.record_from);
  long sample_index = 0;
  auto record = [&](double t, const Array& y) {
    tr.times.push_back(t);
    tr.states.push_back(System::unpack(y));
  };
  if (every_step && t0 >= cfg.record_from) record(t0, y0);

  double stop_at = t_end;
  Array stop_state{};
  bool stopped = false;
  while (st.t() < t_end && !stopped) {
    if (st.steps() >= cfg.max_steps)
      throw IntegrationError("max_steps exceeded", st.t(),
                             std::vector<double>(st.y().begin(), st.y().end()));
    st.step(t_end);
    const ReducedState r1 = System::reduced(st.y());

    // Events in this step, sorted by time.
    std::vector<Event> found;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double g1 = events[i].value(st.t(), r1);
      const double g0 = g[i];
      g[i] = g1;
      if (g0 == 0.0) continue;
      const bool crossed = (g0 < 0 && g1 >= 0) || (g0 > 0 && g1 <= 0);
      if (!crossed) continue;
      const int dir = g0 < 0 ? 1 : -1;
      if (!detail::direction_ok(events[i].direction, dir)) continue;
      auto [te, ye] = detail::locate_event(st, events[i], g0, g1);
      found.push_back({events[i].kind, i, te, System::reduced(ye), dir});
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const Event& a, const Event& b) { return a.tau < b.tau; });
    for (const Event& ev : found) {
      tr.events.push_back(ev);
      if (events[ev.spec_index].terminal) {
        stopped = true;
        stop_at = ev.tau;
        stop_state = st.step_from_prev(ev.tau - st.t_prev());
        break;
      }
    }

    const double seg_end = stopped ? stop_at : st.t();
    if (uniform) {
      while (true) {
        const double ts = sample_origin + sample_index * cfg.sample_interval;
        if (ts > seg_end) break;
        if (ts >= st.t_prev()) record(ts, st.dense(ts));
        ++sample_index;
      }
    } else if (every_step && seg_end >= cfg.record_from) {
      record(seg_end, stopped ? stop_state : st.y());
    }
  }
  tr.stopped_by_event = stopped;
  tr.final_tau = stopped ? stop_at : st.t();
  tr.final_state = System::unpack(stopped ? stop_state : st.y());
  tr.steps = st.steps();
  return tr;
}

/// Integrates the reduced system, with optional noise on the momentum equation.
inline Trajectory integrate(const ReducedState& s0, const SystemParams& prm,
                            const IntegratorConfig& cfg, const std::vector<EventSpec>& events = {},
                            const std::optional<NoiseSpec>& noise = std::nullopt) {
  prm.validate();
  std::optional<NoiseForce> nf;
  if (noise) nf.emplace(*noise);
  ReducedSystem sys{prm, nf ? &*nf : nullptr};
  return integrate_system(sys, s0, cfg, events);
}

inline BasicTrajectory<FullState> integrate_full(const FullState& s0, const SystemParams& prm,
                                                 const IntegratorConfig& cfg,
                                                 const std::vector<EventSpec>& events = {}) {
  prm.validate();
  return integrate_system(FullSystem{prm}, s0, cfg, events);
}

/// Event states of the given kind, filtered by the EventSpec direction; for the
/// bifurcation observable pass negative_v_only to keep v < 0.
inline std::vector<ReducedState> section_points(const Trajectory& tr, const EventSpec& spec,
                                                bool negative_v_only = false) {
  std::vector<ReducedState> out;
  for (const Event& ev : tr.events) {
    if (ev.kind != spec.kind) continue;
    if (!detail::direction_ok(spec.direction, ev.direction)) continue;
    if (negative_v_only && !(ev.state.v < 0)) continue;
    out.push_back(ev.state);
  }
  return out;
}

}  // namespace atomwave

#endif  // ATOMWAVE_INTEGRATOR_HPP
