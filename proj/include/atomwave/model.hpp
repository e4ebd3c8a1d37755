#ifndef ATOMWAVE_MODEL_HPP
#define ATOMWAVE_MODEL_HPP

// Semiclassical two-level atom in a standing wave: parameters, state types,
// right-hand sides of the full pumped-cavity and reduced equations, the
// closed-form adiabatic and period-1 formulas, and the broadband noise force.
//
// Units: time in 1/Omega_0, position in 1/k_f, momentum in hbar*k_f.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "atomwave/error.hpp"

namespace atomwave {

inline constexpr double kPi = std::numbers::pi;

/// Control constants, all in units of Omega_0. The first four drive the
/// reduced system; the rest matter only for the full pumped-cavity system.
struct SystemParams {
  double alpha = 0.01;    // recoil frequency
  double delta = 24.0;    // atom-field detuning
  double n = 3000.0;      // mean photon number
  double gamma_a = 0.3;   // spontaneous decay rate
  double gamma_f = 0.0;   // cavity decay (full system)
  double Delta = 0.0;     // cavity-laser detuning (full system)
  double E = 0.0;         // pump amplitude epsilon/Omega_0 (full system)
  double phi = kPi / 4;   // pump phase (full system)

  void validate() const {
    const std::array<double, 8> all{alpha, delta, n, gamma_a, gamma_f, Delta, E, phi};
    for (double x : all)
      if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "SystemParams: non-finite field");
    if (!(alpha > 0)) fail(ErrorKind::InvalidArgument, "SystemParams: alpha must be > 0");
    if (n < 0) fail(ErrorKind::InvalidArgument, "SystemParams: n must be >= 0");
    if (gamma_a < 0) fail(ErrorKind::InvalidArgument, "SystemParams: gamma_a must be >= 0");
    if (gamma_f < 0) fail(ErrorKind::InvalidArgument, "SystemParams: gamma_f must be >= 0");
  }

  /// Saturated photon number of the pumped mode, (E / 2 gamma_f)^2.
  double saturation_photons() const {
    if (gamma_f <= 0) return 0.0;
    const double r = E / (2 * gamma_f);
    return r * r;
  }

  /// True when the full-system block reduces to the five-variable system:
  /// laser on cavity resonance and n equal to the saturation number.
  bool reduces_to_reduced(double rel_tol = 1e-9) const {
    if (Delta != 0.0 || gamma_f <= 0) return false;
    const double ns = saturation_photons();
    return std::abs(ns - n) <= rel_tol * std::max(1.0, n);
  }

  /// Full-system parameters whose steady pumped field has n photons.
  static SystemParams pumped(double alpha, double delta, double n, double gamma_a,
                             double gamma_f, double phi = kPi / 4) {
    SystemParams p{alpha, delta, n, gamma_a, gamma_f, 0.0, 2 * gamma_f * std::sqrt(n), phi};
    return p;
  }
};

/// Phase point of the reduced system.
struct ReducedState {
  double xi = 0.0;  // position
  double p = 0.0;   // momentum
  double u = 0.0;   // in-phase dipole quadrature
  double v = 0.0;   // out-of-phase dipole quadrature
  double z = -1.0;  // population inversion

  static constexpr std::size_t dim = 5;
  using Array = std::array<double, dim>;

  Array to_array() const { return {xi, p, u, v, z}; }
  static ReducedState from_array(const Array& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

  bool finite() const {
    return std::isfinite(xi) && std::isfinite(p) && std::isfinite(u) && std::isfinite(v) &&
           std::isfinite(z);
  }

  /// Ground-state atom at the antinode xi = 0 moving with momentum p0.
  static ReducedState ground(double p0, double xi0 = 0.0) { return {xi0, p0, 0.0, 0.0, -1.0}; }

  friend bool operator==(const ReducedState&, const ReducedState&) = default;
};

/// Phase point of the full pumped-cavity system.
struct FullState {
  double xi = 0.0;
  double p = 0.0;
  double e = 0.0;  // field quadratures
  double g = 0.0;
  double x = 0.0;  // dipole components
  double y = 0.0;
  double z = -1.0;

  static constexpr std::size_t dim = 7;
  using Array = std::array<double, dim>;

  Array to_array() const { return {xi, p, e, g, x, y, z}; }
  static FullState from_array(const Array& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }

  bool finite() const {
    for (double c : to_array())
      if (!std::isfinite(c)) return false;
    return true;
  }

  double photon_number() const { return (e * e + g * g) / 4; }

  /// Projection onto the reduced variables: u = (ex - gy)/2, v = (gx + ey)/2.
  ReducedState reduced() const {
    return {xi, p, (e * x - g * y) / 2, (g * x + e * y) / 2, z};
  }

  /// Inverse of reduced() for a given steady field (e, g) with e^2 + g^2 > 0.
  static FullState lift(const ReducedState& s, double e, double g) {
    const double m = (e * e + g * g) / 2;
    if (!(m > 0)) fail(ErrorKind::Degenerate, "FullState::lift: zero field");
    // Solve e x - g y = 2u, g x + e y = 2v.
    const double x = (e * s.u + g * s.v) / m;
    const double y = (e * s.v - g * s.u) / m;
    return {s.xi, s.p, e, g, x, y, s.z};
  }

  /// Steady pumped field for prm: e = E sin(phi)/gamma_f, g = -E cos(phi)/gamma_f.
  static std::array<double, 2> steady_field(const SystemParams& prm) {
    if (!(prm.gamma_f > 0)) fail(ErrorKind::InvalidArgument, "steady_field: gamma_f must be > 0");
    return {prm.E * std::sin(prm.phi) / prm.gamma_f, -prm.E * std::cos(prm.phi) / prm.gamma_f};
  }
};

// ---------------------------------------------------------------------------
// Right-hand sides

inline ReducedState rhs_reduced(const ReducedState& s, const SystemParams& prm) {
  if (!s.finite()) fail(ErrorKind::InvalidArgument, "rhs_reduced: non-finite state");
  const double c = std::cos(s.xi);
  const double sn = std::sin(s.xi);
  const double g2 = prm.gamma_a / 2;
  return {prm.alpha * s.p,
          -s.u * sn,
          prm.delta * s.v - g2 * s.u,
          -prm.delta * s.u + 2 * prm.n * s.z * c - g2 * s.v,
          -2 * s.v * c - prm.gamma_a * (s.z + 1)};
}

inline FullState rhs_full(const FullState& s, const SystemParams& prm, double tau) {
  if (!s.finite() || !std::isfinite(tau))
    fail(ErrorKind::InvalidArgument, "rhs_full: non-finite input");
  const double c = std::cos(s.xi);
  const double sn = std::sin(s.xi);
  const double ph = prm.Delta * tau + prm.phi;
  const double ga2 = prm.gamma_a / 2;
  return {prm.alpha * s.p,
          0.5 * (s.g * s.y - s.e * s.x) * sn,
          s.y * c - 2 * prm.gamma_f * s.e + 2 * prm.E * std::sin(ph),
          s.x * c - 2 * prm.gamma_f * s.g - 2 * prm.E * std::cos(ph),
          prm.delta * s.y + s.z * s.g * c - ga2 * s.x,
          -prm.delta * s.x + s.z * s.e * c - ga2 * s.y,
          -(s.g * s.x + s.e * s.y) * c - prm.gamma_a * (s.z + 1)};
}

// ---------------------------------------------------------------------------
// Conserved quantities of the conservative limit gamma_a = 0.

inline double bloch_norm(const ReducedState& s, const SystemParams& prm) {
  return s.u * s.u + s.v * s.v + prm.n * s.z * s.z;
}

inline double energy(const ReducedState& s, const SystemParams& prm) {
  return prm.alpha * s.p * s.p / 2 - s.u * std::cos(s.xi) - prm.delta / 2 * s.z;
}

// ---------------------------------------------------------------------------
// Adiabatic (steady-state Bloch) limit

struct BlochSteadyState {
  double u = 0.0;
  double v = 0.0;
  double z = -1.0;
};

namespace detail {
// delta^2 + 2 n cos^2(xi) + gamma_a^2/4; the common denominator of the
// stationary Bloch solution and the dipole force.
inline double adiabatic_denominator(double xi, const SystemParams& prm) {
  const double c = std::cos(xi);
  const double d = prm.delta * prm.delta + 2 * prm.n * c * c + prm.gamma_a * prm.gamma_a / 4;
  if (!(d > 0)) fail(ErrorKind::Degenerate, "adiabatic denominator vanishes");
  return d;
}
}  // namespace detail

/// Stationary values of (u, v, z) at fixed position xi.
inline BlochSteadyState steady_state_bloch(double xi, const SystemParams& prm) {
  const double d = detail::adiabatic_denominator(xi, prm);
  const double c = std::cos(xi);
  const double rest = prm.delta * prm.delta + prm.gamma_a * prm.gamma_a / 4;
  return {-2 * prm.n * prm.delta * c / d, -prm.gamma_a * prm.n * c / d, -rest / d};
}

/// Gradient force in the adiabatic limit, n delta sin(2 xi) / denominator.
inline double dipole_force_adiabatic(double xi, const SystemParams& prm) {
  const double d = detail::adiabatic_denominator(xi, prm);
  return prm.n * prm.delta * std::sin(2 * xi) / d;
}

/// Optical potential whose negative gradient is dipole_force_adiabatic.
inline double optical_potential(double xi, const SystemParams& prm) {
  if (prm.delta == 0.0) return 0.0;
  return prm.delta / 2 * std::log(detail::adiabatic_denominator(xi, prm));
}

// ---------------------------------------------------------------------------
// Ballistic friction and transition time

/// Flight-averaged friction F = -d|p|/dtau for an atom crossing the wave with
/// momentum p_s. Intended for |delta| >> 1 and |alpha p_s| > gamma_a.
inline double friction_force_analytic(double p_s, const SystemParams& prm) {
  const double ap = prm.alpha * std::abs(p_s);
  const double gd = prm.gamma_a * prm.delta;
  const double b = ap * ap - prm.delta * prm.delta + prm.gamma_a * prm.gamma_a / 4;
  const double den = gd * gd + b * b;
  if (den == 0.0) return 0.0;
  return -2 * prm.n * prm.delta * prm.gamma_a * ap / den;
}

/// Relaxation time towards a quasistationary momentum p_s, 1 / F'(|p_s|),
/// with the derivative taken by finite differences in |p|.
inline double transition_time_estimate(double p_s, const SystemParams& prm) {
  const double a = std::abs(p_s);
  const double h = 1e-4 * std::max(1.0, a);
  double slope;
  if (a > h) {
    slope = (friction_force_analytic(a + h, prm) - friction_force_analytic(a - h, prm)) / (2 * h);
  } else {
    slope = (friction_force_analytic(a + h, prm) - friction_force_analytic(a, prm)) / h;
  }
  if (slope == 0.0 || !std::isfinite(slope))
    fail(ErrorKind::Degenerate, "transition_time_estimate: zero friction slope");
  return 1.0 / slope;
}

// ---------------------------------------------------------------------------
// Period-1 approximate solutions

struct ApproxSolution {
  ReducedState state;
  double amplitude = 0.0;  // A_b or A_w
  bool valid = true;       // validity condition of the truncated expansion
};

/// Ballistic period-1 cycle with quasistationary momentum p_s, xi(0) = 0.
/// Valid for n << delta^2 - (alpha p_s)^2 + gamma_a^2/4.
inline ApproxSolution period1_ballistic_solution(double tau, double p_s, const SystemParams& prm,
                                                 double validity_ratio = 0.1) {
  const double w = prm.alpha * p_s;
  const double base = prm.delta * prm.delta - w * w + prm.gamma_a * prm.gamma_a / 4;
  const double a = prm.n / (base + prm.n);
  ApproxSolution out;
  out.amplitude = a;
  out.valid = base > 0 && prm.n <= validity_ratio * base;
  if (prm.n == 0.0) {
    out.state = {w * tau, p_s, 0.0, 0.0, -1.0};
    return out;
  }
  if (w == 0.0) fail(ErrorKind::InvalidArgument, "period1_ballistic_solution: p_s must be nonzero");
  const double c1 = std::cos(w * tau), s1 = std::sin(w * tau);
  const double c2 = std::cos(2 * w * tau);
  out.state.xi = w * tau;
  out.state.p = p_s - prm.delta * a / (2 * w) * c2;
  out.state.u = -2 * prm.delta * a * c1;
  out.state.v = -prm.gamma_a * a * c1 + 2 * w * a * s1;
  out.state.z = -1 + a * (1 + c2);
  return out;
}

/// Frequency of small oscillations at the bottom of a well.
inline double trap_frequency(const SystemParams& prm) {
  const double d2 = prm.delta * prm.delta + prm.gamma_a * prm.gamma_a / 4;
  const double w2 = -d2 / 2 + 0.5 * std::sqrt(d2 * d2 + 8 * prm.n * prm.alpha * std::abs(prm.delta));
  if (w2 < 0) fail(ErrorKind::Degenerate, "trap_frequency: no trapped oscillation");
  return std::sqrt(std::max(0.0, w2));
}

/// Position of the well used by period1_trapped_solution; a node of the
/// standing wave where cos(xi) grows along +xi so the quadrature signs match
/// the harmonic expansion.
inline constexpr double kTrapCenter = 3 * kPi / 2;

/// Trapped period-1 cycle of amplitude xi_m about the node 3 pi / 2.
/// Valid for n xi_m^2 << delta^2 - omega^2 + gamma_a^2/4 and delta > 0.
inline ApproxSolution period1_trapped_solution(double tau, double xi_m, const SystemParams& prm,
                                               double validity_ratio = 0.1) {
  const double w = trap_frequency(prm);
  const double base = prm.delta * prm.delta - w * w + prm.gamma_a * prm.gamma_a / 4;
  const double a = prm.n / (base + prm.n * xi_m * xi_m);
  ApproxSolution out;
  out.amplitude = a;
  out.valid = prm.delta > 0 && base > 0 && prm.n * xi_m * xi_m <= validity_ratio * base;
  const double c1 = std::cos(w * tau), s1 = std::sin(w * tau);
  out.state.xi = kTrapCenter + xi_m * c1;
  out.state.p = w > 0 ? -xi_m * w / prm.alpha * s1 : 0.0;
  out.state.u = -2 * prm.delta * a * xi_m * c1;
  out.state.v = -prm.gamma_a * a * xi_m * c1 + 2 * w * a * xi_m * s1;
  out.state.z = -1 + a * xi_m * xi_m * (1 + std::cos(2 * w * tau));
  return out;
}

// ---------------------------------------------------------------------------
// Fluorescence

/// Lab-frame dipole in units of mu for a carrier of angular frequency
/// carrier (units Omega_0).
inline double lab_frame_dipole(double u, double v, double tau, double carrier,
                               const SystemParams& prm) {
  if (!(prm.n > 0)) fail(ErrorKind::InvalidArgument, "lab_frame_dipole: n must be > 0");
  const double ph = carrier * tau;
  return ((u - v) * std::cos(ph) - (u + v) * std::sin(ph)) / std::sqrt(2 * prm.n);
}

// ---------------------------------------------------------------------------
// Broadband noise

struct NoiseSpec {
  double amplitude = 0.0;
  int n_harmonics = 100;
  double f_min = 0.05;
  double f_max = 5.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_harmonics < 1) fail(ErrorKind::InvalidArgument, "NoiseSpec: n_harmonics must be >= 1");
    if (!(f_min > 0 && f_min < f_max))
      fail(ErrorKind::InvalidArgument, "NoiseSpec: need 0 < f_min < f_max");
    if (!(amplitude >= 0) || !std::isfinite(amplitude))
      fail(ErrorKind::InvalidArgument, "NoiseSpec: amplitude must be finite and >= 0");
  }

  /// RMS of the harmonic sum, amplitude * sqrt(N/2).
  double rms() const { return amplitude * std::sqrt(n_harmonics / 2.0); }

  /// Amplitude giving an RMS force equal to `fraction` of `reference_force`.
  static double amplitude_for_rms(double reference_force, double fraction = 0.01,
                                  int n_harmonics = 100) {
    return fraction * reference_force / std::sqrt(n_harmonics / 2.0);
  }
};

/// Deterministic sum of harmonics with equidistant frequencies on
/// [f_min, f_max] and phases drawn once from the seed.
class NoiseForce {
 public:
  explicit NoiseForce(const NoiseSpec& spec) : spec_(spec) {
    spec_.validate();
    const int n = spec_.n_harmonics;
    freqs_.resize(n);
    phases_.resize(n);
    std::mt19937_64 rng(spec_.seed);
    std::uniform_real_distribution<double> uni(0.0, 2 * kPi);
    for (int k = 0; k < n; ++k) {
      freqs_[k] = n == 1 ? spec_.f_min
                         : spec_.f_min + k * (spec_.f_max - spec_.f_min) / (n - 1);
      phases_[k] = uni(rng);
    }
  }

  double operator()(double tau) const {
    if (spec_.amplitude == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < freqs_.size(); ++k) s += std::cos(freqs_[k] * tau + phases_[k]);
    return spec_.amplitude * s;
  }

  const NoiseSpec& spec() const { return spec_; }
  const std::vector<double>& frequencies() const { return freqs_; }
  const std::vector<double>& phases() const { return phases_; }

 private:
  NoiseSpec spec_;
  std::vector<double> freqs_;
  std::vector<double> phases_;
};

inline double noise_force(const NoiseSpec& spec, double tau) { return NoiseForce(spec)(tau); }

}  // namespace atomwave

#endif  // ATOMWAVE_MODEL_HPP
