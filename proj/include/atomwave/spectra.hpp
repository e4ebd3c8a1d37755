#ifndef ATOMWAVE_SPECTRA_HPP
#define ATOMWAVE_SPECTRA_HPP

// Fluorescence spectra of the lab-frame dipole and sideband extraction.
//
// The radiating dipole is d = (u - v) cos(w t) - (u + v) sin(w t)
//                          = Re[(1 + i) (u + i v) exp(i w t)],
// so around +w its spectrum is the spectrum of the complex envelope u + i v
// (the factor (1 + i) only scales the power). The default method transforms
// that envelope directly, which is the limit of an infinitely distant
// carrier; the carrier-proxy method samples d itself at a finite carrier and
// is kept for cross-checks.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"

namespace atomwave {

enum class Taper { BlackmanHarris, Hann, Rectangular };
enum class SpectrumMethod { Envelope, CarrierProxy };

inline const char* to_string(Taper t) {
  switch (t) {
    case Taper::BlackmanHarris: return "blackman-harris";
    case Taper::Hann: return "hann";
    case Taper::Rectangular: return "rectangular";
  }
  return "unknown";
}

struct SpectrumConfig {
  Taper taper = Taper::BlackmanHarris;
  SpectrumMethod method = SpectrumMethod::Envelope;
  double carrier_factor = 64.0;  // carrier proxy = factor x signal bandwidth
  double slowest_line = 0.0;     // angular frequency; > 0 enables the length check
};

struct Spectrum {
  std::vector<double> freqs;  // angular offset from the carrier, ascending
  std::vector<double> power;
  Taper taper = Taper::BlackmanHarris;
  double resolution = 0.0;    // bin width (angular)
  double carrier = 0.0;       // carrier used by the proxy method, 0 otherwise
  double windowed_energy = 0.0;  // sum of |w x|^2; equals sum(power)

  std::size_t bin_of(double offset) const {
    const auto it = std::lower_bound(freqs.begin(), freqs.end(), offset);
    if (it == freqs.end()) return freqs.size() - 1;
    if (it == freqs.begin()) return 0;
    const std::size_t i = static_cast<std::size_t>(it - freqs.begin());
    return (offset - freqs[i - 1] < freqs[i] - offset) ? i - 1 : i;
  }
  /// Largest power within `bins` bins of `offset`.
  double power_near(double offset, int bins = 1) const {
    const std::size_t c = bin_of(offset);
    double p = 0;
    for (long k = static_cast<long>(c) - bins; k <= static_cast<long>(c) + bins; ++k)
      if (k >= 0 && k < static_cast<long>(power.size())) p = std::max(p, power[k]);
    return p;
  }
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<double> taper_weights(Taper t, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  const double d = static_cast<double>(n);  // periodic form
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 2 * kPi * static_cast<double>(i) / d;
    switch (t) {
      case Taper::BlackmanHarris:
        w[i] = 0.35875 - 0.48829 * std::cos(x) + 0.14128 * std::cos(2 * x) -
               0.01168 * std::cos(3 * x);
        break;
      case Taper::Hann: w[i] = 0.5 - 0.5 * std::cos(x); break;
      case Taper::Rectangular: break;
    }
  }
  return w;
}

/// Forward DFT, X_k = sum_n x_n exp(-2 pi i k n / N).
inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(x.size());
  auto* in = reinterpret_cast<fftw_complex*>(x.data());
  auto* o = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, in, o, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!plan) fail(ErrorKind::Numerical, "dft: FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline double uniform_step(const std::vector<double>& t) {
  if (t.size() < 16) fail(ErrorKind::InvalidArgument, "spectrum: need at least 16 samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0)) fail(ErrorKind::InvalidArgument, "spectrum: times must increase");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt)
      fail(ErrorKind::InvalidArgument, "spectrum: samples must be uniformly spaced");
  return dt;
}

}  // namespace detail

/// Power spectrum of a complex signal sampled every dt; power is |X_k|^2 / N
/// so that it sums to the windowed signal energy.
inline Spectrum complex_power_spectrum(const std::vector<std::complex<double>>& x, double dt,
                                       Taper taper) {
  const std::size_t n = x.size();
  const auto w = detail::taper_weights(taper, n);
  std::vector<std::complex<double>> y(n);
  Spectrum sp;
  sp.taper = taper;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = w[i] * x[i];
    sp.windowed_energy += std::norm(y[i]);
  }
  const auto X = detail::dft(std::move(y));
  sp.resolution = 2 * kPi / (static_cast<double>(n) * dt);
  sp.freqs.resize(n);
  sp.power.resize(n);
  // reorder to ascending frequency
  const std::size_t half = (n - 1) / 2;  // highest positive index
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + half + 1) % n;
    const long signed_k = k <= half ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
    sp.freqs[j] = static_cast<double>(signed_k) * sp.resolution;
    sp.power[j] = std::norm(X[k]) / static_cast<double>(n);
  }
  return sp;
}

/// Fluorescence spectrum of a uniformly sampled trajectory, as offsets from
/// the carrier.
inline Spectrum fluorescence_spectrum(const Trajectory& tr, const SystemParams& prm,
                                      const SpectrumConfig& cfg = {}) {
  const double dt = detail::uniform_step(tr.times);
  const double length = dt * static_cast<double>(tr.size());
  if (cfg.slowest_line > 0 && length < 32 * 2 * kPi / cfg.slowest_line)
    fail(ErrorKind::InvalidArgument,
         "fluorescence_spectrum: record shorter than 32 periods of the slowest line");
  const double norm = prm.n > 0 ? 1.0 / std::sqrt(2 * prm.n) : 1.0;

  if (cfg.method == SpectrumMethod::Envelope) {
    std::vector<std::complex<double>> x(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i)
      x[i] = std::complex<double>(tr.states[i].u, tr.states[i].v) * norm;
    return complex_power_spectrum(x, dt, cfg.taper);
  }

  // Carrier proxy: resample d(t) with a carrier well above the envelope
  // bandwidth (taken as the Nyquist band of the input sampling).
  const double bandwidth = kPi / dt;
  const double carrier = cfg.carrier_factor * bandwidth;
  const int up = static_cast<int>(std::ceil(2.5 * (carrier + bandwidth) / bandwidth));
  const double h = dt / up;
  std::vector<std::complex<double>> x;
  x.reserve(tr.size() * up);
  for (std::size_t i = 0; i + 1 < tr.size(); ++i)
    for (int k = 0; k < up; ++k) {
      const double f = static_cast<double>(k) / up;
      const double u = (1 - f) * tr.states[i].u + f * tr.states[i + 1].u;
      const double v = (1 - f) * tr.states[i].v + f * tr.states[i + 1].v;
      const double t = tr.times[i] + k * h;
      x.emplace_back(((u - v) * std::cos(carrier * t) - (u + v) * std::sin(carrier * t)) * norm,
                     0.0);
    }
  Spectrum full = complex_power_spectrum(x, h, cfg.taper);
  // keep the band around +carrier and express it as offsets
  Spectrum sp;
  sp.taper = cfg.taper;
  sp.resolution = full.resolution;
  sp.carrier = carrier;
  sp.windowed_energy = full.windowed_energy;
  for (std::size_t j = 0; j < full.freqs.size(); ++j) {
    const double off = full.freqs[j] - carrier;
    if (std::abs(off) <= bandwidth) {
      sp.freqs.push_back(off);
      sp.power.push_back(full.power[j]);
    }
  }
  return sp;
}

// ---------------------------------------------------------------------------
// Peaks

struct Peak {
  double offset = 0.0;
  double power = 0.0;
  double width = 0.0;  // full width at half maximum (angular)
};

struct PeakSet {
  std::vector<Peak> peaks;  // sorted by |offset|
  double spacing = 0.0;     // median gap between adjacent peaks (by offset)
  double floor = 0.0;       // median spectral power
  double line_fraction = 0.0;  // share of total power inside the detected lines
  double resolution = 0.0;     // bin width of the source spectrum
};

struct PeakPolicy {
  double floor_factor = 10.0;   // peaks must exceed this multiple of the median power
  double min_relative = 1e-6;   // ... and this fraction of the strongest bin
  int half_width = 4;           // bins; a peak dominates its +-half_width neighbourhood
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  if (v.size() % 2) return v[m];
  const double hi = v[m];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m) - 1, v.end());
  return 0.5 * (v[m - 1] + hi);
}

inline PeakSet extract_sidebands(const Spectrum& sp, const PeakPolicy& pol = {}) {
  PeakSet ps;
  ps.resolution = sp.resolution;
  const std::size_t n = sp.power.size();
  if (n == 0) return ps;
  ps.floor = median_of(sp.power);
  const double top = *std::max_element(sp.power.begin(), sp.power.end());
  const double threshold = std::max(pol.floor_factor * ps.floor, pol.min_relative * top);
  if (!(top > 0)) return ps;
  double total = 0, in_lines = 0;
  for (double p : sp.power) total += p;
  const long hw = pol.half_width;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sp.power[i];
    if (p <= threshold) continue;
    bool is_max = true;
    for (long k = static_cast<long>(i) - hw; k <= static_cast<long>(i) + hw && is_max; ++k) {
      if (k < 0 || k >= static_cast<long>(n) || k == static_cast<long>(i)) continue;
      // ties resolved towards the lower index
      is_max = k < static_cast<long>(i) ? sp.power[k] < p : sp.power[k] <= p;
    }
    if (!is_max) continue;
    Peak pk;
    // Centre by a parabola through the log power of the three central bins.
    pk.offset = sp.freqs[i];
    if (i > 0 && i + 1 < n && sp.power[i - 1] > 0 && sp.power[i + 1] > 0) {
      const double a = std::log(sp.power[i - 1]), b = std::log(p), c = std::log(sp.power[i + 1]);
      const double den = a - 2 * b + c;
      if (den < 0) pk.offset += 0.5 * (a - c) / den * sp.resolution;
    }
    pk.power = p;
    std::size_t lo = i, hi = i;
    while (lo > 0 && sp.power[lo - 1] > p / 2) --lo;
    while (hi + 1 < n && sp.power[hi + 1] > p / 2) ++hi;
    pk.width = static_cast<double>(hi - lo + 1) * sp.resolution;
    for (long k = static_cast<long>(i) - hw; k <= static_cast<long>(i) + hw; ++k)
      if (k >= 0 && k < static_cast<long>(n)) in_lines += sp.power[k];
    ps.peaks.push_back(pk);
  }
  ps.line_fraction = total > 0 ? in_lines / total : 0.0;
  std::vector<double> offs;
  for (const auto& p : ps.peaks) offs.push_back(p.offset);
  std::sort(offs.begin(), offs.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < offs.size(); ++i) gaps.push_back(offs[i] - offs[i - 1]);
  ps.spacing = median_of(gaps);
  std::stable_sort(ps.peaks.begin(), ps.peaks.end(), [](const Peak& a, const Peak& b) {
    return std::abs(a.offset) < std::abs(b.offset);
  });
  return ps;
}

/// Fundamental of the comb formed by the dominant lines (power at least
/// `dominance` of the strongest): the largest f0, at least `min_bins` bins
/// wide, of which every dominant offset is an integer multiple to within two
/// bins. Returns 0 when no such f0 exists.
inline double comb_fundamental(const PeakSet& ps, double dominance = 1e-3, int max_divisor = 12,
                               double min_bins = 8) {
  if (ps.peaks.empty() || !(ps.resolution > 0)) return 0.0;
  double top = 0;
  for (const auto& p : ps.peaks) top = std::max(top, p.power);
  const double tol = 2 * ps.resolution;
  std::vector<double> offs;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& p : ps.peaks) {
    if (p.power < dominance * top) continue;
    offs.push_back(p.offset);
    if (std::abs(p.offset) > tol) smallest = std::min(smallest, std::abs(p.offset));
  }
  if (!std::isfinite(smallest)) return 0.0;
  for (int j = 1; j <= max_divisor; ++j) {
    const double f0 = smallest / j;
    if (f0 < min_bins * ps.resolution) break;
    bool all = true;
    for (double o : offs)
      if (std::abs(o - std::round(o / f0) * f0) > tol) {
        all = false;
        break;
      }
    if (all) return f0;
  }
  return 0.0;
}

/// A spectrum made of isolated lines: at least two peaks carrying most of the
/// power, with the dominant ones on a common harmonic comb.
inline bool is_isolated_comb(const PeakSet& ps, double min_line_fraction = 0.9) {
  return ps.peaks.size() >= 2 && ps.line_fraction >= min_line_fraction && comb_fundamental(ps) > 0;
}

struct ParityReport {
  bool conclusive = false;
  double even_power = 0.0;  // peaks at +-2j * base
  double odd_power = 0.0;   // peaks at +-(2j - 1) * base
  double ratio = 0.0;       // even / odd
};

/// Power at even versus odd multiples of `base`; a peak belongs to multiple
/// k when it lies within `tolerance` (fraction of base) of k * base.
inline ParityReport parity_suppression(const PeakSet& ps, double base, double tolerance = 0.1) {
  ParityReport r;
  if (ps.peaks.size() < 4 || !(base > 0)) return r;
  for (const auto& p : ps.peaks) {
    const double k = std::round(std::abs(p.offset) / base);
    if (k < 1 || std::abs(std::abs(p.offset) - k * base) > tolerance * base) continue;
    (static_cast<long>(k) % 2 == 0 ? r.even_power : r.odd_power) += p.power;
  }
  r.conclusive = r.odd_power > 0;
  r.ratio = r.conclusive ? r.even_power / r.odd_power : 0.0;
  return r;
}

/// Angular frequency of the dominant oscillation of xi about its mean, from
/// the mean interval between upward mean crossings.
inline double oscillation_frequency(const Trajectory& tr) {
  if (tr.size() < 3) fail(ErrorKind::InvalidArgument, "oscillation_frequency: too few samples");
  double mean = 0;
  for (const auto& s : tr.states) mean += s.xi;
  mean /= static_cast<double>(tr.size());
  std::vector<double> up;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double a = tr.states[i - 1].xi - mean, b = tr.states[i].xi - mean;
    if (a < 0 && b >= 0) up.push_back(tr.times[i - 1] + (tr.times[i] - tr.times[i - 1]) * a / (a - b));
  }
  if (up.size() < 2) fail(ErrorKind::Degenerate, "oscillation_frequency: no oscillation found");
  return 2 * kPi * static_cast<double>(up.size() - 1) / (up.back() - up.front());
}

}  // namespace atomwave

#endif  // ATOMWAVE_SPECTRA_HPP
