#ifndef ATOMWAVE_BASINS_HPP
#define ATOMWAVE_BASINS_HPP

// Basins of attraction over the (z0, p0) plane and an operational riddling
// indicator.

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "atomwave/cycles.hpp"
#include "atomwave/error.hpp"
#include "atomwave/model.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

struct BasinSpec {
  double z0_min = -1.0, z0_max = 1.0;
  double p0_min = 0.0, p0_max = 100.0;
  std::size_t nz = 200, np = 200;
  // initial values that are not scanned
  double xi0 = 0.0, u0 = 0.0, v0 = 0.0;

  void validate() const {
    if (nz < 2 || np < 2) fail(ErrorKind::InvalidArgument, "BasinSpec: grid must be at least 2x2");
    if (!(z0_max > z0_min) || !(p0_max > p0_min))
      fail(ErrorKind::InvalidArgument, "BasinSpec: empty range");
    if (z0_min < -1 || z0_max > 1) fail(ErrorKind::InvalidArgument, "BasinSpec: |z0| must be <= 1");
  }
  double z0(std::size_t i) const { return z0_min + (z0_max - z0_min) * i / (nz - 1.0); }
  double p0(std::size_t j) const { return p0_min + (p0_max - p0_min) * j / (np - 1.0); }
};

struct BasinGrid {
  BasinSpec spec;
  std::vector<int> labels;          // category codes, index i_z * np + i_p
  std::vector<std::string> errors;  // per cell, empty when fine

  int at(std::size_t iz, std::size_t ip) const { return labels[iz * spec.np + ip]; }
  std::set<int> distinct() const { return {labels.begin(), labels.end()}; }
};

inline BasinGrid basin_map(const SystemParams& prm, const BasinSpec& spec,
                           const ClassifyConfig& cfg = {}, int workers = 1) {
  prm.validate();
  spec.validate();
  BasinGrid g;
  g.spec = spec;
  const auto cells = run_sweep<AttractorLabel>(spec.nz * spec.np, workers, [&](std::size_t k) {
    const ReducedState s0{spec.xi0, spec.p0(k % spec.np), spec.u0, spec.v0, spec.z0(k / spec.np)};
    return classify_attractor(prm, s0, cfg);
  });
  for (const auto& c : cells) {
    g.labels.push_back(c.ok() ? c.value->category() : 0);
    g.errors.push_back(c.ok() ? std::string{} : c.error);
  }
  return g;
}

struct RiddlingReport {
  double mixing = 0.0;                 // fraction of cells with a differing 8-neighbour
  std::map<int, double> per_label;     // same, restricted to cells of each label
  double refined_mixing = -1.0;        // sub-window at twice the resolution, if computed
  double persistence = -1.0;           // refined_mixing / mixing of the same sub-window
};

/// Fraction of cells having at least one of their 8 neighbours in another
/// basin, overall and per label.
inline RiddlingReport riddling_indicator(const BasinGrid& g) {
  RiddlingReport r;
  const std::size_t nz = g.spec.nz, np = g.spec.np;
  if (g.distinct().size() < 2) return r;
  std::map<int, std::size_t> total, mixed;
  std::size_t all_mixed = 0;
  for (std::size_t i = 0; i < nz; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      const int l = g.at(i, j);
      bool diff = false;
      for (int di = -1; di <= 1 && !diff; ++di)
        for (int dj = -1; dj <= 1 && !diff; ++dj) {
          if (di == 0 && dj == 0) continue;
          const long a = static_cast<long>(i) + di, b = static_cast<long>(j) + dj;
          if (a < 0 || b < 0 || a >= static_cast<long>(nz) || b >= static_cast<long>(np)) continue;
          diff = g.at(a, b) != l;
        }
      ++total[l];
      if (diff) {
        ++mixed[l];
        ++all_mixed;
      }
    }
  r.mixing = static_cast<double>(all_mixed) / static_cast<double>(nz * np);
  for (const auto& [l, t] : total) r.per_label[l] = static_cast<double>(mixed[l]) / t;
  return r;
}

/// Riddling indicator of `sub` together with its persistence when the same
/// window is recomputed at twice the resolution.
inline RiddlingReport riddling_with_refinement(const SystemParams& prm, const BasinSpec& sub,
                                               const ClassifyConfig& cfg = {}, int workers = 1) {
  const BasinGrid coarse = basin_map(prm, sub, cfg, workers);
  BasinSpec fine = sub;
  fine.nz = 2 * sub.nz - 1;
  fine.np = 2 * sub.np - 1;
  const BasinGrid refined = basin_map(prm, fine, cfg, workers);
  RiddlingReport r = riddling_indicator(coarse);
  r.refined_mixing = riddling_indicator(refined).mixing;
  r.persistence = r.mixing > 0 ? r.refined_mixing / r.mixing : 0.0;
  return r;
}

/// Binary PGM, one grey level per category; z0 increases upwards.
inline void write_pgm(std::ostream& os, const BasinGrid& g) {
  os << "P5\n" << g.spec.np << ' ' << g.spec.nz << "\n255\n";
  for (std::size_t r = 0; r < g.spec.nz; ++r) {
    const std::size_t i = g.spec.nz - 1 - r;
    for (std::size_t j = 0; j < g.spec.np; ++j) {
      const int c = std::clamp(g.at(i, j), 0, 5);
      os.put(static_cast<char>(255 - c * 51));
    }
  }
  if (!os) fail(ErrorKind::Io, "write_pgm: write failed");
}

}  // namespace atomwave

#endif  // ATOMWAVE_BASINS_HPP
