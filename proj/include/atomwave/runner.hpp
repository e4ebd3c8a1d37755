#ifndef ATOMWAVE_RUNNER_HPP
#define ATOMWAVE_RUNNER_HPP

// Experiment runner behind the command-line tool: turns a resolved Config
// into library calls, CSV files and a manifest in the output directory.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atomwave/basins.hpp"
#include "atomwave/chaos.hpp"
#include "atomwave/config.hpp"
#include "atomwave/csv.hpp"
#include "atomwave/cycles.hpp"
#include "atomwave/error.hpp"
#include "atomwave/integrator.hpp"
#include "atomwave/model.hpp"
#include "atomwave/observables.hpp"
#include "atomwave/scattering.hpp"
#include "atomwave/spectra.hpp"
#include "atomwave/sweep.hpp"

namespace atomwave {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{
      "simulate",  "friction", "cycle-classify", "bifurcation", "sync-map",
      "lyapunov",  "lyapunov-map", "basins",     "spectrum",    "exit-scan"};
  return names;
}

// ---------------------------------------------------------------------------
// Config to library structs

inline SystemParams system_params(const Config& c) {
  SystemParams p;
  p.alpha = c.real("system.alpha");
  p.delta = c.real("system.delta");
  p.n = c.real("system.n");
  p.gamma_a = c.real("system.gamma_a");
  p.validate();
  return p;
}

inline ReducedState initial_state(const Config& c) {
  return {c.real("initial.xi"), c.real("initial.p"), c.real("initial.u"), c.real("initial.v"),
          c.real("initial.z")};
}

inline IntegratorConfig integrator_config(const Config& c) {
  IntegratorConfig ic;
  ic.rel_tol = c.real("integrator.rel_tol");
  ic.abs_tol = c.real("integrator.abs_tol");
  ic.max_step = c.real("integrator.max_step");
  ic.max_steps = static_cast<long>(c.integer("integrator.max_steps"));
  const std::string& m = c.text("integrator.method");
  if (m == "dopri5") ic.method = Method::DormandPrince54;
  else if (m == "rk4") ic.method = Method::ClassicRK4;
  else fail(ErrorKind::Usage, "integrator.method: expected dopri5 or rk4");
  return ic;
}

inline ClassifyConfig classify_config(const Config& c) {
  ClassifyConfig cc;
  cc.transient = c.real("classify.transient");
  cc.window = c.real("classify.window");
  cc.epsilon = c.real("classify.epsilon");
  cc.max_period = static_cast<int>(c.integer("classify.max_period"));
  cc.max_extensions = static_cast<int>(c.integer("classify.max_extensions"));
  cc.max_transient = c.real("classify.max_transient");
  cc.lambda_min = c.real("classify.lambda_min");
  cc.lambda_horizon = c.real("classify.lambda_horizon");
  cc.integrator = integrator_config(c);
  cc.validate();
  return cc;
}

inline LyapunovConfig lyapunov_config(const Config& c) {
  LyapunovConfig lc;
  lc.transient = c.real("lyapunov.transient");
  lc.horizon = c.real("lyapunov.horizon");
  lc.renorm_interval = c.real("lyapunov.renorm_interval");
  lc.blocks = static_cast<int>(c.integer("lyapunov.blocks"));
  lc.d0 = c.real("lyapunov.d0");
  const std::string& m = c.text("lyapunov.method");
  if (m == "tangent") lc.method = LyapunovMethod::Tangent;
  else if (m == "two-trajectory") lc.method = LyapunovMethod::TwoTrajectory;
  else fail(ErrorKind::Usage, "lyapunov.method: expected tangent or two-trajectory");
  lc.integrator = integrator_config(c);
  lc.validate();
  return lc;
}

/// Noise from the [noise] block, or nothing when both amplitude settings
/// are zero. rms_fraction is calibrated on the unperturbed orbit of `prm`.
inline std::optional<NoiseSpec> noise_spec(const Config& c, const SystemParams& prm,
                                           const ReducedState& s0, const ClassifyConfig& cc) {
  const double amp = c.real("noise.amplitude");
  const double frac = c.real("noise.rms_fraction");
  if (amp < 0 || frac < 0) fail(ErrorKind::Usage, "noise: amplitude and rms_fraction must be >= 0");
  if (amp == 0 && frac == 0) return std::nullopt;
  NoiseSpec ns;
  ns.n_harmonics = static_cast<int>(c.integer("noise.n_harmonics"));
  ns.f_min = c.real("noise.f_min");
  ns.f_max = c.real("noise.f_max");
  ns.seed = static_cast<std::uint64_t>(c.integer("run.seed"));
  ns.amplitude = frac > 0 ? NoiseSpec::amplitude_for_rms(attractor_force_scale(prm, s0, cc), frac,
                                                         ns.n_harmonics)
                          : amp;
  ns.validate();
  return ns;
}

inline int worker_count(const Config& c) {
  const long long w = c.integer("run.workers");
  if (w < 0) fail(ErrorKind::Usage, "run.workers must be >= 0");
  return w == 0 ? default_workers() : static_cast<int>(w);
}

inline std::size_t positive_count(const Config& c, std::string_view key) {
  const long long v = c.integer(key);
  if (v < 1) fail(ErrorKind::Usage, std::string(key) + " must be >= 1");
  return static_cast<std::size_t>(v);
}

namespace detail {

struct RunContext {
  const Config& cfg;
  std::filesystem::path out;
  int workers;
  Manifest& manifest;

  std::string path(const std::string& name) {
    manifest.outputs.push_back(name);
    return (out / name).string();
  }
  // Grid value of an injected failing cell becomes NaN, which every
  // parameter validation rejects inside the sweep.
  std::vector<double> with_injection(std::vector<double> v) const {
    const long long k = cfg.integer("run.inject_failure");
    if (k >= 0 && static_cast<std::size_t>(k) < v.size()) v[k] = std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  void failed(std::size_t index, const std::string& error) {
    if (!error.empty()) manifest.failed_cells.push_back({index, error});
  }
};

inline void write_state_row(CsvWriter& w, double t, const ReducedState& s) {
  w.row({t, s.xi, s.p, s.u, s.v, s.z});
}

inline void cmd_simulate(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  IntegratorConfig ic = integrator_config(c);
  ic.max_tau = c.real("simulate.tau_max");
  ic.sample_interval = c.real("simulate.sample_interval");
  ic.record_from = c.real("simulate.record_from");
  ClassifyConfig cc = classify_config(c);
  const auto noise = noise_spec(c, prm, s0, cc);
  const Trajectory tr =
      integrate(s0, prm, ic, {EventSpec::node_crossing(), EventSpec::section_u0()}, noise);
  CsvWriter traj(ctx.path("trajectory.csv"), {"tau", "xi", "p", "u", "v", "z"});
  for (std::size_t i = 0; i < tr.size(); ++i) write_state_row(traj, tr.times[i], tr.states[i]);
  CsvWriter ev(ctx.path("events.csv"), {"kind", "tau", "xi", "p", "u", "v", "z"});
  for (const Event& e : tr.events) {
    const auto& s = e.state;
    ev.row({to_string(e.kind), e.tau, s.xi, s.p, s.u, s.v, s.z});
  }
  ctx.manifest.result("final_tau", tr.final_tau);
  ctx.manifest.result("final_p", tr.final_state.p);
  ctx.manifest.result("steps", std::to_string(tr.steps));
  ctx.manifest.result("events", std::to_string(tr.events.size()));
  if (noise) ctx.manifest.result("noise_amplitude", noise->amplitude);
}

inline void cmd_friction(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  FrictionConfig fc;
  fc.flights = static_cast<int>(c.integer("friction.flights"));
  fc.min_ballistic_crossings = static_cast<int>(c.integer("friction.min_ballistic_crossings"));
  fc.integrator = integrator_config(c);
  fc.workers = ctx.workers;
  const auto grid = linear_grid(c.real("friction.p_min"), c.real("friction.p_max"),
                                positive_count(c, "friction.points"));
  const FrictionCurve curve = empirical_friction_curve(prm, grid, fc);
  CsvWriter f(ctx.path("friction.csv"), {"p_bar", "F"});
  for (const auto& s : curve.samples) f.row({s.p_bar, s.F});
  CsvWriter z(ctx.path("zeros.csv"), {"p_zero", "kind"});
  for (const auto& zero : curve.zeros) z.row({zero.p_zero, to_string(zero.kind)});
  ctx.manifest.result("ballistic_points", std::to_string(curve.samples.size()));
  ctx.manifest.result("trapped_points", std::to_string(curve.trapped.size()));
  ctx.manifest.result("p_cr", curve.p_cr);
  ctx.manifest.result("p_a", curve.p_a);
  ctx.manifest.result("p_b", curve.p_b);
}

inline void report_label(Manifest& m, const AttractorLabel& l) {
  m.result("label", l.name());
  m.result("category", std::to_string(l.category()));
  m.result("period", std::to_string(l.period));
  m.result("lambda", l.lambda);
  m.result("lambda_stderr", l.lambda_stderr);
  m.result("clusters", std::to_string(l.clusters));
  m.result("transient_used", l.transient_used);
  if (!l.note.empty()) m.result("note", l.note);
}

inline void cmd_cycle_classify(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  ClassifyConfig cc = classify_config(c);
  cc.noise = noise_spec(c, prm, s0, cc);
  const AttractorObservation obs = observe_attractor(prm, s0, cc);
  CsvWriter w(ctx.path("section.csv"), {"tau", "xi", "p", "u", "v", "z"});
  for (const Event& e : obs.window_events)
    if (e.direction > 0) write_state_row(w, e.tau, e.state);
  report_label(ctx.manifest, obs.label);
}

inline void cmd_bifurcation(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  ClassifyConfig cc = classify_config(c);
  const auto grid = linear_grid(c.real("scan.n_min"), c.real("scan.n_max"),
                                positive_count(c, "scan.n_points"));
  if (!grid.empty()) {
    SystemParams mid = prm;
    mid.n = grid[grid.size() / 2];
    cc.noise = noise_spec(c, mid, s0, cc);
  }
  const auto recs = bifurcation_scan(prm, ctx.with_injection(grid), s0, cc, ctx.workers);
  CsvWriter b(ctx.path("bifurcation.csv"), {"n", "v"});
  CsvWriter l(ctx.path("labels.csv"), {"n", "label"});
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (double v : recs[i].v_values) b.row({grid[i], v});
    l.row({grid[i], recs[i].error.empty() ? recs[i].label.category() : -1});
    ctx.failed(i, recs[i].error);
    if (recs[i].error.empty()) ++counts[recs[i].label.name()];
  }
  for (const auto& [name, k] : counts) ctx.manifest.result("count." + name, std::to_string(k));
  if (cc.noise) ctx.manifest.result("noise_amplitude", cc.noise->amplitude);
}

inline void cmd_sync_map(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  const ClassifyConfig cc = classify_config(c);
  const auto ns = linear_grid(c.real("scan.n_min"), c.real("scan.n_max"), positive_count(c, "scan.n_points"));
  const auto ds = linear_grid(c.real("scan.delta_min"), c.real("scan.delta_max"),
                              positive_count(c, "scan.delta_points"));
  // injection addresses the flattened cell index
  const long long k = c.integer("run.inject_failure");
  std::optional<std::size_t> inject;
  if (k >= 0 && static_cast<std::size_t>(k) < ns.size() * ds.size()) inject = static_cast<std::size_t>(k);
  const std::size_t cols = ds.size();
  const auto cells = run_sweep<AttractorLabel>(ns.size() * cols, ctx.workers, [&](std::size_t i) {
    SystemParams p = prm;
    p.n = inject == i ? std::numeric_limits<double>::quiet_NaN() : ns[i / cols];
    p.delta = ds[i % cols];
    return classify_attractor(p, s0, cc);
  });
  CsvWriter w(ctx.path("map.csv"), {"n", "delta", "label"});
  std::map<int, int> counts;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int label = cells[i].ok() ? cells[i].value->category() : -1;
    w.row({ns[i / cols], ds[i % cols], label});
    ctx.failed(i, cells[i].error);
    if (cells[i].ok()) ++counts[label];
  }
  for (const auto& [label, n] : counts)
    ctx.manifest.result("count.category" + std::to_string(label), std::to_string(n));
}

inline void cmd_lyapunov(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  LyapunovConfig lc = lyapunov_config(c);
  lc.noise = noise_spec(c, prm, s0, classify_config(c));
  const LyapunovEstimate e = max_lyapunov(prm, s0, lc);
  ctx.manifest.result("lambda", e.lambda);
  ctx.manifest.result("stderr", e.stderr_);
  if (!c.boolean("lyapunov.dimension")) return;
  IntegratorConfig ic = integrator_config(c);
  ic.sample_interval = 0.1;
  ic.record_from = lc.transient;
  ic.max_tau = lc.transient + 0.1 * static_cast<double>(c.integer("lyapunov.dimension_samples"));
  ic.max_steps = std::max<long>(ic.max_steps, 1'000'000'000);
  const Trajectory tr = integrate(s0, prm, ic, {}, lc.noise);
  const DimensionEstimate d = box_counting_dimension(attractor_embedding(tr.states));
  ctx.manifest.result("dimension", d.dimension);
  ctx.manifest.result("dimension_r2", d.r2);
  ctx.manifest.result("dimension_window", std::to_string(d.window_first) + ".." + std::to_string(d.window_last));
  CsvWriter w(ctx.path("box_counts.csv"), {"level", "count"});
  for (std::size_t i = 0; i < d.levels.size(); ++i) w.row({d.levels[i], d.counts[i]});
}

inline void cmd_lyapunov_map(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  const LyapunovConfig lc = lyapunov_config(c);
  const auto ns = linear_grid(c.real("scan.n_min"), c.real("scan.n_max"), positive_count(c, "scan.n_points"));
  const auto ds = linear_grid(c.real("scan.delta_min"), c.real("scan.delta_max"),
                              positive_count(c, "scan.delta_points"));
  const LyapunovMap map = lyapunov_map(prm, ctx.with_injection(ns), ds, s0, lc, ctx.workers);
  CsvWriter w(ctx.path("lyapunov_map.csv"), {"n", "delta", "lambda", "stderr"});
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    w.row({ns[i / ds.size()], ds[i % ds.size()], map.cells[i].lambda, map.cells[i].stderr_});
    ctx.failed(i, map.errors[i]);
  }
}

inline void cmd_basins(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ClassifyConfig cc = classify_config(c);
  BasinSpec spec;
  spec.z0_min = c.real("basins.z0_min");
  spec.z0_max = c.real("basins.z0_max");
  spec.p0_min = c.real("basins.p0_min");
  spec.p0_max = c.real("basins.p0_max");
  spec.nz = positive_count(c, "basins.nz");
  spec.np = positive_count(c, "basins.np");
  const ReducedState s0 = initial_state(c);
  spec.xi0 = s0.xi;
  spec.u0 = s0.u;
  spec.v0 = s0.v;
  const BasinGrid g = basin_map(prm, spec, cc, ctx.workers);
  CsvWriter w(ctx.path("basins.csv"), {"z0", "p0", "label"});
  for (std::size_t i = 0; i < spec.nz; ++i)
    for (std::size_t j = 0; j < spec.np; ++j) w.row({spec.z0(i), spec.p0(j), g.at(i, j)});
  for (std::size_t k = 0; k < g.errors.size(); ++k) ctx.failed(k, g.errors[k]);
  std::ofstream pgm(ctx.path("basins.pgm"), std::ios::binary);
  write_pgm(pgm, g);
  const RiddlingReport r = riddling_indicator(g);
  std::string labels;
  for (int l : g.distinct()) labels += (labels.empty() ? "" : " ") + std::to_string(l);
  ctx.manifest.result("labels", labels);
  ctx.manifest.result("mixing", r.mixing);
}

inline Taper parse_taper(const std::string& s) {
  if (s == "blackman-harris") return Taper::BlackmanHarris;
  if (s == "hann") return Taper::Hann;
  if (s == "rectangular") return Taper::Rectangular;
  fail(ErrorKind::Usage, "spectrum.taper: expected blackman-harris, hann or rectangular");
}

inline void cmd_spectrum(RunContext& ctx) {
  const Config& c = ctx.cfg;
  const SystemParams prm = system_params(c);
  const ReducedState s0 = initial_state(c);
  IntegratorConfig ic = integrator_config(c);
  const double transient = c.real("spectrum.transient");
  ic.record_from = transient;
  ic.max_tau = transient + c.real("spectrum.duration");
  ic.sample_interval = c.real("spectrum.dt");
  if (!(ic.sample_interval > 0)) fail(ErrorKind::Usage, "spectrum.dt must be > 0");
  const Trajectory tr = integrate(s0, prm, ic);
  SpectrumConfig sc;
  sc.taper = parse_taper(c.text("spectrum.taper"));
  const std::string& m = c.text("spectrum.method");
  if (m == "envelope") sc.method = SpectrumMethod::Envelope;
  else if (m == "carrier-proxy") sc.method = SpectrumMethod::CarrierProxy;
  else fail(ErrorKind::Usage, "spectrum.method: expected envelope or carrier-proxy");
  sc.carrier_factor = c.real("spectrum.carrier_factor");
  const Spectrum sp = fluorescence_spectrum(tr, prm, sc);
  CsvWriter w(ctx.path("spectrum.csv"), {"freq_offset", "power"});
  for (std::size_t i = 0; i < sp.freqs.size(); ++i) w.row({sp.freqs[i], sp.power[i]});
  const PeakSet ps = extract_sidebands(sp);
  CsvWriter pk(ctx.path("peaks.csv"), {"offset", "power"});
  for (const auto& p : ps.peaks) pk.row({p.offset, p.power});
  ctx.manifest.result("resolution", sp.resolution);
  ctx.manifest.result("peaks", std::to_string(ps.peaks.size()));
  ctx.manifest.result("spacing", ps.spacing);
  ctx.manifest.result("line_fraction", ps.line_fraction);
  ctx.manifest.result("isolated_comb", is_isolated_comb(ps) ? "true" : "false");
  try {
    const double w_xi = oscillation_frequency(tr);
    ctx.manifest.result("omega_xi", w_xi);
    const ParityReport pr = parity_suppression(ps, w_xi);
    if (pr.conclusive) ctx.manifest.result("even_odd_ratio", pr.ratio);
  } catch (const Error& e) {
    ctx.manifest.warnings.push_back(std::string("omega_xi: ") + e.what());
  }
}

inline void cmd_exit_scan(RunContext& ctx) {
  const Config& c = ctx.cfg;
  ExitExperiment ex;
  ex.prm = system_params(c);
  ex.p0 = c.real("exit.p0");
  ex.detector_span = c.real("exit.detector_span");
  ex.tau_max = c.real("exit.tau_max");
  ex.integrator = integrator_config(c);
  const std::string& a = c.text("exit.axis");
  ScanAxis axis;
  if (a == "delta") axis = ScanAxis::Detuning;
  else if (a == "n") axis = ScanAxis::PhotonNumber;
  else fail(ErrorKind::Usage, "exit.axis: expected delta or n");
  ScanOptions so;
  so.workers = ctx.workers;
  so.threshold_factor = c.real("exit.threshold_factor");
  so.threshold = c.real("exit.threshold");
  RefineConfig rc;
  rc.depth = static_cast<int>(c.integer("exit.depth"));
  rc.zoom = static_cast<int>(c.integer("exit.zoom"));
  rc.max_flagged = positive_count(c, "exit.max_flagged");
  rc.workers = ctx.workers;
  if (rc.depth < 0) fail(ErrorKind::Usage, "exit.depth must be >= 0");
  const auto values = linear_grid(c.real("exit.min"), c.real("exit.max"), positive_count(c, "exit.points"));
  ExitScan scan = exit_scan(axis, values, ex, so);
  if (rc.depth > 0) scan = refine_singular(std::move(scan), rc);
  CsvWriter w(ctx.path("exit_scan.csv"), {"level", "parent_interval", "param", "T", "outcome"});
  for (const auto& seg : scan.segments)
    for (std::size_t i = 0; i < seg.values.size(); ++i)
      w.row({seg.level, seg.parent_interval, seg.values[i], seg.results[i].T, to_string(seg.results[i].outcome)});
  CsvWriter lv(ctx.path("levels.csv"), {"level", "points", "flagged", "refined", "flagged_length_fraction",
                                        "variation", "timeout_fraction", "mean_T"});
  for (const auto& s : scan.stats)
    lv.row({s.level, s.points, s.flagged, s.refined, s.flagged_length_fraction, s.variation,
            s.timeout_fraction, s.mean_T});
  ctx.manifest.result("threshold", scan.threshold);
  const FractalReport fr = fractal_signature(scan);
  ctx.manifest.result("verdict", to_string(fr.verdict));
  ctx.manifest.result("branching", fr.branching);
  ctx.manifest.result("mean_T_growth", fr.mean_T_growth);
}

}  // namespace detail

/// Runs `cfg` (its run.command selects the experiment), writing the outputs
/// and manifest.ini into run.out. Whole-run failures throw; failed sweep
/// cells are listed in the manifest instead.
inline Manifest run_experiment(const Config& cfg) {
  Manifest m;
  m.command = cfg.text("run.command");
  m.config = cfg;
  using Fn = void (*)(detail::RunContext&);
  static const std::map<std::string, Fn> table{
      {"simulate", detail::cmd_simulate},         {"friction", detail::cmd_friction},
      {"cycle-classify", detail::cmd_cycle_classify}, {"bifurcation", detail::cmd_bifurcation},
      {"sync-map", detail::cmd_sync_map},         {"lyapunov", detail::cmd_lyapunov},
      {"lyapunov-map", detail::cmd_lyapunov_map}, {"basins", detail::cmd_basins},
      {"spectrum", detail::cmd_spectrum},         {"exit-scan", detail::cmd_exit_scan}};
  const auto it = table.find(m.command);
  if (it == table.end()) fail(ErrorKind::Usage, "unknown command '" + m.command + "'");

  const std::filesystem::path out = cfg.text("run.out");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + out.string() + ": " + ec.message());
  detail::RunContext ctx{cfg, out, worker_count(cfg), m};
  it->second(ctx);
  if (!m.failed_cells.empty())
    m.warnings.push_back(std::to_string(m.failed_cells.size()) + " sweep cell(s) failed");
  m.write_file((out / "manifest.ini").string());
  return m;
}

}  // namespace atomwave

#endif  // ATOMWAVE_RUNNER_HPP
