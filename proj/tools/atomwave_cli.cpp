// Command-line front end. Every experiment is described by a Config; the
// flags only locate the config file and override individual keys.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atomwave.hpp"

namespace {

int exit_code(atomwave::ErrorKind k) {
  switch (k) {
    case atomwave::ErrorKind::Usage: return 2;
    case atomwave::ErrorKind::InvalidArgument: return 3;
    case atomwave::ErrorKind::Degenerate: return 4;
    case atomwave::ErrorKind::Numerical: return 5;
    case atomwave::ErrorKind::Io: return 6;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical atom in a standing-wave cavity field: trajectories, cycles, chaos, "
               "basins, spectra and exit-time scattering."};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  int workers = -1;
  long long seed = -1;
  bool print_config = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one key, section.key=value (repeatable)");
  app.add_option("--workers", workers, "worker threads (default: ATOMWAVE_WORKERS or core count)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for noise phases")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  const std::map<std::string, std::string> about{
      {"simulate", "integrate one trajectory; writes trajectory.csv and events.csv"},
      {"friction", "empirical friction curve F(p) and its zeros"},
      {"cycle-classify", "label the attractor reached from [initial]"},
      {"bifurcation", "section values v and labels along an n scan"},
      {"sync-map", "attractor labels on an (n, delta) grid"},
      {"lyapunov", "largest Lyapunov exponent, optional box-counting dimension"},
      {"lyapunov-map", "Lyapunov exponents on an (n, delta) grid"},
      {"basins", "basin map over (z0, p0) with a riddling indicator"},
      {"spectrum", "fluorescence spectrum, sidebands and parity test"},
      {"exit-scan", "exit times across a parameter window with refinement"}};
  std::vector<CLI::App*> subs;
  for (const auto& name : atomwave::command_names()) subs.push_back(app.add_subcommand(name, about.at(name)));
  for (auto* s : subs) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    atomwave::Config cfg =
        config_path.empty() ? atomwave::Config{} : atomwave::Config::from_file(config_path);
    for (auto* s : subs)
      if (s->parsed()) cfg.set("run.command", s->get_name());
    for (const auto& o : overrides) cfg.apply_override(o);
    if (workers > 0) cfg.set("run.workers", std::to_string(workers));
    if (seed >= 0) cfg.set("run.seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.set("run.out", out_dir);
    if (print_config) {
      cfg.write_ini(std::cout);
      return 0;
    }
    if (cfg.text("run.command").empty())
      atomwave::fail(atomwave::ErrorKind::Usage, "no command given; see --help");

    const atomwave::Manifest m = atomwave::run_experiment(cfg);
    std::cout << "command: " << m.command << "\n";
    for (const auto& [k, v] : m.results) std::cout << k << ": " << v << "\n";
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "outputs written to " << cfg.text("run.out") << "\n";
    return 0;
  } catch (const atomwave::Error& e) {
    std::cerr << "error [" << atomwave::to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 1;
  }
}
