#ifndef ATOMWAVE_CONFIG_HPP
#define ATOMWAVE_CONFIG_HPP

// Sectioned key/value experiment configuration. Every recognised key has a
// schema entry with a type and a default; anything else is rejected. Values
// are stored verbatim, so writing and re-reading a configuration is lossless.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "atomwave/csv.hpp"
#include "atomwave/error.hpp"

namespace atomwave {

inline constexpr const char* kCodeVersion = "atomwave 1.0.0";

enum class ValueType { Real, Integer, Boolean, Text };

struct ConfigKey {
  std::string_view section;
  std::string_view key;
  ValueType type;
  std::string_view default_value;
  std::string_view help;
};

// clang-format off
inline const std::vector<ConfigKey>& config_schema() {
  using T = ValueType;
  static const std::vector<ConfigKey> schema{
      {"run", "command", T::Text, "", "subcommand to run"},
      {"run", "out", T::Text, "out", "output directory"},
      {"run", "seed", T::Integer, "1", "seed of every random choice (noise phases)"},
      {"run", "workers", T::Integer, "0", "worker threads; 0 uses ATOMWAVE_WORKERS or the core count"},
      {"run", "inject_failure", T::Integer, "-1", "sweep cell forced to fail, for fault-injection tests"},

      {"system", "alpha", T::Real, "0.01", "recoil frequency"},
      {"system", "delta", T::Real, "24", "atom-field detuning"},
      {"system", "n", T::Real, "3000", "mean photon number"},
      {"system", "gamma_a", T::Real, "0.3", "spontaneous decay rate"},

      {"initial", "xi", T::Real, "0", ""},
      {"initial", "p", T::Real, "60", ""},
      {"initial", "u", T::Real, "0", ""},
      {"initial", "v", T::Real, "0", ""},
      {"initial", "z", T::Real, "-1", ""},

      {"integrator", "rel_tol", T::Real, "1e-9", ""},
      {"integrator", "abs_tol", T::Real, "1e-11", ""},
      {"integrator", "max_step", T::Real, "0.5", ""},
      {"integrator", "max_steps", T::Integer, "200000000", ""},
      {"integrator", "method", T::Text, "dopri5", "dopri5 or rk4 (fixed step max_step)"},

      {"simulate", "tau_max", T::Real, "1000", ""},
      {"simulate", "sample_interval", T::Real, "0.1", "0 records every accepted step"},
      {"simulate", "record_from", T::Real, "0", ""},

      {"noise", "amplitude", T::Real, "0", "amplitude of each harmonic"},
      {"noise", "rms_fraction", T::Real, "0", "> 0: rms force as a fraction of max |u sin xi| on the attractor"},
      {"noise", "n_harmonics", T::Integer, "100", ""},
      {"noise", "f_min", T::Real, "0.05", ""},
      {"noise", "f_max", T::Real, "5", ""},

      {"friction", "p_min", T::Real, "10", ""},
      {"friction", "p_max", T::Real, "600", ""},
      {"friction", "points", T::Integer, "60", ""},
      {"friction", "flights", T::Integer, "20", ""},
      {"friction", "min_ballistic_crossings", T::Integer, "10", ""},

      {"classify", "transient", T::Real, "2000", ""},
      {"classify", "window", T::Real, "400", ""},
      {"classify", "epsilon", T::Real, "0.001", ""},
      {"classify", "max_period", T::Integer, "12", ""},
      {"classify", "max_extensions", T::Integer, "4", ""},
      {"classify", "max_transient", T::Real, "32000", ""},
      {"classify", "lambda_min", T::Real, "0.01", ""},
      {"classify", "lambda_horizon", T::Real, "10000", ""},

      {"scan", "n_min", T::Real, "2000", ""},
      {"scan", "n_max", T::Real, "24000", ""},
      {"scan", "n_points", T::Integer, "23", ""},
      {"scan", "delta_min", T::Real, "24", ""},
      {"scan", "delta_max", T::Real, "24", ""},
      {"scan", "delta_points", T::Integer, "1", ""},

      {"lyapunov", "transient", T::Real, "2000", ""},
      {"lyapunov", "horizon", T::Real, "50000", ""},
      {"lyapunov", "renorm_interval", T::Real, "1", ""},
      {"lyapunov", "blocks", T::Integer, "20", ""},
      {"lyapunov", "method", T::Text, "tangent", "tangent or two-trajectory"},
      {"lyapunov", "d0", T::Real, "1e-8", ""},
      {"lyapunov", "dimension", T::Boolean, "false", "also box-count the sampled attractor"},
      {"lyapunov", "dimension_samples", T::Integer, "480000", ""},

      {"basins", "z0_min", T::Real, "-1", ""},
      {"basins", "z0_max", T::Real, "1", ""},
      {"basins", "p0_min", T::Real, "0", ""},
      {"basins", "p0_max", T::Real, "100", ""},
      {"basins", "nz", T::Integer, "200", ""},
      {"basins", "np", T::Integer, "200", ""},

      {"spectrum", "transient", T::Real, "2000", ""},
      {"spectrum", "duration", T::Real, "20000", ""},
      {"spectrum", "dt", T::Real, "0.05", ""},
      {"spectrum", "taper", T::Text, "blackman-harris", "blackman-harris, hann or rectangular"},
      {"spectrum", "method", T::Text, "envelope", "envelope or carrier-proxy"},
      {"spectrum", "carrier_factor", T::Real, "64", ""},

      {"exit", "axis", T::Text, "delta", "delta or n"},
      {"exit", "min", T::Real, "-5", ""},
      {"exit", "max", T::Real, "-1", ""},
      {"exit", "points", T::Integer, "101", ""},
      {"exit", "p0", T::Real, "50", "launch momentum; the atom starts at xi = 0 in the ground state"},
      {"exit", "detector_span", T::Real, "2", "wavelengths between the detectors"},
      {"exit", "tau_max", T::Real, "10000", ""},
      {"exit", "depth", T::Integer, "3", ""},
      {"exit", "zoom", T::Integer, "10", ""},
      {"exit", "max_flagged", T::Integer, "64", ""},
      {"exit", "threshold_factor", T::Real, "5", ""},
      {"exit", "threshold", T::Real, "0", "> 0 overrides the adaptive threshold"},
  };
  return schema;
}
// clang-format on

namespace detail {

inline const ConfigKey* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : config_schema())
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

inline bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
  return false;
}

inline bool parse_integer(std::string_view s, long long& out) {
  const char* b = s.data();
  if (!s.empty() && *b == '+') ++b;
  const auto r = std::from_chars(b, s.data() + s.size(), out);
  return !s.empty() && r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline void check_value(const ConfigKey& k, std::string_view v) {
  const std::string where = std::string(k.section) + "." + std::string(k.key);
  bool b;
  long long i;
  switch (k.type) {
    case ValueType::Real:
      try {
        parse_double(v);
      } catch (const Error&) {
        fail(ErrorKind::Usage, where + ": expected a number, got '" + std::string(v) + "'");
      }
      break;
    case ValueType::Integer:
      if (!parse_integer(v, i))
        fail(ErrorKind::Usage, where + ": expected an integer, got '" + std::string(v) + "'");
      break;
    case ValueType::Boolean:
      if (!parse_bool(v, b))
        fail(ErrorKind::Usage, where + ": expected true/false, got '" + std::string(v) + "'");
      break;
    case ValueType::Text:
      if (v.find_first_of("\n\r") != std::string_view::npos)
        fail(ErrorKind::Usage, where + ": value must be a single line");
      break;
  }
}

inline std::pair<std::string, std::string> split_dotted(std::string_view dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == dotted.size())
    fail(ErrorKind::Usage, "expected section.key, got '" + std::string(dotted) + "'");
  return {std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

}  // namespace detail

class Config {
 public:
  /// All keys at their defaults.
  Config() {
    for (const auto& k : config_schema())
      values_[dotted(k.section, k.key)] = std::string(k.default_value);
  }

  static Config from_ini(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      fail(ErrorKind::Usage, std::string("config: ") + e.what());
    }
    Config c;
    for (const auto& [section, body] : tree) {
      if (body.empty())
        fail(ErrorKind::Usage, "config: key '" + section + "' outside any section");
      for (const auto& [key, leaf] : body) c.set(section, key, leaf.data());
    }
    return c;
  }

  static Config from_string(const std::string& text) {
    std::istringstream is(text);
    return from_ini(is);
  }

  static Config from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Io, "cannot read config file " + path);
    return from_ini(is);
  }

  void set(std::string_view section, std::string_view key, std::string_view value) {
    const ConfigKey* k = detail::find_key(section, key);
    if (!k)
      fail(ErrorKind::Usage,
           "unknown config key '" + std::string(section) + "." + std::string(key) + "'");
    const std::string v = trim(value);
    detail::check_value(*k, v);
    values_[dotted(section, key)] = v;
  }

  void set(std::string_view dotted_key, std::string_view value) {
    const auto [s, k] = detail::split_dotted(dotted_key);
    set(s, k, value);
  }

  /// Applies "section.key=value".
  void apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::Usage, "--set expects section.key=value, got '" + std::string(assignment) + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
  }

  const std::string& text(std::string_view dotted_key) const {
    const auto it = values_.find(std::string(dotted_key));
    if (it == values_.end()) fail(ErrorKind::Usage, "unknown config key '" + std::string(dotted_key) + "'");
    return it->second;
  }

  double real(std::string_view dotted_key) const { return parse_double(text(dotted_key)); }

  long long integer(std::string_view dotted_key) const {
    long long i = 0;
    if (!detail::parse_integer(text(dotted_key), i))
      fail(ErrorKind::Usage, std::string(dotted_key) + ": not an integer");
    return i;
  }

  bool boolean(std::string_view dotted_key) const {
    bool b = false;
    if (!detail::parse_bool(text(dotted_key), b))
      fail(ErrorKind::Usage, std::string(dotted_key) + ": not a boolean");
    return b;
  }

  /// One section per schema group, keys in schema order.
  void write_ini(std::ostream& os) const {
    std::string_view current;
    for (const auto& k : config_schema()) {
      if (k.section != current) {
        if (!current.empty()) os << '\n';
        os << '[' << k.section << "]\n";
        current = k.section;
      }
      os << k.key << " = " << values_.at(dotted(k.section, k.key)) << '\n';
    }
  }

  std::string to_ini() const {
    std::ostringstream os;
    write_ini(os);
    return os.str();
  }

  bool operator==(const Config&) const = default;

 private:
  static std::string dotted(std::string_view s, std::string_view k) {
    return std::string(s) + "." + std::string(k);
  }
  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
  }

  std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Manifest

struct FailedCell {
  std::size_t index = 0;
  std::string error;
};

/// Written next to the outputs of every run: the resolved configuration,
/// the code version, result summaries, output files and any partial failures.
struct Manifest {
  std::string command;
  Config config;
  std::vector<std::pair<std::string, std::string>> results;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::vector<FailedCell> failed_cells;

  void result(std::string key, std::string value) { results.emplace_back(std::move(key), std::move(value)); }
  void result(std::string key, double value) { result(std::move(key), format_double(value)); }

  void write(std::ostream& os) const {
    os << "[manifest]\n"
       << "command = " << command << '\n'
       << "code_version = " << kCodeVersion << '\n'
       << "seed = " << config.text("run.seed") << '\n'
       << "status = " << (warnings.empty() && failed_cells.empty() ? "ok" : "warnings") << "\n\n";
    config.write_ini(os);
    os << "\n[results]\n";
    for (const auto& [k, v] : results) os << k << " = " << v << '\n';
    os << "\n[outputs]\n";
    for (std::size_t i = 0; i < outputs.size(); ++i) os << "file" << i << " = " << outputs[i] << '\n';
    os << "\n[warnings]\n";
    for (std::size_t i = 0; i < warnings.size(); ++i) os << "warning" << i << " = " << warnings[i] << '\n';
    os << "\n[failed_cells]\n";
    for (const auto& f : failed_cells) os << "cell" << f.index << " = " << one_line(f.error) << '\n';
  }

  void write_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::Io, "cannot open " + path + " for writing");
    write(os);
    if (!os) fail(ErrorKind::Io, "write failed: " + path);
  }

  /// Value of a [results] entry, empty when absent.
  std::string find_result(std::string_view key) const {
    for (const auto& [k, v] : results)
      if (k == key) return v;
    return {};
  }

 private:
  static std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  }
};

}  // namespace atomwave

#endif  // ATOMWAVE_CONFIG_HPP
