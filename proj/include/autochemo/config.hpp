#pragma once

#include <cmath>
#include <cstdint>
#include <tuple>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "solver2d.hpp"

namespace autochemo {

enum class Mode { Stability1D, Stability2D, Sim1D, Sim2D, Metrics };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::Stability1D: return "stability1d";
    case Mode::Stability2D: return "stability2d";
    case Mode::Sim1D: return "sim1d";
    case Mode::Sim2D: return "sim2d";
    case Mode::Metrics: return "metrics";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::Stability1D, Mode::Stability2D, Mode::Sim1D, Mode::Sim2D, Mode::Metrics})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct ConfigError : std::runtime_error {
  int line;         // 0 when not tied to a line
  std::string key;  // empty when not tied to a key
  ConfigError(int line_, std::string key_, const std::string& msg)
      : std::runtime_error(format(line_, key_, msg)), line(line_), key(std::move(key_)) {}

 private:
  static std::string format(int line, const std::string& key, const std::string& msg) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "key '" + key + "': ";
    return out + msg;
  }
};

struct Numerics {
  int n = 301;
  double dt = 0.004;
  double t_end = 150.0;
  double snapshot_every = 1.0;
  long np = 20000;
  int N = 100;
  double K = 3.0;
  double amplitude = 1e-4;  // relative to rho_bar
  std::string init = "random";
  int init_mode = 1;
  bool dealias = false;
  Interp interp = Interp::Bilinear;
  double c_scale = 1.0;  // initial chemical is c_scale * cbar
  double kmax = 0.0;     // 0 picks the module default
  int points = 400;
  int n_coarse = 400;
  int chunks = 64;
};

struct RegionSpec {
  bool enabled = false;
  double d1_min = 0.05, d1_max = 5.0;
  double d2_min = 0.1, d2_max = 10.0;
  int n1 = 30, n2 = 30;
  bool log = true;

  std::vector<double> axis(double lo, double hi, int count) const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
      double t = count > 1 ? double(i) / (count - 1) : 0.0;
      v[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    return v;
  }
  std::vector<double> d1s() const { return axis(d1_min, d1_max, n1); }
  std::vector<double> d2s() const { return axis(d2_min, d2_max, n2); }
};

struct MetricsSpec {
  std::string kind = "rdf";  // rdf, gradmap, spectrum
  std::string particles;     // .bin path of a particle snapshot
  std::string field;         // .bin path of a chemical snapshot
  double bin_width = 0.05;
  double r_max = 5.0;
  int density_bins = 20;
};

struct RunConfig {
  Mode mode = Mode::Sim1D;
  std::string preset;
  std::string profile = "ci";
  NonDimParams params;
  DepositionFn deposition;
  Numerics numerics;
  RegionSpec region;
  MetricsSpec metrics;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::set<std::string> explicit_keys;

  Model model() const { return {params, deposition}; }
};

namespace detail {
struct PresetRow {
  const char* name;
  double d1, d2, ell, delta;
  DepositionKind kind;
  double gamma, c0, T0, cbar;
};

inline const std::vector<PresetRow>& preset_rows() {
  using K = DepositionKind;
  static const std::vector<PresetRow> rows = {
      {"fig4a", 1.0, 1.0, 6.0, 0.01, K::Switch, 0.01, 0.05, 0.03, 0.12},
      {"fig4b", 1.0, 1.0, 6.0, 0.01, K::Switch, 0.01, 0.05, 0.03, 0.12},
      {"fig4c", 1.0, 1.0, 6.0, 0.01, K::Switch, 0.01, 0.05, 0.03, 0.12},
      {"fig4d", 1.0, 1.0, 6.0, 0.012, K::Switch, 0.01, 0.05, 0.03, 0.12},
      {"fig5", 0.2, 4.0, 5.0, 0.015, K::Constant, 0.01, 0.05, 0.03, 0.2},
      {"fig6-f1", 0.2, 4.0, 5.0, 0.015, K::Constant, 0.01, 0.25, 0.04, 0.2},
      {"fig6-f2", 0.2, 4.0, 5.0, 0.015, K::Switch, 0.01, 0.25, 0.04, 0.2},
      {"fig6-f3", 0.2, 4.0, 5.0, 0.015, K::LinearSwitch, 0.01, 0.25, 0.04, 0.2},
      {"fig7", 1.0, 2.0, 5.0, 0.015, K::Constant, 0.01, 0.05, 0.03, 0.12},
      {"fig8a", 1.0, 1.0, 10.0, 0.001, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig8b", 1.0, 1.0, 10.0, 0.001, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig8c", 1.0, 1.0, 10.0, 0.001, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig8d", 1.0, 1.0, 10.0, 0.001, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig8e", 1.0, 1.0, 10.0, 0.001, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig8f", 1.0, 1.0, 10.0, 0.004, K::Switch, 0.01, 0.05, 0.03, 0.012},
      {"fig9", 0.1, 4.0, 10.0, 0.001, K::Constant, 0.01, 0.012, 0.0007, 0.01},
      {"fig10-f1", 0.1, 4.0, 10.0, 0.001, K::Constant, 0.01, 0.012, 0.0007, 0.01},
      {"fig10-f2", 0.1, 4.0, 10.0, 0.001, K::Switch, 0.01, 0.012, 0.0007, 0.01},
      {"fig10-f3", 0.1, 4.0, 10.0, 0.001, K::LinearSwitch, 0.01, 0.012, 0.008, 0.01},
      {"fig13", 0.1, 4.0, 10.0, 0.001, K::Switch, 0.01, 0.012, 0.0007, 0.01},
  };
  return rows;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}
}  // namespace detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& r : detail::preset_rows()) out.push_back(r.name);
  return out;
}

inline void apply_preset(RunConfig& cfg, const std::string& name) {
  for (const auto& r : detail::preset_rows()) {
    if (name != r.name) continue;
    cfg.preset = name;
    cfg.params = {r.d1, r.d2, r.delta, r.ell, r.cbar};
    cfg.deposition = {r.kind, r.gamma, r.c0, r.T0};
    return;
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

// Profile-dependent numerics for keys the user did not set.
inline void apply_profile_defaults(RunConfig& cfg) {
  auto unset = [&](const char* k) { return !cfg.explicit_keys.count(k); };
  auto& nm = cfg.numerics;
  if (cfg.profile != "ci" && cfg.profile != "paper")
    throw ConfigError(0, "profile", "must be 'ci' or 'paper', got '" + cfg.profile + "'");
  if (cfg.mode == Mode::Sim2D) {
    bool paper = cfg.profile == "paper";
    if (unset("numerics.n")) nm.n = paper ? 200 : 128;
    if (unset("numerics.np")) nm.np = paper ? 160000 : 20000;
    if (unset("numerics.t_end")) nm.t_end = paper ? 300.0 : 50.0;
    if (unset("numerics.dt")) nm.dt = 0.2;
    if (unset("numerics.snapshot_every")) nm.snapshot_every = paper ? 15.0 : 5.0;
  } else if (cfg.mode == Mode::Sim1D) {
    if (unset("numerics.n")) nm.n = 301;
    if (unset("numerics.dt")) nm.dt = 0.004;
  } else if (cfg.mode == Mode::Metrics) {
    // gradmap smooths with the deposition kernel of a 2D run
    if (unset("numerics.dt")) nm.dt = 0.2;
  }
}

class ConfigParser {
 public:
  // Applies one key. Throws ConfigError carrying the line number.
  static void set(RunConfig& cfg, const std::string& key, const std::string& raw, int line = 0) {
    const std::string value = detail::unquote(detail::trim(raw));
    auto num = [&]() {
      try {
        std::size_t used = 0;
        double d = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(d)) throw std::invalid_argument("");
        return d;
      } catch (const std::exception&) {
        throw ConfigError(line, key, "expected a number, got '" + value + "'");
      }
    };
    auto integer = [&]() {
      double d = num();
      if (d != std::floor(d)) throw ConfigError(line, key, "expected an integer, got '" + value + "'");
      return long(d);
    };
    auto boolean = [&]() {
      if (value == "true" || value == "1" || value == "yes") return true;
      if (value == "false" || value == "0" || value == "no") return false;
      throw ConfigError(line, key, "expected true/false, got '" + value + "'");
    };

    auto& p = cfg.params;
    auto& f = cfg.deposition;
    auto& nm = cfg.numerics;
    auto& rg = cfg.region;
    auto& mt = cfg.metrics;
    try {
      if (key == "mode") cfg.mode = parse_mode(value);
      else if (key == "preset") apply_preset(cfg, value);
      else if (key == "profile") cfg.profile = value;
      else if (key == "seed") cfg.seed = std::uint64_t(integer());
      else if (key == "output_dir") cfg.output_dir = value;
      else if (key == "params.d1") p.d1 = num();
      else if (key == "params.d2") p.d2 = num();
      else if (key == "params.delta") p.delta = num();
      else if (key == "params.ell") p.ell = num();
      else if (key == "params.cbar") p.cbar = num();
      else if (key == "deposition.kind") f.kind = parse_deposition_kind(value);
      else if (key == "deposition.gamma") f.gamma = num();
      else if (key == "deposition.c0") f.c0 = num();
      else if (key == "deposition.T0") f.T0 = num();
      else if (key == "numerics.n") nm.n = int(integer());
      else if (key == "numerics.dt") nm.dt = num();
      else if (key == "numerics.t_end") nm.t_end = num();
      else if (key == "numerics.snapshot_every") nm.snapshot_every = num();
      else if (key == "numerics.np") nm.np = integer();
      else if (key == "numerics.N") nm.N = int(integer());
      else if (key == "numerics.K") nm.K = num();
      else if (key == "numerics.amplitude") nm.amplitude = num();
      else if (key == "numerics.init") {
        if (value != "random" && value != "cosine") throw ConfigError(line, key, "expected random or cosine");
        nm.init = value;
      } else if (key == "numerics.init_mode") nm.init_mode = int(integer());
      else if (key == "numerics.dealias") nm.dealias = boolean();
      else if (key == "numerics.interp") {
        if (value == "bilinear") nm.interp = Interp::Bilinear;
        else if (value == "spline") nm.interp = Interp::Spline;
        else throw ConfigError(line, key, "expected bilinear or spline");
      } else if (key == "numerics.c_scale") nm.c_scale = num();
      else if (key == "numerics.kmax") nm.kmax = num();
      else if (key == "numerics.points") nm.points = int(integer());
      else if (key == "numerics.n_coarse") nm.n_coarse = int(integer());
      else if (key == "numerics.chunks") nm.chunks = int(integer());
      else if (key == "region.enabled") rg.enabled = boolean();
      else if (key == "region.d1_min") rg.d1_min = num();
      else if (key == "region.d1_max") rg.d1_max = num();
      else if (key == "region.d2_min") rg.d2_min = num();
      else if (key == "region.d2_max") rg.d2_max = num();
      else if (key == "region.n1") rg.n1 = int(integer());
      else if (key == "region.n2") rg.n2 = int(integer());
      else if (key == "region.log") rg.log = boolean();
      else if (key == "metrics.kind") mt.kind = value;
      else if (key == "metrics.particles") mt.particles = value;
      else if (key == "metrics.field") mt.field = value;
      else if (key == "metrics.bin_width") mt.bin_width = num();
      else if (key == "metrics.r_max") mt.r_max = num();
      else if (key == "metrics.density_bins") mt.density_bins = int(integer());
      else throw ConfigError(line, key, "unknown key");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line, key, e.what());
    }
    cfg.explicit_keys.insert(key);
  }

  // `key = value` lines, '#' comments. A preset line is applied before any
  // other key so explicit keys always override it.
  static RunConfig parse(const std::string& text, RunConfig cfg = {}) {
    std::vector<std::tuple<int, std::string, std::string>> entries;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, raw)) {
      ++lineno;
      auto hash = raw.find('#');
      std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(lineno, "", "expected 'key = value'");
      std::string key = detail::trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(lineno, "", "empty key");
      if (!seen.insert(key).second) throw ConfigError(lineno, key, "duplicate key");
      entries.emplace_back(lineno, key, line.substr(eq + 1));
    }
    for (auto& [ln, k, v] : entries)
      if (k == "preset") set(cfg, k, v, ln);
    for (auto& [ln, k, v] : entries)
      if (k != "preset") set(cfg, k, v, ln);
    return cfg;
  }
};

// Checks required keys and value ranges. Call after all overrides.
inline void finalize(RunConfig& cfg) {
  auto has = [&](const char* k) { return cfg.explicit_keys.count(k) > 0; };
  if (!has("mode")) throw ConfigError(0, "mode", "missing required key");
  // rdf and spectrum read everything they need from the snapshot sidecars
  const bool needs_model = cfg.mode != Mode::Metrics || cfg.metrics.kind == "gradmap";
  if (cfg.preset.empty() && needs_model) {
    for (const char* k : {"params.d1", "params.d2", "params.delta", "params.ell", "params.cbar",
                          "deposition.kind", "deposition.gamma"})
      if (!has(k)) throw ConfigError(0, k, "missing required key (no preset given)");
    if (cfg.deposition.kind != DepositionKind::Constant)
      for (const char* k : {"deposition.c0", "deposition.T0"})
        if (!has(k)) throw ConfigError(0, k, "missing required key for this deposition kind");
  }
  apply_profile_defaults(cfg);
  auto check = [](bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(0, key, msg);
  };
  if (needs_model) {
    try {
      cfg.params.validate();
      cfg.deposition.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(0, "", e.what());
    }
  }
  if (needs_model) {
    try {
      steady_density(cfg.params, cfg.deposition);
    } catch (const std::exception& e) {
      throw ConfigError(0, "params.cbar", e.what());
    }
  }
  const auto& nm = cfg.numerics;
  check(nm.n >= 8, "numerics.n", "must be >= 8");
  check(nm.dt > 0, "numerics.dt", "must be > 0");
  check(nm.t_end >= 0, "numerics.t_end", "must be >= 0");
  check(nm.snapshot_every > 0, "numerics.snapshot_every", "must be > 0");
  check(nm.np >= 1, "numerics.np", "must be >= 1");
  check(nm.N >= 2, "numerics.N", "must be >= 2");
  check(nm.K > 0, "numerics.K", "must be > 0");
  check(nm.amplitude >= 0, "numerics.amplitude", "must be >= 0");
  check(nm.points >= 2, "numerics.points", "must be >= 2");
  check(nm.n_coarse >= 3, "numerics.n_coarse", "must be >= 3");
  check(nm.chunks >= 1, "numerics.chunks", "must be >= 1");
  check(nm.c_scale >= 0, "numerics.c_scale", "must be >= 0");
  if (cfg.mode == Mode::Sim2D) check(nm.dt <= 1.0, "numerics.dt", "must be <= 1 for the tumble law");
  if ((cfg.mode == Mode::Stability1D || cfg.mode == Mode::Stability2D))
    check(cfg.params.delta > 0, "params.delta", "linear stability needs delta > 0");
  const auto& rg = cfg.region;
  check(rg.n1 >= 1 && rg.n2 >= 1, "region.n1", "grid sizes must be >= 1");
  check(rg.d1_min > 0 && rg.d1_max >= rg.d1_min, "region.d1_min", "need 0 < d1_min <= d1_max");
  check(rg.d2_min > 0 && rg.d2_max >= rg.d2_min, "region.d2_min", "need 0 < d2_min <= d2_max");
  if (cfg.mode == Mode::Metrics) {
    const auto& mt = cfg.metrics;
    check(mt.kind == "rdf" || mt.kind == "gradmap" || mt.kind == "spectrum", "metrics.kind",
          "expected rdf, gradmap or spectrum");
    if (mt.kind != "spectrum") check(!mt.particles.empty(), "metrics.particles", "missing required key");
    if (mt.kind != "rdf") check(!mt.field.empty(), "metrics.field", "missing required key");
  }
}

// Canonical text form; parse(to_text(c)) reproduces c.
inline std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  const auto& nm = c.numerics;
  o << "mode = " << to_string(c.mode) << "\n";
  if (!c.preset.empty()) o << "preset = " << c.preset << "\n";
  o << "profile = " << c.profile << "\n"
    << "seed = " << c.seed << "\n"
    << "output_dir = " << c.output_dir << "\n"
    << "params.d1 = " << c.params.d1 << "\n"
    << "params.d2 = " << c.params.d2 << "\n"
    << "params.delta = " << c.params.delta << "\n"
    << "params.ell = " << c.params.ell << "\n"
    << "params.cbar = " << c.params.cbar << "\n"
    << "deposition.kind = " << to_string(c.deposition.kind) << "\n"
    << "deposition.gamma = " << c.deposition.gamma << "\n"
    << "deposition.c0 = " << c.deposition.c0 << "\n"
    << "deposition.T0 = " << c.deposition.T0 << "\n"
    << "numerics.n = " << nm.n << "\n"
    << "numerics.dt = " << nm.dt << "\n"
    << "numerics.t_end = " << nm.t_end << "\n"
    << "numerics.snapshot_every = " << nm.snapshot_every << "\n"
    << "numerics.np = " << nm.np << "\n"
    << "numerics.N = " << nm.N << "\n"
    << "numerics.K = " << nm.K << "\n"
    << "numerics.amplitude = " << nm.amplitude << "\n"
    << "numerics.init = " << nm.init << "\n"
    << "numerics.init_mode = " << nm.init_mode << "\n"
    << "numerics.dealias = " << (nm.dealias ? "true" : "false") << "\n"
    << "numerics.interp = " << (nm.interp == Interp::Spline ? "spline" : "bilinear") << "\n"
    << "numerics.c_scale = " << nm.c_scale << "\n"
    << "numerics.kmax = " << nm.kmax << "\n"
    << "numerics.points = " << nm.points << "\n"
    << "numerics.n_coarse = " << nm.n_coarse << "\n"
    << "numerics.chunks = " << nm.chunks << "\n"
    << "region.enabled = " << (c.region.enabled ? "true" : "false") << "\n"
    << "region.d1_min = " << c.region.d1_min << "\n"
    << "region.d1_max = " << c.region.d1_max << "\n"
    << "region.d2_min = " << c.region.d2_min << "\n"
    << "region.d2_max = " << c.region.d2_max << "\n"
    << "region.n1 = " << c.region.n1 << "\n"
    << "region.n2 = " << c.region.n2 << "\n"
    << "region.log = " << (c.region.log ? "true" : "false") << "\n"
    << "metrics.kind = " << c.metrics.kind << "\n";
  if (!c.metrics.particles.empty()) o << "metrics.particles = " << c.metrics.particles << "\n";
  if (!c.metrics.field.empty()) o << "metrics.field = " << c.metrics.field << "\n";
  o << "metrics.bin_width = " << c.metrics.bin_width << "\n"
    << "metrics.r_max = " << c.metrics.r_max << "\n"
    << "metrics.density_bins = " << c.metrics.density_bins << "\n";
  return o.str();
}

}  // namespace autochemo
