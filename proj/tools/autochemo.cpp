// Command-line front end: autochemo <mode> [--config file] [--preset name] ...

#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "autochemo/run.hpp"

namespace ac = autochemo;

namespace {

int fail(const std::string& out_dir, const std::string& kind, const std::string& msg, int line = 0,
         const std::string& key = "") {
  ac::io::json err = {{"error", kind}, {"message", msg}};
  if (line > 0) err["line"] = line;
  if (!key.empty()) err["key"] = key;
  std::cerr << err.dump() << "\n";
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream f(std::filesystem::path(out_dir) / "error.json");
    if (f) f << err.dump(2) << "\n";
  }
  return kind == "config" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run-and-tumble autochemotaxis: stability analysis, 1D/2D simulation, metrics"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir, profile;
  std::uint64_t seed = 0;
  int threads = 0;
  long np = 0;
  int grid = 0, N = 0;
  double tend = -1, snap_every = -1;
  std::vector<std::string> sets;
  bool list_presets = false;

  for (const char* name : {"stability1d", "stability2d", "sim1d", "sim2d", "metrics"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--preset", preset, "named parameter preset (e.g. fig5, fig9, fig10-f2)");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "OpenMP threads (default: all)");
    sub->add_option("--profile", profile, "ci or paper")->check(CLI::IsMember({"ci", "paper"}));
    sub->add_option("--set", sets, "override a config key, key=value (repeatable)");
    sub->add_flag("--list-presets", list_presets, "print preset names and exit");
    if (std::string(name) == "sim2d") {
      sub->add_option("--np", np, "particle count");
      sub->add_option("--grid", grid, "mesh points per side");
      sub->add_option("--tend", tend, "final time");
      sub->add_option("--snapshot-every", snap_every, "time between snapshots");
    }
    if (std::string(name) == "sim1d") {
      sub->add_option("--tend", tend, "final time");
      sub->add_option("--snapshot-every", snap_every, "time between snapshots");
    }
    if (std::string(name) == "stability2d") sub->add_option("--N", N, "truncation order");
  }

  CLI11_PARSE(app, argc, argv);
  if (list_presets) {
    for (const auto& p : ac::preset_names()) std::cout << p << "\n";
    return 0;
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  ac::RunConfig cfg;
  try {
    // --preset is applied first; config-file keys then override it
    ac::RunConfig base;
    if (!preset.empty()) ac::ConfigParser::set(base, "preset", preset);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) return fail(out_dir, "io", "cannot read config " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = ac::ConfigParser::parse(ss.str(), base);
    } else {
      cfg = base;
    }
    if (cfg.explicit_keys.count("mode") && ac::to_string(cfg.mode) != mode)
      throw ac::ConfigError(0, "mode", "config says '" + ac::to_string(cfg.mode) + "' but subcommand is '" + mode + "'");
    ac::ConfigParser::set(cfg, "mode", mode);
    if (app.get_subcommands().front()->count("--seed")) ac::ConfigParser::set(cfg, "seed", std::to_string(seed));
    if (!out_dir.empty()) ac::ConfigParser::set(cfg, "output_dir", out_dir);
    if (!profile.empty()) ac::ConfigParser::set(cfg, "profile", profile);
    if (np > 0) ac::ConfigParser::set(cfg, "numerics.np", std::to_string(np));
    if (grid > 0) ac::ConfigParser::set(cfg, "numerics.n", std::to_string(grid));
    if (N > 0) ac::ConfigParser::set(cfg, "numerics.N", std::to_string(N));
    if (tend >= 0) {
      std::ostringstream s;
      s.precision(17);
      s << tend;
      ac::ConfigParser::set(cfg, "numerics.t_end", s.str());
    }
    if (snap_every > 0) {
      std::ostringstream s;
      s.precision(17);
      s << snap_every;
      ac::ConfigParser::set(cfg, "numerics.snapshot_every", s.str());
    }
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ac::ConfigError(0, kv, "--set expects key=value");
      ac::ConfigParser::set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    ac::finalize(cfg);
  } catch (const ac::ConfigError& e) {
    return fail(out_dir.empty() ? cfg.output_dir : out_dir, "config", e.what(), e.line, e.key);
  } catch (const std::exception& e) {
    return fail(out_dir, "config", e.what());
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    auto manifest = ac::execute(cfg);
    std::cout << manifest["summary"].dump(2) << "\n";
    std::cout << "manifest: " << (std::filesystem::path(cfg.output_dir) / "manifest.json").string() << "\n";
  } catch (const ac::BlowUp& e) {
    return fail(cfg.output_dir, "blowup", e.what());
  } catch (const std::exception& e) {
    return fail(cfg.output_dir, "runtime", e.what());
  }
  return 0;
}
