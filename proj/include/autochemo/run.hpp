#pragma once

#include <fftw3.h>
#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "solver1d.hpp"
#include "solver2d.hpp"
#include "stability1d.hpp"
#include "stability2d.hpp"

namespace autochemo {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {
inline std::string numbered(const std::string& stem, long idx) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05ld.bin", idx);
  return stem + buf;
}

inline long steps_for(double span, double dt) { return std::max(0L, long(std::llround(span / dt))); }

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }
  std::filesystem::path operator()(const std::string& name) {
    auto p = dir_ / name;
    files_.push_back(p);
    return p;
  }
  void bin(const std::string& name, const std::vector<double>& data, const io::BinMeta& meta) {
    auto p = (*this)(name);
    io::write_bin(p, data, meta);
    files_.push_back(io::sidecar_path(p));
  }
  const std::vector<std::filesystem::path>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

inline void run_stability1d(const RunConfig& cfg, Outputs& out, io::json& summary) {
  auto disp = CubicDispersion::from(cfg.params, cfg.deposition);
  double kmax = cfg.numerics.kmax > 0 ? cfg.numerics.kmax : disp.default_kmax();
  auto curve = dispersion_curve(disp, kmax, cfg.numerics.points);
  {
    io::CsvWriter csv(out("curve.csv"), {"k", "R"});
    for (std::size_t i = 0; i < curve.k_values.size(); ++i) csv.row(curve.k_values[i], curve.R_values[i]);
  }
  auto pk = most_unstable_wavenumber(disp, kmax);
  auto [lo, hi] = proposition2_bounds(cfg.params);
  summary["rho_bar"] = steady_density(cfg.params, cfg.deposition);
  summary["d3"] = disp.d3;
  summary["interior_maximum"] = pk.found;
  if (pk.found) {
    summary["k_u"] = pk.k;
    summary["R_k_u"] = pk.R;
    summary["unstable"] = pk.k >= 2.0 * M_PI / cfg.params.ell;
  } else {
    summary["unstable"] = false;
  }
  summary["d3_bounds_closed_form"] = {lo, hi};
  summary["d3_upper_bound_small_k"] = interior_max_upper_bound(cfg.params);
  if (cfg.region.enabled) {
    auto map = stability_region(cfg.region.d1s(), cfg.region.d2s(), cfg.params, cfg.deposition);
    io::CsvWriter csv(out("region.csv"), {"d1", "d2", "unstable", "k_u"});
    for (const auto& c : map.cells) csv.row(c.d1, c.d2, int(c.unstable), c.k_u);
    summary["region_warnings"] = map.warnings;
  }
}

inline void run_stability2d(const RunConfig& cfg, Outputs& out, io::json& summary) {
  Search2DOptions o;
  o.N = cfg.numerics.N;
  o.kmax = cfg.numerics.kmax > 0 ? cfg.numerics.kmax : 20.0;
  o.n_coarse = cfg.numerics.n_coarse;
  auto curve = R_N_curve(cfg.params, cfg.deposition, o.kmax, cfg.numerics.points, o.N);
  {
    io::CsvWriter csv(out("curve.csv"), {"kmag", "R_N"});
    for (std::size_t i = 0; i < curve.kmag.size(); ++i) csv.row(curve.kmag[i], curve.R[i]);
  }
  auto pk = most_unstable_wavenumber_2d(cfg.params, cfg.deposition, o);
  summary["rho_bar"] = steady_density(cfg.params, cfg.deposition);
  summary["d3"] = d3_coefficient(cfg.params, cfg.deposition);
  summary["N"] = o.N;
  summary["interior_maximum"] = pk.found;
  if (pk.found) {
    summary["K_u"] = pk.k;
    summary["R_K_u"] = pk.R;
    summary["unstable"] = pk.k >= 2.0 * M_PI / cfg.params.ell;
  } else {
    summary["unstable"] = false;
  }
  if (cfg.region.enabled) {
    auto map = stability_region_2d(cfg.region.d1s(), cfg.region.d2s(), cfg.params, cfg.deposition, o);
    io::CsvWriter csv(out("region.csv"), {"d1", "d2", "unstable", "K_u"});
    for (const auto& c : map.cells) csv.row(c.d1, c.d2, int(c.unstable), c.K_u);
    summary["region_warnings"] = map.warnings;
  }
}

inline void run_sim1d(const RunConfig& cfg, Outputs& out, io::json& summary) {
  const auto& nm = cfg.numerics;
  Mesh1D mesh(nm.n, cfg.params.ell);
  double rho_bar = steady_density(cfg.params, cfg.deposition);
  State1D s = nm.init == "cosine"
                  ? init_cosine(cfg.params, cfg.deposition, mesh, nm.dt, nm.init_mode, nm.amplitude * rho_bar)
                  : init_perturbed_steady(cfg.params, cfg.deposition, mesh, nm.dt, cfg.seed, nm.amplitude * rho_bar);
  for (double& v : s.c.values) v = nm.c_scale * cfg.params.cbar;
  Solver1D solver(cfg.params, cfg.deposition, mesh, {nm.dealias, 1e8});

  io::CsvWriter metrics(out("metrics.csv"), {"t", "mass", "total_chemical", "max_min_c", "min_c", "max_rho",
                                             "peaks_above_1.5rho_bar"});
  io::CsvWriter spectrum(out("spectrum.csv"), {"t", "k", "E"});
  const double mass0 = total_mass(s.rho);
  long every = std::max(1L, steps_for(nm.snapshot_every, nm.dt));
  long total = steps_for(nm.t_end, nm.dt);
  long snap = 0;
  auto emit = [&]() {
    metrics.row(s.t, total_mass(s.rho), total_chemical(s.c), max_min_chemical(s.c),
                *std::min_element(s.c.values.begin(), s.c.values.end()),
                *std::max_element(s.rho.values.begin(), s.rho.values.end()), count_peaks(s.rho.values, 1.5 * rho_bar));
    for (const auto& pt : spectrum_1d(s.c))
      if (pt.k >= 0) spectrum.row(s.t, pt.k, pt.E);
    out.bin(numbered("rho", snap), s.rho.values, {{std::size_t(mesh.n)}, mesh.ell, s.t, "rho"});
    out.bin(numbered("c", snap), s.c.values, {{std::size_t(mesh.n)}, mesh.ell, s.t, "c"});
    ++snap;
  };
  emit();
  while (s.step < total) {
    solver.step(s);
    if (s.step % every == 0 || s.step == total) emit();
  }
  summary["rho_bar"] = rho_bar;
  summary["t_final"] = s.t;
  summary["snapshots"] = snap;
  summary["mass_drift_rel"] = std::abs(total_mass(s.rho) - mass0) / std::max(std::abs(mass0), 1e-300);
}

inline void run_sim2d(const RunConfig& cfg, Outputs& out, io::json& summary) {
  const auto& nm = cfg.numerics;
  Mesh2D mesh(nm.n, cfg.params.ell);
  Solver2DOptions o;
  o.K = nm.K;
  o.interp = nm.interp;
  o.chunks = nm.chunks;
  Simulation2D sim(cfg.params, cfg.deposition, mesh, std::size_t(nm.np), nm.dt, cfg.seed, o);
  for (double& v : sim.state().c.values) v = nm.c_scale * cfg.params.cbar;

  io::CsvWriter metrics(out("metrics.csv"), {"t", "total_chemical", "max_min_c", "ring_k", "ring_power",
                                             "tumble_fraction", "clamped"});
  long every = std::max(1L, steps_for(nm.snapshot_every, nm.dt));
  long total = steps_for(nm.t_end, nm.dt);
  long snap = 0;
  auto& st = sim.state();
  auto row = [&]() {
    auto sp = spectrum_2d(st.c);
    double rk = 0.0, rp = 0.0;
    for (const auto& b : sp.radial)
      if (b.kmag > 0 && b.power > rp) {
        rp = b.power;
        rk = b.kmag;
      }
    double tf = st.step > 0 ? double(sim.last_stats().tumbles) / double(nm.np) : 0.0;
    metrics.row(st.t, total_chemical(st.c), max_min_chemical(st.c), rk, rp, tf, sim.last_stats().clamped);
  };
  auto snapshot = [&]() {
    const auto& e = st.particles;
    std::vector<double> xyz(3 * e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      xyz[3 * i] = e.x[i];
      xyz[3 * i + 1] = e.y[i];
      xyz[3 * i + 2] = e.theta[i];
    }
    out.bin(numbered("particles", snap), xyz, {{e.size(), 3}, mesh.ell, st.t, "particles"});
    out.bin(numbered("c", snap), st.c.values, {{std::size_t(mesh.n), std::size_t(mesh.n)}, mesh.ell, st.t, "c"});
    ++snap;
  };
  row();
  snapshot();
  while (st.step < total) {
    sim.step();
    row();
    if (st.step % every == 0 || st.step == total) snapshot();
  }
  summary["rho_bar"] = steady_density(cfg.params, cfg.deposition);
  summary["rho_d"] = st.rho_d;
  summary["sigma2"] = sim.sigma2();
  summary["t_final"] = st.t;
  summary["snapshots"] = snap;
  summary["tumble_probability_clamps"] = sim.total_clamped();
}

inline void run_metrics(const RunConfig& cfg, Outputs& out, io::json& summary) {
  const auto& mt = cfg.metrics;
  ParticleEnsemble e;
  io::BinMeta pmeta;
  if (!mt.particles.empty()) {
    auto xyz = io::read_bin(mt.particles, &pmeta);
    if (pmeta.shape.size() != 2 || pmeta.shape[1] < 2) throw std::runtime_error(mt.particles + " is not a particle snapshot");
    std::size_t np = pmeta.shape[0], w = pmeta.shape[1];
    for (std::size_t i = 0; i < np; ++i) {
      e.x.push_back(xyz[w * i]);
      e.y.push_back(xyz[w * i + 1]);
      e.theta.push_back(w > 2 ? xyz[w * i + 2] : 0.0);
    }
    summary["t"] = pmeta.t;
  }
  if (mt.kind == "rdf") {
    auto h = rdf(e, pmeta.ell, mt.bin_width, mt.r_max);
    io::CsvWriter csv(out("rdf.csv"), {"r", "g"});
    for (std::size_t b = 0; b < h.g_values.size(); ++b)
      csv.row(0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]), h.g_values[b]);
    summary["n_pairs"] = h.n_pairs;
    if (auto r = rdf_first_crossing(h)) summary["first_crossing"] = *r;
    return;
  }
  io::BinMeta fmeta;
  auto values = io::read_bin(mt.field, &fmeta);
  if (mt.kind == "spectrum") {
    if (fmeta.shape.size() == 1) {
      Field1D c(Mesh1D(int(fmeta.shape[0]), fmeta.ell), values);
      io::CsvWriter csv(out("spectrum.csv"), {"k", "E"});
      for (const auto& pt : spectrum_1d(c)) csv.row(pt.k, pt.E);
    } else {
      Field2D c(Mesh2D(int(fmeta.shape[0]), fmeta.ell), values);
      auto sp = spectrum_2d(c);
      io::CsvWriter csv(out("spectrum.csv"), {"kmag", "re", "power", "modes"});
      for (const auto& b : sp.radial) csv.row(b.kmag, b.re, b.power, b.count);
    }
    return;
  }
  // gradmap
  if (fmeta.shape.size() != 2) throw std::runtime_error(mt.field + " is not a 2D field");
  Field2D c(Mesh2D(int(fmeta.shape[0]), fmeta.ell), values);
  double sigma2 = cfg.numerics.K * cfg.numerics.dt * cfg.params.d1;
  double rho_d = steady_density(cfg.params, cfg.deposition) * fmeta.ell * fmeta.ell / double(e.size());
  std::vector<double> ones(e.size(), 1.0);
  Field2D dens = deposit_chemical(e, ones, c.mesh, sigma2);
  double top = 0.0;
  for (double v : dens.values) top = std::max(top, rho_d * v);
  auto bins = gradient_vs_density(e, c, sigma2, rho_d, uniform_edges(0.0, top, mt.density_bins));
  io::CsvWriter csv(out("gradmap.csv"), {"rho_lo", "rho_hi", "mean", "std", "cells"});
  for (const auto& b : bins) csv.row(b.lo, b.hi, b.mean, b.stddev, b.count);
}
}  // namespace detail

inline io::json versions() {
  return {{"autochemo", kVersion},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

// Runs one configured job into cfg.output_dir and writes manifest.json there.
inline io::json execute(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  detail::Outputs out(cfg.output_dir);
  io::json summary = io::json::object();
  switch (cfg.mode) {
    case Mode::Stability1D: detail::run_stability1d(cfg, out, summary); break;
    case Mode::Stability2D: detail::run_stability2d(cfg, out, summary); break;
    case Mode::Sim1D: detail::run_sim1d(cfg, out, summary); break;
    case Mode::Sim2D: detail::run_sim2d(cfg, out, summary); break;
    case Mode::Metrics: detail::run_metrics(cfg, out, summary); break;
  }
  {
    std::ofstream cf(out("config.txt"));
    cf << to_text(cfg);
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::json files = io::json::array();
  for (const auto& f : out.files()) files.push_back(io::file_entry(out.dir(), f));
  io::json manifest = {{"mode", to_string(cfg.mode)}, {"seed", cfg.seed},       {"config", to_text(cfg)},
                       {"versions", versions()},       {"wall_time_s", wall},    {"summary", summary},
                       {"files", files}};
  std::ofstream mf(out.dir() / "manifest.json");
  mf << manifest.dump(2) << "\n";
  return manifest;
}

}  // namespace autochemo
