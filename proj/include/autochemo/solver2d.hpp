#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace autochemo {

struct ParticleEnsemble {
  std::vector<double> x, y, theta;
  std::uint64_t seed = 0;

  std::size_t size() const { return x.size(); }
};

struct SimState2D {
  ParticleEnsemble particles;
  Field2D c;
  double t = 0.0;
  double dt = 0.2;
  double rho_d = 0.0;
  long step = 0;
};

enum class Interp { Bilinear, Spline };

struct Solver2DOptions {
  double K = 3.0;          // kernel variance factor, sigma^2 = K dt d1
  double cutoff = 5.0;     // truncation radius in kernel standard deviations
  Interp interp = Interp::Bilinear;
  int chunks = 64;         // fixed deposition partition, independent of thread count
};

// RNG streams
enum : std::uint32_t { kStreamTumble = 0, kStreamInit = 1 };

inline double wrap(double v, double ell) {
  double w = v - ell * std::floor(v / ell);
  return w >= ell ? 0.0 : w;
}

// probability of tumbling during dt, clamped into [0, 1]
inline double tumble_probability(double heading, double gx, double gy, double delta, double dt,
                                 long* clamped = nullptr) {
  double e = std::cos(heading) * gx + std::sin(heading) * gy;
  double denom = std::sqrt(e * e + delta * delta);
  double ratio = denom > 0 ? e / denom : 0.0;
  double p = 0.5 * (1.0 - ratio) * dt;
  if (p < 0.0 || p > 1.0) {
    if (clamped) ++*clamped;
    p = std::clamp(p, 0.0, 1.0);
  }
  return p;
}

inline ParticleEnsemble uniform_ensemble(std::size_t np, double ell, std::uint64_t seed) {
  ParticleEnsemble e;
  e.seed = seed;
  e.x.resize(np);
  e.y.resize(np);
  e.theta.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    CounterRng rng(seed, i, 0, kStreamInit);
    e.x[i] = wrap(ell * rng.uniform(), ell);
    e.y[i] = wrap(ell * rng.uniform(), ell);
    e.theta[i] = 2.0 * M_PI * rng.uniform();
  }
  return e;
}

inline double bilinear(const std::vector<double>& v, const Mesh2D& m, double x, double y) {
  double h = m.spacing();
  double fx = x / h, fy = y / h;
  int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
  double ax = fx - i0, ay = fy - j0;
  int n = m.n;
  i0 = ((i0 % n) + n) % n;
  j0 = ((j0 % n) + n) % n;
  int i1 = (i0 + 1) % n, j1 = (j0 + 1) % n;
  return (1 - ax) * ((1 - ay) * v[m.at(i0, j0)] + ay * v[m.at(i0, j1)]) +
         ax * ((1 - ay) * v[m.at(i1, j0)] + ay * v[m.at(i1, j1)]);
}

// Periodic cubic B-spline coefficients whose spline interpolates v at the nodes.
inline std::vector<double> spline_coefficients(const std::vector<double>& v, Spectral2D& spec) {
  const Mesh2D& m = spec.mesh();
  std::vector<cplx> hat;
  spec.forward(v, hat);
  auto b = [&](int idx) { return (4.0 + 2.0 * std::cos(2.0 * M_PI * idx / m.n)) / 6.0; };
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < spec.half_n(); ++j) hat[spec.hidx(i, j)] /= b(i) * b(j);
  std::vector<double> out;
  spec.inverse(hat, out);
  return out;
}

inline double spline_eval(const std::vector<double>& coef, const Mesh2D& m, double x, double y) {
  double h = m.spacing();
  double fx = x / h, fy = y / h;
  int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
  double tx = fx - i0, ty = fy - j0;
  auto weights = [](double t, double w[4]) {
    double s = 1.0 - t;
    w[0] = s * s * s / 6.0;
    w[1] = (3 * t * t * t - 6 * t * t + 4) / 6.0;
    w[2] = (-3 * t * t * t + 3 * t * t + 3 * t + 1) / 6.0;
    w[3] = t * t * t / 6.0;
  };
  double wx[4], wy[4];
  weights(tx, wx);
  weights(ty, wy);
  int n = m.n;
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    int ii = (((i0 + a - 1) % n) + n) % n;
    double row = 0.0;
    for (int b = 0; b < 4; ++b) {
      int jj = (((j0 + b - 1) % n) + n) % n;
      row += wy[b] * coef[m.at(ii, jj)];
    }
    acc += wx[a] * row;
  }
  return acc;
}

// Sum of S_i/(4 pi s^2) exp(-r^2/(4 s^2)) over particles, minimum-image
// wrapped and truncated at `cutoff` standard deviations (sqrt(2) s).
class Depositor {
 public:
  Depositor(Mesh2D mesh, double sigma2, double cutoff, int chunks)
      : mesh_(mesh), sigma2_(sigma2), chunks_(std::max(1, chunks)) {
    if (!(sigma2 > 0)) throw std::invalid_argument("deposition kernel needs sigma^2 > 0");
    double h = mesh.spacing();
    rcut_ = cutoff * std::sqrt(2.0 * sigma2);
    reach_ = std::min(int(std::ceil(rcut_ / h)), (mesh.n - 1) / 2);
    grids_.assign(std::size_t(chunks_), std::vector<double>(mesh.size(), 0.0));
  }

  double rcut() const { return rcut_; }
  double sigma2() const { return sigma2_; }

  void deposit(const std::vector<double>& px, const std::vector<double>& py, const std::vector<double>& S,
               std::vector<double>& out) {
    const std::size_t np = px.size();
    const int chunks = int(std::min<std::size_t>(std::size_t(chunks_), std::max<std::size_t>(np, 1)));
#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < chunks; ++ch) {
      auto& g = grids_[ch];
      std::fill(g.begin(), g.end(), 0.0);
      std::size_t lo = np * ch / chunks, hi = np * (ch + 1) / chunks;
      std::vector<double> wx(2 * reach_ + 1), wy(2 * reach_ + 1), ey(2 * reach_ + 1);
      for (std::size_t p = lo; p < hi; ++p) splat(px[p], py[p], S[p], g, wx, wy, ey);
    }
    out.assign(mesh_.size(), 0.0);
    for (int ch = 0; ch < chunks; ++ch) {
      const auto& g = grids_[ch];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i];
    }
  }

 private:
  void splat(double x, double y, double S, std::vector<double>& g, std::vector<double>& wx,
             std::vector<double>& wy, std::vector<double>& ey) const {
    const double h = mesh_.spacing();
    const int n = mesh_.n;
    const double inv4s2 = 1.0 / (4.0 * sigma2_);
    const double amp = S / (4.0 * M_PI * sigma2_);
    const double rc2 = rcut_ * rcut_;
    int ic = int(std::lround(x / h)), jc = int(std::lround(y / h));
    for (int a = -reach_; a <= reach_; ++a) {
      double dx = (ic + a) * h - x;
      wx[a + reach_] = dx;
    }
    for (int b = -reach_; b <= reach_; ++b) {
      double dy = (jc + b) * h - y;
      wy[b + reach_] = dy;
      ey[b + reach_] = std::exp(-dy * dy * inv4s2);
    }
    for (int a = -reach_; a <= reach_; ++a) {
      double dx = wx[a + reach_];
      double ex = amp * std::exp(-dx * dx * inv4s2);
      int ii = (((ic + a) % n) + n) % n;
      double* row = g.data() + std::size_t(ii) * n;
      for (int b = -reach_; b <= reach_; ++b) {
        double dy = wy[b + reach_];
        double r2 = dx * dx + dy * dy;
        if (r2 > rc2) continue;
        int jj = (((jc + b) % n) + n) % n;
        row[jj] += ex * ey[b + reach_];
      }
    }
  }

  Mesh2D mesh_;
  double sigma2_, rcut_;
  int reach_;
  int chunks_;
  std::vector<std::vector<double>> grids_;
};

inline Field2D deposit_chemical(const ParticleEnsemble& e, const std::vector<double>& S, const Mesh2D& mesh,
                                double sigma2, double cutoff = 5.0, int chunks = 64) {
  Depositor d(mesh, sigma2, cutoff, chunks);
  Field2D out(mesh);
  d.deposit(e.x, e.y, S, out.values);
  return out;
}

// One CN step of c_t = d1 lap c - d2 c + rho_d * source.
inline void step_chemical(std::vector<double>& c, const std::vector<double>& source, double d1, double d2,
                          double dt, double rho_d, Spectral2D& spec, std::vector<cplx>& chat,
                          std::vector<cplx>& shat) {
  spec.forward(c, chat);
  spec.forward(source, shat);
  for (int i = 0; i < spec.mesh().n; ++i)
    for (int j = 0; j < spec.half_n(); ++j) {
      std::size_t q = spec.hidx(i, j);
      double L = -d1 * spec.k2(i, j) - d2;
      chat[q] = ((1.0 + 0.5 * dt * L) * chat[q] + dt * rho_d * shat[q]) / (1.0 - 0.5 * dt * L);
    }
  spec.inverse(chat, c);
}

inline Field2D step_chemical(const Field2D& c, const Field2D& source, const NonDimParams& p, double dt,
                             double rho_d) {
  Spectral2D spec(c.mesh);
  std::vector<cplx> a, b;
  Field2D out = c;
  step_chemical(out.values, source.values, p.d1, p.d2, dt, rho_d, spec, a, b);
  return out;
}

struct StepStats {
  long tumbles = 0;
  long clamped = 0;
};

class Simulation2D {
 public:
  Simulation2D(const NonDimParams& p, const DepositionFn& f, Mesh2D mesh, std::size_t np, double dt,
               std::uint64_t seed, Solver2DOptions o = {})
      : p_(p),
        f_(f),
        opt_(o),
        spec_(mesh),
        dep_(mesh, o.K * dt * p.d1, o.cutoff, o.chunks) {
    p_.validate();
    f_.validate();
    if (np == 0) throw std::invalid_argument("need at least one particle");
    if (!(dt > 0) || dt > 1.0) throw std::invalid_argument("dt must be in (0, 1] so the tumble probability stays <= 1");
    if (std::abs(mesh.ell - p.ell) > 1e-12 * p.ell) throw std::invalid_argument("mesh length differs from ell");
    state_.particles = uniform_ensemble(np, p.ell, seed);
    state_.c = Field2D(mesh, p.cbar);
    state_.dt = dt;
    state_.rho_d = steady_density(p, f) * p.ell * p.ell / double(np);
    S_.resize(np);
  }

  SimState2D& state() { return state_; }
  const SimState2D& state() const { return state_; }
  const StepStats& last_stats() const { return stats_; }
  long total_clamped() const { return clamped_total_; }
  double sigma2() const { return dep_.sigma2(); }
  const std::vector<double>& strengths() const { return S_; }
  const std::vector<double>& source() const { return source_; }

  // tumble, move, and evaluate S_i = f(c^n(x^{n+1}))
  void advance_particles() {
    auto& e = state_.particles;
    const Mesh2D& mesh = state_.c.mesh;
    spec_.gradient(state_.c.values, gx_, gy_);
    const std::vector<double>* cfield = &state_.c.values;
    if (opt_.interp == Interp::Spline) {
      coef_ = spline_coefficients(state_.c.values, spec_);
      cfield = &coef_;
    }
    const double dt = state_.dt, ell = p_.ell, delta = p_.delta;
    const std::uint32_t stepctr = std::uint32_t(++moves_);
    long tumbles = 0, clamped = 0;
    const long np = long(e.size());
#pragma omp parallel for schedule(static) reduction(+ : tumbles, clamped)
    for (long i = 0; i < np; ++i) {
      CounterRng rng(e.seed, std::uint64_t(i), stepctr, kStreamTumble);
      double gx = bilinear(gx_, mesh, e.x[i], e.y[i]);
      double gy = bilinear(gy_, mesh, e.x[i], e.y[i]);
      double pt = tumble_probability(e.theta[i], gx, gy, delta, dt, &clamped);
      double u = rng.uniform();
      double v = rng.uniform();
      if (u < pt) {
        e.theta[i] = 2.0 * M_PI * v;
        ++tumbles;
      }
      e.x[i] = wrap(e.x[i] + dt * std::cos(e.theta[i]), ell);
      e.y[i] = wrap(e.y[i] + dt * std::sin(e.theta[i]), ell);
      double cv = opt_.interp == Interp::Spline ? spline_eval(*cfield, mesh, e.x[i], e.y[i])
                                                : bilinear(*cfield, mesh, e.x[i], e.y[i]);
      S_[i] = f_(cv);
    }
    stats_.tumbles = tumbles;
    stats_.clamped = clamped;
    clamped_total_ += clamped;
  }

  void step() {
    advance_particles();
    dep_.deposit(state_.particles.x, state_.particles.y, S_, source_);
    step_chemical(state_.c.values, source_, p_.d1, p_.d2, state_.dt, state_.rho_d, spec_, chat_, shat_);
    ++state_.step;
    state_.t = state_.step * state_.dt;
    for (double v : state_.c.values)
      if (!std::isfinite(v)) throw std::runtime_error("chemical field is not finite at t = " + std::to_string(state_.t));
  }

  void advance(long steps) {
    for (long i = 0; i < steps; ++i) step();
  }

 private:
  NonDimParams p_;
  DepositionFn f_;
  Solver2DOptions opt_;
  Spectral2D spec_;
  Depositor dep_;
  SimState2D state_;
  StepStats stats_;
  long clamped_total_ = 0;
  long moves_ = 0;  // RNG step counter, one per advance_particles call
  std::vector<double> S_, gx_, gy_, coef_, source_;
  std::vector<cplx> chat_, shat_;
};

}  // namespace autochemo
