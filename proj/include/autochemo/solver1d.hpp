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

struct State1D {
  Field1D rho;
  Field1D rho_prev;
  Field1D c;
  double t = 0.0;
  double dt = 0.004;
  long step = 0;
};

struct BlowUp : std::runtime_error {
  double t;
  BlowUp(double t_, const std::string& what) : std::runtime_error(what), t(t_) {}
};

// Constant steady state plus a zero-mean perturbation on rho whose largest
// magnitude is `amplitude`.
inline State1D init_perturbed_steady(const NonDimParams& p, const DepositionFn& f, const Mesh1D& mesh,
                                     double dt, std::uint64_t seed, double amplitude) {
  if (!(amplitude >= 0)) throw std::invalid_argument("perturbation amplitude must be >= 0");
  double rho_bar = steady_density(p, f);
  State1D s{Field1D(mesh, rho_bar), Field1D(mesh, rho_bar), Field1D(mesh, p.cbar), 0.0, dt, 0};
  if (amplitude > 0) {
    std::vector<double> u(mesh.n);
    for (int i = 0; i < mesh.n; ++i) {
      CounterRng rng(seed, std::uint64_t(i), 0, 1);
      u[i] = 2.0 * rng.uniform() - 1.0;
    }
    double m = mean(u);
    double big = 0.0;
    for (double& x : u) {
      x -= m;
      big = std::max(big, std::abs(x));
    }
    for (int i = 0; i < mesh.n; ++i) s.rho[i] += amplitude * u[i] / big;
  }
  s.rho_prev = s.rho;
  return s;
}

// rho = rho_bar + amplitude cos(2 pi mode x / ell)
inline State1D init_cosine(const NonDimParams& p, const DepositionFn& f, const Mesh1D& mesh, double dt,
                           int mode, double amplitude) {
  double rho_bar = steady_density(p, f);
  State1D s{Field1D(mesh, rho_bar), Field1D(mesh, rho_bar), Field1D(mesh, p.cbar), 0.0, dt, 0};
  for (int i = 0; i < mesh.n; ++i) s.rho[i] += amplitude * std::cos(2.0 * M_PI * mode * mesh.x(i) / mesh.ell);
  s.rho_prev = s.rho;
  return s;
}

struct Solver1DOptions {
  bool dealias = false;
  double blowup_bound = 1e8;
};

// Crank-Nicolson (c) and damped leapfrog (rho) stepper; owns its transforms.
class Solver1D {
 public:
  Solver1D(const NonDimParams& p, const DepositionFn& f, const Mesh1D& mesh, Solver1DOptions o = {})
      : p_(p), f_(f), spec_(mesh), opt_(o) {
    p_.validate();
    f_.validate();
  }

  void step(State1D& s) {
    const int n = spec_.mesh().n;
    const double dt = s.dt;
    const auto& k = spec_.half_k();

    // Fields are split as u[0] + (u - u[0]) before transforming, so a constant
    // state never picks up FFT round-off in k != 0 modes and stays a fixed point.
    // chemical: CN on d1 c_xx - d2 c, explicit deposition f(c^n) rho^n
    const double c0 = s.c[0];
    const double s0 = f_(c0) * s.rho[0];
    for (int i = 0; i < n; ++i) work_[i] = f_(s.c[i]) * s.rho[i] - s0;
    spec_.forward(work_, shat_);
    for (int i = 0; i < n; ++i) cdev_[i] = s.c[i] - c0;
    spec_.forward(cdev_, chat_);
    for (std::size_t m = 0; m < chat_.size(); ++m) {
      double L = -p_.d1 * k[m] * k[m] - p_.d2;
      chat_[m] = ((1.0 + 0.5 * dt * L) * chat_[m] + dt * shat_[m]) / (1.0 - 0.5 * dt * L);
    }
    const double c0_next = ((1.0 - 0.5 * dt * p_.d2) * c0 + dt * s0) / (1.0 + 0.5 * dt * p_.d2);

    // density flux uses c^n
    spec_.derivative(cdev_, 1, cx_);
    for (int i = 0; i < n; ++i) {
      double g = cx_[i];
      double ratio = p_.delta > 0 ? g / std::sqrt(g * g + p_.delta * p_.delta) : (g > 0) - (g < 0);
      work_[i] = ratio * s.rho[i];
    }
    spec_.forward(work_, shat_);
    if (opt_.dealias) spec_.dealias(shat_);
    spec_.apply_derivative(shat_, 1);
    for (int i = 0; i < n; ++i) cdev_[i] = s.rho[i] - s.rho[0];
    spec_.forward(cdev_, rhat_);
    spec_.apply_derivative(rhat_, 2);
    for (std::size_t m = 0; m < rhat_.size(); ++m) rhat_[m] -= shat_[m];
    spec_.inverse(rhat_, rhs_);

    const double dt2 = dt * dt;
    const double denom = 1.0 + 0.5 * dt;
    for (int i = 0; i < n; ++i) {
      double next = (2.0 * s.rho[i] + s.rho_prev[i] * (0.5 * dt - 1.0) + dt2 * rhs_[i]) / denom;
      s.rho_prev[i] = s.rho[i];
      s.rho[i] = next;
    }
    spec_.inverse(chat_, s.c.values);
    for (int i = 0; i < n; ++i) s.c[i] += c0_next;

    ++s.step;
    s.t = s.step * dt;
    check(s);
  }

  void advance(State1D& s, long steps) {
    for (long i = 0; i < steps; ++i) step(s);
  }

  Spectral1D& spectral() { return spec_; }

 private:
  void check(const State1D& s) const {
    for (int i = 0; i < spec_.mesh().n; ++i) {
      double a = s.rho[i], b = s.c[i];
      if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > opt_.blowup_bound ||
          std::abs(b) > opt_.blowup_bound)
        throw BlowUp(s.t, "1D solution blew up at t = " + std::to_string(s.t));
    }
  }

  NonDimParams p_;
  DepositionFn f_;
  Spectral1D spec_;
  Solver1DOptions opt_;
  std::vector<double> work_ = std::vector<double>(spec_.mesh().n), cdev_ = work_, cx_, rhs_;
  std::vector<cplx> chat_, shat_, rhat_;
};

inline State1D step(State1D s, const NonDimParams& p, const DepositionFn& f) {
  Solver1D solver(p, f, s.rho.mesh);
  solver.step(s);
  return s;
}

inline double total_mass(const Field1D& u) { return mean(u.values) * u.mesh.ell; }

// delta = 0 steady state: exponentials stitched at ell/2, normalized to rho_bar ell
inline Field1D analytic_steady_state(double rho_bar, const Mesh1D& mesh) {
  double ell = mesh.ell;
  double A0 = rho_bar * ell / (2.0 * (std::exp(0.5 * ell) - 1.0));
  Field1D out(mesh);
  for (int i = 0; i < mesh.n; ++i) {
    double x = mesh.x(i);
    out[i] = x <= 0.5 * ell ? A0 * std::exp(x) : A0 * std::exp(-(x - ell));
  }
  return out;
}

inline Field1D analytic_steady_state(const NonDimParams& p, const DepositionFn& f, const Mesh1D& mesh) {
  return analytic_steady_state(steady_density(p, f), mesh);
}

}  // namespace autochemo
