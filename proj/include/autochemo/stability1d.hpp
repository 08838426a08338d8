#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "params.hpp"
#include "search.hpp"

namespace autochemo {

// lambda^3 + a2 lambda^2 + a1 lambda + a0 = 0 for the linearized 1D system
struct CubicDispersion {
  double d1, d2, d3, cbar, delta;

  static CubicDispersion from(const NonDimParams& p, const DepositionFn& f) {
    if (!(p.delta > 0)) throw std::invalid_argument("linear stability needs delta > 0");
    return {p.d1, p.d2, d3_coefficient(p, f), p.cbar, p.delta};
  }

  std::array<double, 3> coefficients(double k) const {
    double k2 = k * k;
    return {d1 * k2 - d3 + 1.0, (d1 + 1.0) * k2 - d3, k2 * (d1 * k2 - d3 - cbar * d2 / delta)};
  }

  std::complex<double> polynomial(std::complex<double> lam, double k) const {
    auto a = coefficients(k);
    return ((lam + a[0]) * lam + a[1]) * lam + a[2];
  }

  // default upper end of the k_u search
  double default_kmax() const {
    double s = (d3 + cbar * d2 / delta) / d1;
    return 10.0 * std::max(1.0, s > 0 ? std::sqrt(s) : 0.0);
  }
};

// Roots from the companion matrix, then a few Newton steps each.
inline std::array<std::complex<double>, 3> eigenvalues_at(const CubicDispersion& disp, double k) {
  auto a = disp.coefficients(k);
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  C(0, 0) = -a[0];
  C(0, 1) = -a[1];
  C(0, 2) = -a[2];
  C(1, 0) = 1.0;
  C(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
  std::array<std::complex<double>, 3> roots;
  for (int i = 0; i < 3; ++i) roots[i] = es.eigenvalues()[i];

  for (auto& r : roots) {
    for (int it = 0; it < 4; ++it) {
      std::complex<double> p = disp.polynomial(r, k);
      std::complex<double> dp = (3.0 * r + 2.0 * a[0]) * r + a[1];
      if (p == 0.0 || std::abs(dp) < 1e-300) break;
      std::complex<double> next = r - p / dp;
      if (std::abs(disp.polynomial(next, k)) >= std::abs(p)) break;
      r = next;
    }
  }
  std::sort(roots.begin(), roots.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return roots;
}

inline double R(const CubicDispersion& disp, double k) {
  auto r = eigenvalues_at(disp, k);
  return std::max({r[0].real(), r[1].real(), r[2].real()});
}

struct SpectrumCurve {
  std::vector<double> k_values;
  std::vector<double> R_values;
};

inline SpectrumCurve dispersion_curve(const CubicDispersion& disp, double kmax, int n) {
  SpectrumCurve c;
  for (int i = 0; i < n; ++i) {
    double k = kmax * i / (n - 1);
    c.k_values.push_back(k);
    c.R_values.push_back(R(disp, k));
  }
  return c;
}

inline PeakResult most_unstable_wavenumber(const CubicDispersion& disp, double kmax = 0.0,
                                           double tol = 1e-8, int n_coarse = 400) {
  if (kmax <= 0) kmax = disp.default_kmax();
  // log-spaced over six decades below kmax
  std::vector<double> ks(n_coarse), Rs(n_coarse);
  double lo = std::log(kmax * 1e-6), hi = std::log(kmax);
  for (int i = 0; i < n_coarse; ++i) {
    ks[i] = std::exp(lo + (hi - lo) * i / (n_coarse - 1));
    Rs[i] = R(disp, ks[i]);
  }
  ks.back() = kmax;
  auto g = [&](double k) { return R(disp, k); };
  return refine_peak(g, ks, Rs, std::max(0.0, disp.d3), tol);
}

// Closed-form bounds on d3 for an interior maximum. The upper one is looser
// than interior_max_upper_bound below.
inline std::pair<double, double> proposition2_bounds(const NonDimParams& p) {
  double lower = -p.cbar * p.d2 / p.delta;
  double upper = (1.0 + std::sqrt(1.0 + 4.0 * p.cbar * p.d1 * p.d2 / p.delta)) / (2.0 * p.d1);
  return {lower, upper};
}

// Upper bound on d3 > 0 from the small-k expansion of the cubic with every
// term kept. The branch leaving lambda = d3 moves as lambda = d3 + a k^2 with
// a = (cbar d2/delta - d1 d3^2 - d1 d3) / (d3 (d3 + 1)), so it grows past d3
// only while d1 d3 (d3 + 1) < cbar d2 / delta.
inline double interior_max_upper_bound(const NonDimParams& p) {
  return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * p.cbar * p.d2 / (p.d1 * p.delta)));
}

struct RegionCell {
  double d1, d2;
  bool unstable;
  double k_u;  // NaN when no interior maximum
};

struct RegionMap {
  std::vector<RegionCell> cells;  // d1-major
  int warnings = 0;
};

inline RegionMap stability_region(const std::vector<double>& d1s, const std::vector<double>& d2s,
                                  const NonDimParams& base, const DepositionFn& f) {
  RegionMap map;
  map.cells.resize(d1s.size() * d2s.size());
  double k_min = 2.0 * M_PI / base.ell;
  int warnings = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : warnings)
  for (long idx = 0; idx < long(map.cells.size()); ++idx) {
    NonDimParams p = base;
    p.d1 = d1s[idx / d2s.size()];
    p.d2 = d2s[idx % d2s.size()];
    RegionCell cell{p.d1, p.d2, false, std::nan("")};
    try {
      auto pk = most_unstable_wavenumber(CubicDispersion::from(p, f));
      if (pk.found) {
        cell.k_u = pk.k;
        cell.unstable = pk.k >= k_min;
      }
    } catch (const std::exception&) {
      ++warnings;
    }
    map.cells[idx] = cell;
  }
  map.warnings = warnings;
  return map;
}

}  // namespace autochemo
