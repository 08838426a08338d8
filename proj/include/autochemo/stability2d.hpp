#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "params.hpp"
#include "search.hpp"

namespace autochemo {

// Truncated Fourier-in-angle linearization about (cbar, rho_bar). Unknowns are
// ordered h_{-N} .. h_{-1}, h_0, M, h_1 .. h_N.
struct TruncatedOperator {
  int N;
  double k1, k2;
  Eigen::MatrixXcd A;

  int size() const { return 2 * N + 2; }
  static int h(int j, int N) { return j <= 0 ? N + j : N + 1 + j; }
  static int m(int N) { return N + 1; }
};

// kernel_sigma2 is the variance parameter s^2 of a deposition kernel
// exp(-r^2/(4 s^2)); it damps the deposition terms by exp(-s^2 |k|^2).
// Zero gives the point-source operator.
inline TruncatedOperator build_operator(const NonDimParams& p, const DepositionFn& f, double k1, double k2,
                                        int N, double kernel_sigma2 = 0.0) {
  if (N < 2) throw std::invalid_argument("truncation order N must be >= 2");
  if (!(p.delta > 0)) throw std::invalid_argument("linear stability needs delta > 0");
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  double rho = steady_density(p, f);
  double psi = rho / (2.0 * M_PI);
  double kk = k1 * k1 + k2 * k2;
  double g = std::exp(-kernel_sigma2 * kk);
  C w(k1, k2), wb = std::conj(w);

  TruncatedOperator op{N, k1, k2, Eigen::MatrixXcd::Zero(2 * N + 2, 2 * N + 2)};
  auto& A = op.A;
  for (int j = -N; j <= N; ++j) {
    int r = TruncatedOperator::h(j, N);
    A(r, r) = j == 0 ? C(0.0) : C(-0.5);
    if (j > -N) A(r, TruncatedOperator::h(j - 1, N)) = I * wb / 2.0;
    if (j < N) A(r, TruncatedOperator::h(j + 1, N)) = I * w / 2.0;
  }
  int mi = TruncatedOperator::m(N);
  A(TruncatedOperator::h(1, N), mi) = -psi * I * wb / (4.0 * p.delta);
  A(TruncatedOperator::h(-1, N), mi) = -psi * I * w / (4.0 * p.delta);
  A(mi, TruncatedOperator::h(0, N)) = 2.0 * M_PI * f(p.cbar) * g;
  A(mi, mi) = rho * f.derivative(p.cbar) * g - p.d2 - p.d1 * kk;
  return op;
}

inline Eigen::VectorXcd operator_spectrum(const TruncatedOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.A, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver did not converge at k = (" + std::to_string(op.k1) + ", " +
                             std::to_string(op.k2) + "), N = " + std::to_string(op.N));
  return es.eigenvalues();
}

// For k = (K, 0) the operator is similar, via diag(i^j) on h_j, to a real
// matrix; that one is handed to the real eigensolver.
inline Eigen::MatrixXd real_form(const NonDimParams& p, const DepositionFn& f, double K, int N,
                                 double kernel_sigma2 = 0.0) {
  if (N < 2) throw std::invalid_argument("truncation order N must be >= 2");
  if (!(p.delta > 0)) throw std::invalid_argument("linear stability needs delta > 0");
  double rho = steady_density(p, f);
  double psi = rho / (2.0 * M_PI);
  double g = std::exp(-kernel_sigma2 * K * K);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * N + 2, 2 * N + 2);
  for (int j = -N; j <= N; ++j) {
    int r = TruncatedOperator::h(j, N);
    B(r, r) = j == 0 ? 0.0 : -0.5;
    if (j > -N) B(r, TruncatedOperator::h(j - 1, N)) = 0.5 * K;
    if (j < N) B(r, TruncatedOperator::h(j + 1, N)) = -0.5 * K;
  }
  int mi = TruncatedOperator::m(N);
  B(TruncatedOperator::h(1, N), mi) = -psi * K / (4.0 * p.delta);
  B(TruncatedOperator::h(-1, N), mi) = psi * K / (4.0 * p.delta);
  B(mi, TruncatedOperator::h(0, N)) = 2.0 * M_PI * f(p.cbar) * g;
  B(mi, mi) = rho * f.derivative(p.cbar) * g - p.d2 - p.d1 * K * K;
  return B;
}

struct SpectrumCurve2D {
  std::vector<double> kmag;
  std::vector<double> R;
};

inline double R_N(const NonDimParams& p, const DepositionFn& f, double kmag, int N,
                  double kernel_sigma2 = 0.0) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(real_form(p, f, kmag, N, kernel_sigma2), false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver did not converge at |k| = " + std::to_string(kmag) +
                             ", N = " + std::to_string(N));
  return es.eigenvalues().real().maxCoeff();
}

inline SpectrumCurve2D R_N_curve(const NonDimParams& p, const DepositionFn& f, double kmax, int n, int N,
                                 double kernel_sigma2 = 0.0) {
  SpectrumCurve2D c{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) c.kmag[i] = kmax * i / (n - 1);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) c.R[i] = R_N(p, f, c.kmag[i], N, kernel_sigma2);
  return c;
}

struct Search2DOptions {
  int N = 100;
  double kmax = 20.0;
  int n_coarse = 400;
  double tol = 1e-6;
  double kernel_sigma2 = 0.0;
};

inline PeakResult most_unstable_wavenumber_2d(const NonDimParams& p, const DepositionFn& f,
                                              const Search2DOptions& o = {}) {
  std::vector<double> ks(o.n_coarse), Rs(o.n_coarse);
  for (int i = 0; i < o.n_coarse; ++i) ks[i] = o.kmax * (i + 1) / o.n_coarse;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < o.n_coarse; ++i) Rs[i] = R_N(p, f, ks[i], o.N, o.kernel_sigma2);
  double baseline = std::max(0.0, d3_coefficient(p, f));
  auto g = [&](double k) { return R_N(p, f, k, o.N, o.kernel_sigma2); };
  return refine_peak(g, ks, Rs, baseline, o.tol);
}


struct RegionCell2D {
  double d1, d2;
  bool unstable;
  double K_u;  // NaN when no interior maximum
};

struct RegionMap2D {
  std::vector<RegionCell2D> cells;  // d1-major
  int warnings = 0;
};

inline RegionMap2D stability_region_2d(const std::vector<double>& d1s, const std::vector<double>& d2s,
                                       const NonDimParams& base, const DepositionFn& f,
                                       const Search2DOptions& o = {}) {
  RegionMap2D map;
  map.cells.resize(d1s.size() * d2s.size());
  double k_min = 2.0 * M_PI / base.ell;
  int warnings = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : warnings)
  for (long idx = 0; idx < long(map.cells.size()); ++idx) {
    NonDimParams p = base;
    p.d1 = d1s[idx / d2s.size()];
    p.d2 = d2s[idx % d2s.size()];
    RegionCell2D cell{p.d1, p.d2, false, std::nan("")};
    try {
      auto pk = most_unstable_wavenumber_2d(p, f, o);
      if (pk.found) {
        cell.K_u = pk.k;
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
