#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "solver2d.hpp"
#include "spectral.hpp"

namespace autochemo {

struct SpectrumPoint {
  double k;
  double E;  // Re of the transform coefficient, divided by the point count
};

// FFT order, so E at k = 0 is the spatial mean
inline std::vector<SpectrumPoint> spectrum_1d(const Field1D& c) {
  auto full = full_spectrum(c);
  auto k = wavenumbers(c.mesh);
  std::vector<SpectrumPoint> out(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) out[i] = {k[i], full[i].real() / c.mesh.n};
  return out;
}

struct RadialBin {
  double kmag;    // bin centre, index * 2 pi / ell
  double re;      // mean Re E over the annulus
  double power;   // mean |E|^2 over the annulus
  int count;
};

struct Spectrum2D {
  int n;
  double ell;
  std::vector<cplx> coeff;  // full n x n, FFT order, normalized by n^2
  std::vector<RadialBin> radial;

  double re(int i, int j) const { return coeff[std::size_t(i) * n + j].real(); }
};

inline Spectrum2D spectrum_2d(const Field2D& c) {
  const int n = c.mesh.n;
  RealFft fft({n, n});
  const int nh = n / 2 + 1;
  std::vector<cplx> half(fft.complex_size());
  fft.forward(c.values.data(), half.data());
  Spectrum2D s{n, c.mesh.ell, std::vector<cplx>(std::size_t(n) * n), {}};
  const double norm = 1.0 / (double(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = j < nh ? half[std::size_t(i) * nh + j] : std::conj(half[std::size_t((n - i) % n) * nh + (n - j)]);
      s.coeff[std::size_t(i) * n + j] = v * norm;
    }
  const double dk = 2.0 * M_PI / c.mesh.ell;
  int nbins = int(std::ceil(std::sqrt(2.0) * (n / 2))) + 2;
  std::vector<double> re(nbins, 0.0), pw(nbins, 0.0);
  std::vector<int> cnt(nbins, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double kx = fft_index(i, n), ky = fft_index(j, n);
      int b = int(std::lround(std::sqrt(kx * kx + ky * ky)));
      cplx v = s.coeff[std::size_t(i) * n + j];
      re[b] += v.real();
      pw[b] += std::norm(v);
      ++cnt[b];
    }
  for (int b = 0; b < nbins; ++b)
    if (cnt[b] > 0) s.radial.push_back({b * dk, re[b] / cnt[b], pw[b] / cnt[b], cnt[b]});
  return s;
}

inline double total_chemical(const Field1D& c) { return mean(c.values) * c.mesh.ell; }
inline double total_chemical(const Field2D& c) { return mean(c.values) * c.mesh.ell * c.mesh.ell; }

inline double max_min_chemical(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}
inline double max_min_chemical(const Field1D& c) { return max_min_chemical(c.values); }
inline double max_min_chemical(const Field2D& c) { return max_min_chemical(c.values); }

// local maxima of a periodic profile above `threshold`; plateaus count once
inline int count_peaks(const std::vector<double>& v, double threshold) {
  const int n = int(v.size());
  int peaks = 0;
  for (int i = 0; i < n; ++i) {
    double prev = v[(i - 1 + n) % n];
    if (!(v[i] > prev) || !(v[i] > threshold)) continue;
    int j = (i + 1) % n;
    int guard = 0;
    while (v[j] == v[i] && guard++ < n) j = (j + 1) % n;
    if (v[j] < v[i]) ++peaks;
  }
  return peaks;
}

struct RdfHistogram {
  std::vector<double> bin_edges;
  std::vector<double> g_values;
  std::uint64_t n_pairs = 0;  // ordered pairs within r_max
};

enum class RdfMethod { Auto, Naive, CellList };

inline RdfHistogram rdf(const ParticleEnsemble& e, double ell, double bin_width = 0.05, double r_max = 5.0,
                        RdfMethod method = RdfMethod::Auto) {
  if (!(bin_width > 0)) throw std::invalid_argument("rdf bin width must be > 0");
  if (r_max > 0.5 * ell) throw std::invalid_argument("rdf r_max must not exceed ell/2");
  const int nb = int(std::ceil(r_max / bin_width - 1e-12));
  const std::size_t N = e.size();
  const double rm2 = r_max * r_max;
  auto mimg = [ell](double d) {
    if (d > 0.5 * ell) return d - ell;
    if (d < -0.5 * ell) return d + ell;
    return d;
  };
  std::vector<std::uint64_t> counts(nb, 0);
  auto tally = [&](std::size_t i, std::size_t j, std::vector<std::uint64_t>& h) {
    double dx = mimg(e.x[i] - e.x[j]), dy = mimg(e.y[i] - e.y[j]);
    double r2 = dx * dx + dy * dy;
    if (r2 >= rm2) return;
    int b = int(std::sqrt(r2) / bin_width);
    if (b < nb) ++h[b];
  };

  int nc = int(std::floor(ell / r_max));
  if (method == RdfMethod::CellList && nc < 3) throw std::invalid_argument("cell list needs r_max <= ell/3");
  if (method == RdfMethod::CellList || (method == RdfMethod::Auto && nc >= 3)) {
    // cell list; each cell scans itself and its 8 neighbours
    const double side = ell / nc;
    std::vector<std::vector<std::size_t>> cells(std::size_t(nc) * nc);
    for (std::size_t i = 0; i < N; ++i) {
      int cx = std::min(nc - 1, int(e.x[i] / side)), cy = std::min(nc - 1, int(e.y[i] / side));
      cells[std::size_t(cx) * nc + cy].push_back(i);
    }
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(nb, 0);
#pragma omp for schedule(dynamic)
      for (long c = 0; c < long(cells.size()); ++c) {
        int cx = int(c / nc), cy = int(c % nc);
        for (int ax = -1; ax <= 1; ++ax)
          for (int ay = -1; ay <= 1; ++ay) {
            const auto& other = cells[std::size_t((cx + ax + nc) % nc) * nc + (cy + ay + nc) % nc];
            for (std::size_t i : cells[c])
              for (std::size_t j : other)
                if (i != j) tally(i, j, local);
          }
      }
#pragma omp critical
      for (int b = 0; b < nb; ++b) counts[b] += local[b];
    }
  } else {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(nb, 0);
#pragma omp for schedule(dynamic, 64)
      for (long i = 0; i < long(N); ++i)
        for (std::size_t j = std::size_t(i) + 1; j < N; ++j) tally(std::size_t(i), j, local);
#pragma omp critical
      for (int b = 0; b < nb; ++b) counts[b] += 2 * local[b];
    }
  }

  RdfHistogram h;
  const double pair_density = N > 1 ? double(N) * double(N - 1) / (ell * ell) : 0.0;
  for (int b = 0; b <= nb; ++b) h.bin_edges.push_back(std::min(b * bin_width, r_max));
  for (int b = 0; b < nb; ++b) {
    double r1 = h.bin_edges[b], r2 = h.bin_edges[b + 1];
    double expected = pair_density * M_PI * (r2 * r2 - r1 * r1);
    h.g_values.push_back(expected > 0 ? double(counts[b]) / expected : 0.0);
    h.n_pairs += counts[b];
  }
  return h;
}

// first radius where g drops to 1 or below, linearly interpolated between bin centres
inline std::optional<double> rdf_first_crossing(const RdfHistogram& h) {
  for (std::size_t b = 1; b < h.g_values.size(); ++b) {
    double g0 = h.g_values[b - 1], g1 = h.g_values[b];
    if (g0 > 1.0 && g1 <= 1.0) {
      double r0 = 0.5 * (h.bin_edges[b - 1] + h.bin_edges[b]);
      double r1 = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
      return r0 + (g0 - 1.0) / (g0 - g1) * (r1 - r0);
    }
  }
  return std::nullopt;
}

struct GradientBin {
  double lo, hi;
  double mean, stddev;
  long count;
};

// Kernel density of particles (same Gaussian as deposition, times rho_d) and
// spectral |grad c|, grouped by density. Only occupied bins are returned.
inline std::vector<GradientBin> gradient_vs_density(const ParticleEnsemble& e, const Field2D& c, double sigma2,
                                                    double rho_d, const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("need at least two density bin edges");
  std::vector<double> ones(e.size(), 1.0);
  Field2D dens = deposit_chemical(e, ones, c.mesh, sigma2);
  auto [gx, gy] = gradient(c);
  const std::size_t nb = edges.size() - 1;
  std::vector<double> s1(nb, 0.0), s2(nb, 0.0);
  std::vector<long> cnt(nb, 0);
  for (std::size_t q = 0; q < c.values.size(); ++q) {
    double rho = rho_d * dens.values[q];
    auto it = std::upper_bound(edges.begin(), edges.end(), rho);
    if (it == edges.begin()) continue;
    std::size_t b = std::size_t(it - edges.begin()) - 1;
    if (b >= nb) {
      if (rho == edges.back()) b = nb - 1;
      else continue;
    }
    double g = std::hypot(gx.values[q], gy.values[q]);
    s1[b] += g;
    s2[b] += g * g;
    ++cnt[b];
  }
  std::vector<GradientBin> out;
  for (std::size_t b = 0; b < nb; ++b) {
    if (cnt[b] == 0) continue;
    double m = s1[b] / cnt[b];
    double var = std::max(0.0, s2[b] / cnt[b] - m * m);
    out.push_back({edges[b], edges[b + 1], m, std::sqrt(var), cnt[b]});
  }
  return out;
}

inline std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
  return e;
}

}  // namespace autochemo
