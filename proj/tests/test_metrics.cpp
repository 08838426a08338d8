#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "autochemo/metrics.hpp"

using namespace autochemo;

namespace {
ParticleEnsemble lattice(int m, double ell) {
  ParticleEnsemble e;
  double h = ell / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      e.x.push_back(i * h);
      e.y.push_back(j * h);
      e.theta.push_back(0.0);
    }
  return e;
}

double area_weighted_mean(const RdfHistogram& h, double lo) {
  double num = 0, den = 0;
  for (std::size_t b = 0; b < h.g_values.size(); ++b) {
    double r1 = h.bin_edges[b], r2 = h.bin_edges[b + 1];
    if (r1 < lo) continue;
    double w = r2 * r2 - r1 * r1;
    num += w * h.g_values[b];
    den += w;
  }
  return num / den;
}
}  // namespace

TEST(Spectrum1D, ConstantField) {
  Mesh1D mesh(64, 5.0);
  Field1D c(mesh, 0.3);
  auto s = spectrum_1d(c);
  ASSERT_EQ(s.size(), 64u);
  EXPECT_NEAR(s[0].E, 0.3, 1e-15);
  EXPECT_EQ(s[0].k, 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(s[i].E, 0.0, 1e-15);
}

TEST(Spectrum1D, SingleCosineMode) {
  Mesh1D mesh(64, 5.0);
  Field1D c(mesh);
  const int m = 6;
  for (int i = 0; i < mesh.n; ++i) c[i] = std::cos(2 * M_PI * m * mesh.x(i) / mesh.ell);
  auto s = spectrum_1d(c);
  double km = 2 * M_PI * m / mesh.ell;
  for (const auto& p : s) {
    if (std::abs(std::abs(p.k) - km) < 1e-9) {
      EXPECT_NEAR(p.E, 0.5, 1e-13);
    } else {
      EXPECT_NEAR(p.E, 0.0, 1e-13);
    }
  }
}

TEST(Spectrum2D, ConstantField) {
  Mesh2D mesh(16, 10.0);
  Field2D c(mesh, 0.01);
  auto s = spectrum_2d(c);
  EXPECT_NEAR(s.re(0, 0), 0.01, 1e-17);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (i || j) {
        EXPECT_NEAR(std::abs(s.coeff[std::size_t(i) * 16 + j]), 0.0, 1e-17);
      }
  EXPECT_NEAR(s.radial[0].re, 0.01, 1e-17);
  EXPECT_EQ(s.radial[0].count, 1);
}

TEST(Spectrum2D, PlaneWave) {
  Mesh2D mesh(32, 10.0);
  Field2D c(mesh);
  const int a = 3, b = 4;  // |k| index 5
  double h = mesh.spacing();
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) c(i, j) = std::cos(2 * M_PI * (a * i * h + b * j * h) / mesh.ell);
  auto s = spectrum_2d(c);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      bool hit = (i == a && j == b) || (i == 32 - a && j == 32 - b);
      EXPECT_NEAR(s.re(i, j), hit ? 0.5 : 0.0, 1e-13) << i << "," << j;
    }
  // the radial profile puts all power in the |k| = 5 ring
  double best = 0, at = -1;
  for (const auto& r : s.radial)
    if (r.kmag > 0 && r.power > best) {
      best = r.power;
      at = r.kmag;
    }
  EXPECT_NEAR(at, 5 * 2 * M_PI / 10.0, 1e-12);
}

TEST(Spectrum2D, ZeroModeMatchesTotalChemical) {
  Mesh2D mesh(32, 10.0);
  Field2D c(mesh);
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (double& v : c.values) v = u(g);
  auto s = spectrum_2d(c);
  EXPECT_NEAR(s.re(0, 0) * 100.0, total_chemical(c), 1e-12);
}

TEST(TotalChemical, SteadyValueIsOne) {
  Field2D c(Mesh2D(64, 10.0), 0.01);
  EXPECT_NEAR(total_chemical(c), 1.0, 1e-13);
  Field2D z(Mesh2D(64, 10.0), 0.0);
  EXPECT_EQ(total_chemical(z), 0.0);
  Field1D c1(Mesh1D(30, 5.0), 0.2);
  EXPECT_NEAR(total_chemical(c1), 1.0, 1e-14);
}

TEST(TotalChemical, Linear) {
  Mesh2D mesh(32, 10.0);
  Field2D a(mesh), b(mesh), mix(mesh);
  std::mt19937_64 g(6);
  std::normal_distribution<double> n(0, 1);
  for (std::size_t q = 0; q < mesh.size(); ++q) {
    a.values[q] = n(g);
    b.values[q] = n(g);
    mix.values[q] = 2.5 * a.values[q] + b.values[q];
  }
  EXPECT_NEAR(total_chemical(mix), 2.5 * total_chemical(a) + total_chemical(b), 1e-12);
}

TEST(MaxMin, ConstantAndBump) {
  Mesh2D mesh(32, 10.0);
  Field2D c(mesh, 0.4);
  EXPECT_EQ(max_min_chemical(c), 0.0);
  double h = mesh.spacing();
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) {
      double dx = i * h - 5.0, dy = j * h - 5.0;
      c(i, j) += 0.7 * std::exp(-(dx * dx + dy * dy));
    }
  // the bump is sampled at its centre and has decayed to ~e^-25 at the edges
  EXPECT_NEAR(max_min_chemical(c), 0.7, 1e-9);
}

TEST(Peaks, CountsPeriodicAndPlateaus) {
  EXPECT_EQ(count_peaks({0, 2, 0, 3, 0, 1}, 0.5), 3);
  EXPECT_EQ(count_peaks({0, 2, 0, 3, 0, 1}, 1.5), 2);
  EXPECT_EQ(count_peaks({3, 0, 0, 0, 0, 2}, 0.0), 1);   // neighbour of the last entry is the first
  EXPECT_EQ(count_peaks({2, 0, 0, 0, 2}, 1.0), 1);      // plateau across the wrap
  EXPECT_EQ(count_peaks({0, 2, 2, 2, 0, 0}, 1.0), 1);   // plateau counts once
  EXPECT_EQ(count_peaks({1, 1, 1, 1}, 0.0), 0);
}

TEST(Rdf, UniformIsOne) {
  const double ell = 10.0;
  auto e = uniform_ensemble(10000, ell, 42);
  auto h = rdf(e, ell, 0.05, 5.0);
  ASSERT_EQ(h.g_values.size(), 100u);
  ASSERT_EQ(h.bin_edges.size(), 101u);
  double m = area_weighted_mean(h, 0.5);
  EXPECT_GE(m, 0.98);
  EXPECT_LE(m, 1.02);
  for (std::size_t b = 0; b < h.g_values.size(); ++b) {
    if (h.bin_edges[b] < 0.5) continue;
    EXPECT_NEAR(h.g_values[b], 1.0, 0.05) << "r = " << h.bin_edges[b];
  }
}

TEST(Rdf, TightClusterLimit) {
  const double ell = 10.0, eps = 0.1;
  ParticleEnsemble e;
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 400; ++i) {
    double r = eps * std::sqrt(u(g)), a = 2 * M_PI * u(g);
    e.x.push_back(5.0 + r * std::cos(a));
    e.y.push_back(5.0 + r * std::sin(a));
    e.theta.push_back(0.0);
  }
  auto h = rdf(e, ell, 0.05, 5.0);
  for (std::size_t b = 0; b < h.g_values.size(); ++b) {
    if (h.bin_edges[b + 1] <= 2 * eps) {
      EXPECT_GT(h.g_values[b], 100.0);
    }
    if (h.bin_edges[b] >= 2 * eps) {
      EXPECT_EQ(h.g_values[b], 0.0);
    }
  }
  auto cross = rdf_first_crossing(h);
  ASSERT_TRUE(cross.has_value());
  EXPECT_LT(*cross, 2 * eps + 0.05);
}

TEST(Rdf, TranslationAndRelabelingInvariant) {
  const double ell = 10.0;
  auto e = uniform_ensemble(2000, ell, 8);
  auto moved = e;
  for (std::size_t i = 0; i < e.size(); ++i) {
    moved.x[i] = wrap(e.x[i] + 3.3, ell);
    moved.y[i] = wrap(e.y[i] - 1.7, ell);
  }
  auto shuffled = e;
  std::mt19937_64 g(1);
  std::vector<std::size_t> idx(e.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), g);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    shuffled.x[i] = e.x[idx[i]];
    shuffled.y[i] = e.y[idx[i]];
  }
  auto a = rdf(e, ell, 0.1, 5.0), b = rdf(moved, ell, 0.1, 5.0), c = rdf(shuffled, ell, 0.1, 5.0);
  EXPECT_EQ(a.g_values, c.g_values);
  // translation perturbs distances at round-off, which can flip a pair across a bin edge
  std::uint64_t diff = 0;
  for (std::size_t k = 0; k < a.g_values.size(); ++k) diff += a.g_values[k] != b.g_values[k];
  EXPECT_LE(diff, 2u);
  EXPECT_EQ(a.n_pairs, c.n_pairs);
}

TEST(Rdf, CellListMatchesNaive) {
  const double ell = 12.0;
  auto e = uniform_ensemble(3000, ell, 77);
  auto a = rdf(e, ell, 0.1, 3.0, RdfMethod::Naive);
  auto b = rdf(e, ell, 0.1, 3.0, RdfMethod::CellList);
  auto c = rdf(e, ell, 0.1, 3.0);
  EXPECT_EQ(a.g_values, b.g_values);
  EXPECT_EQ(a.n_pairs, b.n_pairs);
  EXPECT_EQ(b.g_values, c.g_values);
}

TEST(Rdf, RejectsBadArguments) {
  auto e = uniform_ensemble(10, 10.0, 1);
  EXPECT_THROW(rdf(e, 10.0, 0.05, 5.5), std::invalid_argument);
  EXPECT_THROW(rdf(e, 10.0, 0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(rdf(e, 10.0, 0.05, 4.0, RdfMethod::CellList), std::invalid_argument);
}

TEST(Rdf, CrossingAbsentForUniform) {
  RdfHistogram h{{0, 1, 2, 3}, {0.9, 1.0, 0.95}, 0};
  EXPECT_FALSE(rdf_first_crossing(h).has_value());
  RdfHistogram k{{0, 1, 2, 3}, {3.0, 2.0, 0.0}, 0};
  // g = 2 at r = 1.5, g = 0 at r = 2.5
  EXPECT_NEAR(*rdf_first_crossing(k), 2.0, 1e-12);
}

TEST(GradMap, ConstantFieldHasZeroGradient) {
  Mesh2D mesh(32, 10.0);
  auto e = uniform_ensemble(4000, 10.0, 2);
  Field2D c(mesh, 0.01);
  auto bins = gradient_vs_density(e, c, 0.06, 1.0, uniform_edges(0, 200, 20));
  ASSERT_FALSE(bins.empty());
  for (const auto& b : bins) EXPECT_NEAR(b.mean, 0.0, 1e-14);
}

TEST(GradMap, SineFieldOnUniformLattice) {
  // one particle per node gives a flat density, so a single bin holds every
  // cell and its mean is the mesh average of |A k cos(k x)|
  Mesh2D mesh(32, 8.0);
  auto e = lattice(32, 8.0);
  const double A = 0.02, k = 2 * M_PI / 8.0;
  Field2D c(mesh);
  double h = mesh.spacing(), want = 0;
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) {
      c(i, j) = A * std::sin(k * i * h);
      want += A * k * std::abs(std::cos(k * i * h));
    }
  want /= double(mesh.size());
  double rho_d = 0.5;
  double flat = rho_d / (h * h);
  auto edges = std::vector<double>{0.0, 0.5 * flat, 0.99 * flat, 1.01 * flat, 2 * flat};
  auto bins = gradient_vs_density(e, c, 0.2, rho_d, edges);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].lo, edges[2]);
  EXPECT_EQ(bins[0].count, long(mesh.size()));
  EXPECT_NEAR(bins[0].mean, want, 1e-10);
}

TEST(GradMap, NeedsEdges) {
  Mesh2D mesh(16, 8.0);
  EXPECT_THROW(gradient_vs_density(uniform_ensemble(5, 8.0, 1), Field2D(mesh), 0.1, 1.0, {1.0}),
               std::invalid_argument);
}

TEST(GradMap, UniformEdges) {
  auto e = uniform_edges(0, 10, 4);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_EQ(e[2], 5.0);
}
