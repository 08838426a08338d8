#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <numeric>

#include "autochemo/solver2d.hpp"

using namespace autochemo;

namespace {
NonDimParams fig9() { return {0.1, 4.0, 0.001, 10.0, 0.01}; }
DepositionFn f1() { return DepositionFn::constant(0.01); }

double field_integral(const Field2D& u) {
  double h = u.mesh.spacing();
  return std::accumulate(u.values.begin(), u.values.end(), 0.0) * h * h;
}

ParticleEnsemble single(double x, double y) {
  ParticleEnsemble e;
  e.x = {x};
  e.y = {y};
  e.theta = {0.0};
  return e;
}
}  // namespace

TEST(Tumble, ZeroGradientIsHalfDt) {
  for (double th : {0.0, 1.0, 4.0}) EXPECT_DOUBLE_EQ(tumble_probability(th, 0, 0, 0.001, 0.2), 0.1);
}

TEST(Tumble, AlignedGradientEqualToDelta) {
  double delta = 0.3, dt = 0.2;
  double p = tumble_probability(0.0, delta, 0.0, delta, dt);
  EXPECT_NEAR(p, 0.5 * (1 - 1 / std::sqrt(2.0)) * dt, 1e-15);
}

TEST(Tumble, DownGradientIsNearlyDt) {
  double p = tumble_probability(M_PI, 5.0, 0.0, 1e-6, 0.2);
  EXPECT_NEAR(p, 0.2, 1e-12);
  double q = tumble_probability(0.0, 5.0, 0.0, 1e-6, 0.2);
  EXPECT_NEAR(q, 0.0, 1e-12);
}

TEST(Tumble, ZeroDeltaZeroGradient) { EXPECT_DOUBLE_EQ(tumble_probability(0.3, 0, 0, 0.0, 0.2), 0.1); }

TEST(Tumble, ClampingIsCounted) {
  long clamped = 0;
  double p = tumble_probability(M_PI, 1.0, 0.0, 1e-9, 3.0, &clamped);
  EXPECT_EQ(p, 1.0);
  EXPECT_EQ(clamped, 1);
  tumble_probability(0.0, 0.0, 0.0, 1.0, 0.2, &clamped);
  EXPECT_EQ(clamped, 1);
}

TEST(Ensemble, UniformInsideBox) {
  auto e = uniform_ensemble(5000, 10.0, 3);
  ASSERT_EQ(e.size(), 5000u);
  double mx = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    ASSERT_GE(e.x[i], 0.0);
    ASSERT_LT(e.x[i], 10.0);
    ASSERT_GE(e.y[i], 0.0);
    ASSERT_LT(e.y[i], 10.0);
    ASSERT_GE(e.theta[i], 0.0);
    ASSERT_LT(e.theta[i], 2 * M_PI);
    mx += e.x[i];
  }
  EXPECT_NEAR(mx / 5000, 5.0, 4 * 10 / std::sqrt(12.0 * 5000));
}

TEST(Ensemble, WrapStaysInRange) {
  EXPECT_EQ(wrap(10.0, 10.0), 0.0);
  EXPECT_NEAR(wrap(-0.5, 10.0), 9.5, 1e-15);
  EXPECT_LT(wrap(-1e-18, 10.0), 10.0);
  EXPECT_NEAR(wrap(23.0, 10.0), 3.0, 1e-14);
}

TEST(Particles, BernoulliWhenDeltaIsHuge) {
  auto p = fig9();
  p.delta = 1e12;
  Mesh2D mesh(32, p.ell);
  const std::size_t np = 100000;
  Simulation2D sim(p, f1(), mesh, np, 0.2, 17);
  // put some structure into c so gradients are nonzero
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) sim.state().c(i, j) = 0.01 + 0.005 * std::sin(2 * M_PI * i / mesh.n);
  sim.advance_particles();
  double expect = np * 0.1;
  double var = np * 0.1 * 0.9;
  double chi2 = std::pow(sim.last_stats().tumbles - expect, 2) / var;
  EXPECT_LT(chi2, 6.635);  // p > 0.01 for one degree of freedom
}

TEST(Particles, UnbiasedWalkInConstantField) {
  auto p = fig9();
  Mesh2D mesh(16, p.ell);
  const std::size_t np = 2000;
  const double dt = 0.2;
  Simulation2D sim(p, f1(), mesh, np, dt, 5);
  auto& e = sim.state().particles;
  std::vector<double> dx(np, 0.0), dy(np, 0.0);
  const int steps = 1000;
  for (int s = 0; s < steps; ++s) {
    auto x0 = e.x, y0 = e.y;
    sim.advance_particles();
    for (std::size_t i = 0; i < np; ++i) {
      double ux = e.x[i] - x0[i], uy = e.y[i] - y0[i];
      ux -= p.ell * std::round(ux / p.ell);
      uy -= p.ell * std::round(uy / p.ell);
      ASSERT_NEAR(std::hypot(ux, uy), dt, 1e-12);
      dx[i] += ux;
      dy[i] += uy;
    }
  }
  double mx = 0, my = 0, msd = 0;
  for (std::size_t i = 0; i < np; ++i) {
    mx += dx[i];
    my += dy[i];
    msd += dx[i] * dx[i] + dy[i] * dy[i];
  }
  mx /= np;
  my /= np;
  msd /= np;
  // headings of steps m apart are correlated by (1 - dt/2)^m
  double rho = 1 - dt / 2, sum = steps;
  for (int m = 1; m < steps; ++m) sum += 2.0 * (steps - m) * std::pow(rho, m);
  double msd_theory = dt * dt * sum;
  double sigma = std::sqrt(msd_theory / 2 / np);
  EXPECT_LT(std::abs(mx), 3 * sigma);
  EXPECT_LT(std::abs(my), 3 * sigma);
  EXPECT_NEAR(msd, msd_theory, 0.1 * msd_theory);
}

TEST(Deposition, SingleParticleIntegral) {
  Mesh2D mesh(64, 10.0);
  double sigma2 = 3 * 0.2 * 0.1;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{5.0, 5.0}, {3.14, 7.77}, {0.01, 9.99}, {0.0, 0.0}}) {
    auto u = deposit_chemical(single(x, y), {2.5}, mesh, sigma2);
    EXPECT_NEAR(field_integral(u), 2.5, 0.01 * 2.5);
    EXPECT_NEAR(field_integral(u), 2.5, 1e-4 * 2.5);
  }
}

TEST(Deposition, WrapsAcrossBoundary) {
  Mesh2D mesh(32, 8.0);
  double sigma2 = 0.06;
  auto u = deposit_chemical(single(0.0, 0.0), {1.0}, mesh, sigma2);
  // symmetric about the corner
  EXPECT_NEAR(u(0, 1), u(0, mesh.n - 1), 1e-15);
  EXPECT_NEAR(u(1, 0), u(mesh.n - 1, 0), 1e-15);
  EXPECT_NEAR(u(1, 1), u(mesh.n - 1, mesh.n - 1), 1e-15);
  EXPECT_GT(u(mesh.n - 1, 0), 0.0);
}

TEST(Deposition, Linearity) {
  Mesh2D mesh(32, 8.0);
  ParticleEnsemble two;
  two.x = {2.3, 2.3};
  two.y = {5.1, 5.1};
  two.theta = {0, 0};
  auto a = deposit_chemical(two, {0.5, 0.5}, mesh, 0.06);
  auto b = deposit_chemical(single(2.3, 5.1), {1.0}, mesh, 0.06);
  for (std::size_t i = 0; i < mesh.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
}

TEST(Deposition, LatticeShiftEquivariance) {
  Mesh2D mesh(32, 8.0);
  double h = mesh.spacing();
  auto e = uniform_ensemble(200, 8.0, 9);
  std::vector<double> S(200);
  for (std::size_t i = 0; i < S.size(); ++i) S[i] = 0.5 + 0.001 * i;
  auto moved = e;
  const int a = 5, b = 11;
  for (std::size_t i = 0; i < e.size(); ++i) {
    moved.x[i] = wrap(e.x[i] + a * h, 8.0);
    moved.y[i] = wrap(e.y[i] + b * h, 8.0);
  }
  auto u = deposit_chemical(e, S, mesh, 0.06);
  auto v = deposit_chemical(moved, S, mesh, 0.06);
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) EXPECT_NEAR(v((i + a) % mesh.n, (j + b) % mesh.n), u(i, j), 1e-12);
}

TEST(Deposition, ChunkCountOnlyChangesSummationOrder) {
  Mesh2D mesh(32, 8.0);
  auto e = uniform_ensemble(1000, 8.0, 4);
  std::vector<double> S(1000, 1.0);
  auto a = deposit_chemical(e, S, mesh, 0.06, 5.0, 1);
  auto b = deposit_chemical(e, S, mesh, 0.06, 5.0, 64);
  for (std::size_t i = 0; i < mesh.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12 * (1 + a.values[i]));
}

TEST(Deposition, RejectsNonPositiveVariance) {
  Mesh2D mesh(16, 8.0);
  EXPECT_THROW(deposit_chemical(single(1, 1), {1.0}, mesh, 0.0), std::invalid_argument);
}

TEST(Chemical, ConstantPureDecay) {
  Mesh2D mesh(16, 10.0);
  auto p = fig9();
  double dt = 0.2;
  Field2D c(mesh, 0.7), src(mesh, 0.0);
  auto out = step_chemical(c, src, p, dt, 1.0);
  double want = 0.7 * (1 - dt * p.d2 / 2) / (1 + dt * p.d2 / 2);
  for (double v : out.values) EXPECT_NEAR(v, want, 1e-14);
}

TEST(Chemical, SingleModeClosedForm) {
  Mesh2D mesh(32, 10.0);
  auto p = fig9();
  double dt = 0.2;
  double kx = 2 * M_PI * 2 / 10.0, ky = 2 * M_PI * 3 / 10.0;
  Field2D c(mesh), src(mesh, 0.0);
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) c(i, j) = std::cos(kx * i * mesh.spacing() + ky * j * mesh.spacing());
  double L = -p.d1 * (kx * kx + ky * ky) - p.d2;
  double r = (1 + dt * L / 2) / (1 - dt * L / 2);
  auto out = c;
  for (int s = 0; s < 5; ++s) out = step_chemical(out, src, p, dt, 1.0);
  for (std::size_t q = 0; q < mesh.size(); ++q) EXPECT_NEAR(out.values[q], std::pow(r, 5) * c.values[q], 1e-10);
}

TEST(Chemical, SourceEntersWithDensityCoefficient) {
  Mesh2D mesh(16, 10.0);
  auto p = fig9();
  double dt = 0.2, rho_d = 3.0;
  Field2D c(mesh, 0.0), src(mesh, 2.0);
  auto out = step_chemical(c, src, p, dt, rho_d);
  for (double v : out.values) EXPECT_NEAR(v, dt * rho_d * 2.0 / (1 + dt * p.d2 / 2), 1e-13);
}

TEST(Simulation, DensityCoefficient) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  Simulation2D sim(p, f1(), mesh, 3000, 0.2, 1);
  EXPECT_EQ(sim.state().rho_d, steady_density(p, f1()) * p.ell * p.ell / 3000.0);
  EXPECT_DOUBLE_EQ(sim.sigma2(), 3 * 0.2 * p.d1);
}

TEST(Simulation, MeanChemicalRelaxesPerCnRecurrence) {
  auto p = fig9();
  Mesh2D mesh(64, p.ell);
  const double dt = 0.2;
  Simulation2D sim(p, f1(), mesh, 5000, dt, 2);
  for (double& v : sim.state().c.values) v = 2 * p.cbar;
  double r = (1 - dt * p.d2 / 2) / (1 + dt * p.d2 / 2);
  double m = mean(sim.state().c.values);
  for (int s = 0; s < 20; ++s) {
    sim.step();
    double want = p.cbar + r * (m - p.cbar);
    m = mean(sim.state().c.values);
    EXPECT_NEAR(m, want, 1e-5 * p.cbar);
  }
  // what is left is the deposition truncation bias, ~exp(-cutoff^2 / 2)
  EXPECT_LT(std::abs(m - p.cbar), 1e-5 * p.cbar);
}

TEST(Simulation, ParticleCountAndTimeAdvance) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  Simulation2D sim(p, f1(), mesh, 1000, 0.2, 8);
  sim.advance(10);
  EXPECT_EQ(sim.state().particles.size(), 1000u);
  EXPECT_EQ(sim.state().step, 10);
  EXPECT_NEAR(sim.state().t, 2.0, 1e-12);
  for (double s : sim.strengths()) EXPECT_EQ(s, 0.01);
  EXPECT_EQ(sim.total_clamped(), 0);
}

TEST(Simulation, DeterministicAcrossThreadCounts) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  auto run = [&](int threads) {
    omp_set_num_threads(threads);
    Simulation2D sim(p, DepositionFn::switch_fn(0.01, 0.012, 0.0007), mesh, 4000, 0.2, 99);
    sim.advance(15);
    return sim.state();
  };
  int saved = omp_get_max_threads();
  auto a = run(1);
  auto b = run(4);
  auto c = run(3);
  omp_set_num_threads(saved);
  EXPECT_EQ(a.particles.x, b.particles.x);
  EXPECT_EQ(a.particles.theta, b.particles.theta);
  EXPECT_EQ(a.c.values, b.c.values);
  EXPECT_EQ(a.c.values, c.c.values);
}

TEST(Simulation, SeedChangesTrajectory) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  Simulation2D a(p, f1(), mesh, 500, 0.2, 1), b(p, f1(), mesh, 500, 0.2, 2);
  a.advance(3);
  b.advance(3);
  EXPECT_NE(a.state().particles.x, b.state().particles.x);
}

TEST(Simulation, RejectsBadArguments) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  EXPECT_THROW(Simulation2D(p, f1(), mesh, 0, 0.2, 1), std::invalid_argument);
  EXPECT_THROW(Simulation2D(p, f1(), mesh, 10, 1.5, 1), std::invalid_argument);
  EXPECT_THROW(Simulation2D(p, f1(), Mesh2D(32, 5.0), 10, 0.2, 1), std::invalid_argument);
}

TEST(Interpolation, BilinearExactOnNodesAndLinearFunctions) {
  Mesh2D mesh(16, 8.0);
  std::vector<double> v(mesh.size());
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) v[mesh.at(i, j)] = 1.0 + 2.0 * i - 0.5 * j;
  EXPECT_DOUBLE_EQ(bilinear(v, mesh, 3 * 0.5, 4 * 0.5), 1.0 + 6.0 - 2.0);
  EXPECT_NEAR(bilinear(v, mesh, 1.25, 2.75), 1.0 + 2.0 * 2.5 - 0.5 * 5.5, 1e-12);
}

TEST(Interpolation, SplineInterpolatesAndBeatsBilinear) {
  Mesh2D mesh(32, 10.0);
  Spectral2D spec(mesh);
  auto fn = [](double x, double y) { return std::sin(2 * M_PI * x / 10.0) * std::cos(4 * M_PI * y / 10.0); };
  std::vector<double> v(mesh.size());
  double h = mesh.spacing();
  for (int i = 0; i < mesh.n; ++i)
    for (int j = 0; j < mesh.n; ++j) v[mesh.at(i, j)] = fn(i * h, j * h);
  auto coef = spline_coefficients(v, spec);
  for (int i = 0; i < mesh.n; i += 5)
    for (int j = 0; j < mesh.n; j += 7) EXPECT_NEAR(spline_eval(coef, mesh, i * h, j * h), v[mesh.at(i, j)], 1e-12);
  double err_s = 0, err_b = 0;
  for (double x = 0.13; x < 10; x += 0.71)
    for (double y = 0.29; y < 10; y += 0.53) {
      err_s = std::max(err_s, std::abs(spline_eval(coef, mesh, x, y) - fn(x, y)));
      err_b = std::max(err_b, std::abs(bilinear(v, mesh, x, y) - fn(x, y)));
    }
  EXPECT_LT(err_s, 1e-3);
  EXPECT_LT(err_s, 0.1 * err_b);
}

TEST(Interpolation, SplineModeRunsAndKeepsMass) {
  auto p = fig9();
  Mesh2D mesh(32, p.ell);
  Solver2DOptions opt;
  opt.interp = Interp::Spline;
  Simulation2D sim(p, DepositionFn::switch_fn(0.01, 0.012, 0.0007), mesh, 1000, 0.2, 3, opt);
  sim.advance(5);
  EXPECT_EQ(sim.state().particles.size(), 1000u);
  for (double v : sim.state().c.values) EXPECT_TRUE(std::isfinite(v));
}
