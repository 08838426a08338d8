#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace autochemo {

struct PeakResult {
  bool found = false;  // false means "no interior maximum"
  double k = 0.0;
  double R = 0.0;
};

// Golden-section maximization of g on [a, b]; g is assumed unimodal there.
inline std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b,
                                            double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double g1 = g(x1), g2 = g(x2);
  while (b - a > tol) {
    if (g1 >= g2) {  // ties move left
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - r * (b - a);
      g1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + r * (b - a);
      g2 = g(x2);
    }
  }
  return g1 >= g2 ? std::pair{x1, g1} : std::pair{x2, g2};
}

// Shared coarse-then-refine peak search over precomputed samples. `baseline`
// is R(0); a peak counts only if it clears it.
inline PeakResult refine_peak(const std::function<double(double)>& g, const std::vector<double>& ks,
                              const std::vector<double>& Rs, double baseline, double tol) {
  PeakResult out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < Rs.size(); ++i)
    if (Rs[i] > Rs[best]) best = i;
  double eps = 1e-12 * (1.0 + std::abs(baseline));
  if (!(Rs[best] > baseline + eps)) return out;
  double a = best == 0 ? 0.0 : ks[best - 1];
  double b = best + 1 < ks.size() ? ks[best + 1] : ks[best];
  auto [kr, Rr] = golden_max(g, a, b, tol);
  out.found = true;
  if (Rr >= Rs[best]) {
    out.k = kr;
    out.R = Rr;
  } else {
    out.k = ks[best];
    out.R = Rs[best];
  }
  return out;
}

}  // namespace autochemo
