#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "deposition.hpp"

namespace autochemo {

// Dimensional inputs: kappa [cm^2/s], beta [1/s], lambda0 [1/s], v [cm/s].
struct DimParams {
  double kappa = 1e-5;
  double beta = 40.0;
  double lambda0 = 10.0;
  double v = 1e-2;

  void validate() const {
    auto pos = [](double x, const char* name) {
      if (!(x > 0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    pos(kappa, "kappa");
    pos(beta, "beta");
    pos(lambda0, "lambda0");
    pos(v, "v");
  }
};

struct NonDimParams {
  double d1 = 1.0;
  double d2 = 1.0;
  double delta = 0.01;
  double ell = 5.0;
  double cbar = 0.12;

  void validate() const {
    auto fin = [](double x) { return std::isfinite(x); };
    if (!(d1 > 0) || !fin(d1)) throw std::invalid_argument("d1 must be > 0");
    if (!(d2 > 0) || !fin(d2)) throw std::invalid_argument("d2 must be > 0");
    if (!(delta >= 0) || !fin(delta)) throw std::invalid_argument("delta must be >= 0");
    if (!(ell > 0) || !fin(ell)) throw std::invalid_argument("ell must be > 0");
    if (!(cbar >= 0) || !fin(cbar)) throw std::invalid_argument("cbar must be >= 0");
  }
};

struct NonDimResult {
  double d1;
  double d2;
  double gamma;  // deposition strength in units of lambda0
  double tau;    // time scale 1/lambda0
  double L;      // length scale v/lambda0
};

inline NonDimResult nondimensionalize(const DimParams& dim, double gamma_dim) {
  dim.validate();
  if (!(gamma_dim > 0)) throw std::invalid_argument("deposition strength must be > 0");
  return {dim.kappa * dim.lambda0 / (dim.v * dim.v), dim.beta / dim.lambda0,
          gamma_dim / dim.lambda0, 1.0 / dim.lambda0, dim.v / dim.lambda0};
}

struct DegenerateSteadyState : std::domain_error {
  using std::domain_error::domain_error;
};

inline double steady_density(const NonDimParams& p, const DepositionFn& f) {
  if (p.cbar == 0.0) return 0.0;
  double fc = f(p.cbar);
  if (!(fc > 0))
    throw DegenerateSteadyState("f(cbar) = " + std::to_string(fc) + " gives no steady density");
  return p.d2 * p.cbar / fc;
}

// d3 = rho_bar f'(cbar) - d2, the linearized chemical self-coupling
inline double d3_coefficient(const NonDimParams& p, const DepositionFn& f) {
  return steady_density(p, f) * f.derivative(p.cbar) - p.d2;
}

struct Model {
  NonDimParams p;
  DepositionFn f;

  void validate() const {
    p.validate();
    f.validate();
    steady_density(p, f);
  }
  double rho_bar() const { return steady_density(p, f); }
  double d3() const { return d3_coefficient(p, f); }
};

}  // namespace autochemo
