#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace autochemo {

enum class DepositionKind { Constant, Switch, LinearSwitch };

struct DepositionFn {
  DepositionKind kind = DepositionKind::Constant;
  double gamma = 0.01;
  double c0 = 0.05;
  double T0 = 0.03;

  static DepositionFn constant(double gamma) {
    return make(DepositionKind::Constant, gamma, 0.0, 0.0);
  }
  static DepositionFn switch_fn(double gamma, double c0, double T0) {
    return make(DepositionKind::Switch, gamma, c0, T0);
  }
  static DepositionFn linear_switch(double gamma, double c0, double T0) {
    return make(DepositionKind::LinearSwitch, gamma, c0, T0);
  }
  static DepositionFn make(DepositionKind kind, double gamma, double c0, double T0) {
    DepositionFn f{kind, gamma, c0, T0};
    f.validate();
    return f;
  }

  void validate() const {
    if (!(gamma > 0) || !std::isfinite(gamma))
      throw std::invalid_argument("deposition.gamma must be > 0");
    if (kind != DepositionKind::Constant) {
      if (!(c0 > 0) || !std::isfinite(c0))
        throw std::invalid_argument("deposition.c0 must be > 0");
      if (!(T0 > 0) || !std::isfinite(T0))
        throw std::invalid_argument("deposition.T0 must be > 0");
    }
  }

  double operator()(double c) const { return eval(c); }

  double eval(double c) const {
    switch (kind) {
      case DepositionKind::Constant:
        return gamma;
      case DepositionKind::Switch:
        return 0.5 * gamma * (std::tanh((c0 - c) / T0) + 1.0);
      case DepositionKind::LinearSwitch:
        return gamma * (c + 0.2 * c0) / (2.0 * c0) * (std::tanh((c0 - c) / T0) + 1.0);
    }
    return 0.0;
  }

  double derivative(double c) const {
    switch (kind) {
      case DepositionKind::Constant:
        return 0.0;
      case DepositionKind::Switch: {
        double s = 1.0 / std::cosh((c0 - c) / T0);
        return -0.5 * gamma / T0 * s * s;
      }
      case DepositionKind::LinearSwitch: {
        double th = std::tanh((c0 - c) / T0);
        double s = 1.0 / std::cosh((c0 - c) / T0);
        double lin = gamma * (c + 0.2 * c0) / (2.0 * c0);
        return gamma / (2.0 * c0) * (th + 1.0) - lin * s * s / T0;
      }
    }
    return 0.0;
  }
};

inline std::string to_string(DepositionKind k) {
  switch (k) {
    case DepositionKind::Constant: return "constant";
    case DepositionKind::Switch: return "switch";
    case DepositionKind::LinearSwitch: return "linear_switch";
  }
  return "?";
}

inline DepositionKind parse_deposition_kind(const std::string& s) {
  if (s == "constant" || s == "f1") return DepositionKind::Constant;
  if (s == "switch" || s == "f2") return DepositionKind::Switch;
  if (s == "linear_switch" || s == "f3") return DepositionKind::LinearSwitch;
  throw std::invalid_argument("unknown deposition kind '" + s + "'");
}

}  // namespace autochemo
