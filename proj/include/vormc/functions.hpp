// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Analytic test integrands on the unit window, each irregular at the origin.

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "vormc/errors.hpp"
#include "vormc/estimators.hpp"

namespace vormc {

// (int_{-1/2}^{1/2} t sin(1/t) dt)^2, from adaptive quadrature at 30 digits.
inline constexpr double kNotHolderIntegral = 0.00290171708441097581843063634344;

/// |xy|^alpha, alpha in (0, 1].
inline Integrand holder_function(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("holder exponent must lie in (0, 1]");
  Integrand f;
  char label[32];
  std::snprintf(label, sizeof label, "holder_%g", alpha);
  f.name = label;
  if (alpha == 1.0)
    f.eval = [](Point2 p) { return std::abs(p.x * p.y); };
  else
    f.eval = [alpha](Point2 p) { return std::pow(std::abs(p.x * p.y), alpha); };
  const double side = std::pow(0.5, alpha) / (alpha + 1.0);
  f.exact_value = side * side;
  f.holder_alpha = alpha;
  return f;
}

/// xy sin(1/x) sin(1/y), extended by continuity (0) on the axes.
inline Integrand not_holder_function() {
  Integrand f;
  f.name = "not_holder";
  f.eval = [](Point2 p) {
    if (p.x == 0.0 || p.y == 0.0) return 0.0;
    return p.x * p.y * std::sin(1.0 / p.x) * std::sin(1.0 / p.y);
  };
  f.exact_value = kNotHolderIntegral;
  return f;
}

/// (x^2 + y^2)^(-1/2); infinite at the origin.
inline Integrand discontinuity_function() {
  Integrand f;
  f.name = "discontinuity";
  f.eval = [](Point2 p) { return 1.0 / std::hypot(p.x, p.y); };
  f.exact_value = 4.0 * std::log(1.0 + std::sqrt(2.0));
  return f;
}

/// Constant c on the window (used by exactness checks).
inline Integrand constant_function(double c) {
  Integrand f;
  f.name = "constant";
  f.eval = [c](Point2) { return c; };
  f.exact_value = c;
  f.holder_alpha = 1.0;
  return f;
}

/// Looks up a test function by name. `holder` needs `alpha`; the compact
/// form "holder_<alpha>" is accepted too.
inline Integrand make_function(const std::string& name, std::optional<double> alpha = {}) {
  if (name == "holder") {
    if (!alpha) throw InvalidArgument("function 'holder' requires an exponent (--alpha)");
    return holder_function(*alpha);
  }
  if (name.rfind("holder_", 0) == 0) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(name.substr(7), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size() - 7) throw UnknownFunction("unknown function '" + name + "'");
    return holder_function(a);
  }
  if (name == "not_holder") return not_holder_function();
  if (name == "discontinuity") return discontinuity_function();
  if (name == "constant") return constant_function(alpha.value_or(1.0));
  throw UnknownFunction("unknown function '" + name +
                        "' (expected holder, not_holder or discontinuity)");
}

}  // namespace vormc
