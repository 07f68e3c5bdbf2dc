// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Poisson point processes on squares and the stretched-window construction:
// nuclei are drawn in W and in a margin strip W' \ W of width epsilon, and a
// draw is rejected whenever a nucleus inside W still owns an unbounded cell.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "vormc/errors.hpp"
#include "vormc/geom2d.hpp"
#include "vormc/rng.hpp"

namespace vormc {

// ---------------------------------------------------------------------------
// Poisson counts
// ---------------------------------------------------------------------------

namespace detail {

inline double log_factorial(std::uint64_t k) {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (k < table.size()) return table[k];
  const double x = double(k);
  const double x2 = x * x;
  return x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x) +
         (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * x2)) / x2) / x;
}

inline std::uint64_t poisson_inversion(Rng& rng, double lambda) {
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= lambda / double(k);
    const double next = cdf + p;
    if (next == cdf) break;  // tail exhausted in double precision
    cdf = next;
  }
  return k;
}

// Hormann's transformed rejection with squeeze (PTRS), valid for lambda >= 10.
inline std::uint64_t poisson_ptrs(Rng& rng, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const auto k = static_cast<std::uint64_t>(kf);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + kf * loglam - log_factorial(k))
      return k;
  }
}

}  // namespace detail

/// Exact Poisson(lambda) draw: inversion below 10, transformed rejection above.
inline std::uint64_t sample_poisson_count(Rng& rng, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("Poisson parameter must be finite and non-negative");
  if (lambda == 0.0) return 0;
  if (lambda < 10.0) return detail::poisson_inversion(rng, lambda);
  return detail::poisson_ptrs(rng, lambda);
}

// ---------------------------------------------------------------------------
// Uniform points
// ---------------------------------------------------------------------------

inline std::vector<Point2> sample_uniform_in(Rng& rng, const Window& w, std::size_t count) {
  std::vector<Point2> pts(count);
  for (auto& p : pts) {
    p.x = w.xmin() + w.side() * rng.uniform();
    p.y = w.ymin() + w.side() * rng.uniform();
  }
  return pts;
}

/// Area of outer \ inner for concentric windows.
inline double strip_area(const Window& inner, const Window& outer) {
  const double eps = outer.half_extent - inner.half_extent;
  return 8.0 * inner.half_extent * eps + 4.0 * eps * eps;
}

/// Uniform points in outer \ inner (concentric windows, outer larger), drawn
/// from the four-rectangle frame decomposition weighted by area.
inline std::vector<Point2> sample_uniform_in_strip(Rng& rng, const Window& inner,
                                                   const Window& outer, std::size_t count) {
  const double h = inner.half_extent, big = outer.half_extent, eps = big - h;
  if (!(eps > 0.0)) throw InvalidArgument("strip needs an outer window larger than the inner one");
  const double a_band = 2.0 * big * eps;  // top, bottom
  const double a_side = 2.0 * h * eps;    // left, right
  const double total = 2.0 * (a_band + a_side);
  const Point2 c = inner.center;
  std::vector<Point2> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    double pick = rng.uniform() * total;
    const double u = rng.uniform(), v = rng.uniform();
    const double depth = h + eps * (1.0 - v);  // in (h, big]
    Point2 p;
    if (pick < a_band) {
      p = {-big + 2.0 * big * u, depth};
    } else if ((pick -= a_band) < a_band) {
      p = {-big + 2.0 * big * u, -depth};
    } else if ((pick -= a_band) < a_side) {
      p = {-depth, -h + 2.0 * h * u};
    } else {
      p = {depth, -h + 2.0 * h * u};
    }
    p = p + c;
    if (inner.contains(p) || !outer.contains(p)) continue;  // rounding guard
    pts.push_back(p);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Margin selection
// ---------------------------------------------------------------------------

/// Upper bound on the rejection probability at intensity n and margin eps:
/// 4 pi n^2 eps^2 exp(-pi n eps^2).
inline double bound_reject_prob(double n, double epsilon) {
  const double pi = std::numbers::pi;
  return 4.0 * pi * n * n * epsilon * epsilon * std::exp(-pi * n * epsilon * epsilon);
}

/// Start of the branch on which bound_reject_prob decreases in epsilon.
inline double epsilon_branch_start(double n) { return std::sqrt(1.0 / (std::numbers::pi * n)); }

/// Smallest epsilon on the decreasing branch with bound_reject_prob <= delta,
/// by bisection to 1e-10. If delta already exceeds the bound at the branch
/// start, the branch start is returned.
inline double solve_epsilon(double n, double delta) {
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("intensity must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidConfidence("confidence level must lie in (0, 1), got " + std::to_string(delta));
  double lo = epsilon_branch_start(n);
  if (bound_reject_prob(n, lo) <= delta) return lo;
  double hi = 2.0 * lo;
  while (bound_reject_prob(n, hi) > delta) hi *= 2.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (bound_reject_prob(n, mid) > delta ? lo : hi) = mid;
  }
  return hi;
}

/// Number of strip points that preserves intensity n around the unit window:
/// floor(n (4 eps + 4 eps^2)).
inline std::uint64_t strip_count(double n, double epsilon) {
  if (epsilon <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::floor(n * (4.0 * epsilon + 4.0 * epsilon * epsilon)));
}

// ---------------------------------------------------------------------------
// Stretched-window process
// ---------------------------------------------------------------------------

enum class CountMode {
  fixed,    ///< exactly n|W| interior and floor(n|W' \ W|) strip points
  poisson,  ///< both counts Poisson-distributed with those means
};

inline const char* to_string(CountMode m) { return m == CountMode::fixed ? "fixed" : "poisson"; }

inline CountMode parse_count_mode(const std::string& s) {
  if (s == "fixed") return CountMode::fixed;
  if (s == "poisson") return CountMode::poisson;
  throw InvalidArgument("unknown count mode '" + s + "' (expected fixed or poisson)");
}

struct SpppParams {
  double intensity_n = 0.0;
  double confidence_delta = 1e-3;
  double epsilon = 0.0;
  int max_retries = 100;
  CountMode mode = CountMode::fixed;
  /// Additionally require circ_radius <= epsilon for accepted interior cells.
  bool strict_radius = false;

  /// Parameters with epsilon solved from (n, delta).
  static SpppParams for_intensity(double n, double delta = 1e-3,
                                  CountMode mode = CountMode::fixed) {
    SpppParams p;
    p.intensity_n = n;
    p.confidence_delta = delta;
    p.epsilon = solve_epsilon(n, delta);
    p.mode = mode;
    return p;
  }

  void validate() const {
    if (!(intensity_n > 0.0) || !std::isfinite(intensity_n))
      throw InvalidArgument("intensity must be positive");
    if (!(confidence_delta > 0.0 && confidence_delta < 1.0))
      throw InvalidConfidence("confidence level must lie in (0, 1)");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw InvalidArgument("stretch margin must be positive");
    if (max_retries < 0) throw InvalidArgument("max_retries must be >= 0");
  }
};

struct PointConfig {
  Window window;
  Window stretched;
  std::vector<Point2> interior;
  std::vector<Point2> strip;
  int retries_used = 0;

  /// interior followed by strip; the index order used for tessellations.
  std::vector<Point2> all_points() const {
    std::vector<Point2> pts;
    pts.reserve(interior.size() + strip.size());
    pts.insert(pts.end(), interior.begin(), interior.end());
    pts.insert(pts.end(), strip.begin(), strip.end());
    return pts;
  }
};

/// One unconditioned draw of interior and strip nuclei.
inline PointConfig draw_sppp(Rng& rng, const SpppParams& params, const Window& w) {
  PointConfig cfg;
  cfg.window = w;
  cfg.stretched = w.stretched(params.epsilon);
  const double mean_in = params.intensity_n * w.area();
  const double mean_strip = params.intensity_n * strip_area(cfg.window, cfg.stretched);
  std::uint64_t n_in, n_strip;
  if (params.mode == CountMode::poisson) {
    n_in = sample_poisson_count(rng, mean_in);
    n_strip = sample_poisson_count(rng, mean_strip);
  } else {
    n_in = static_cast<std::uint64_t>(std::llround(mean_in));
    n_strip = static_cast<std::uint64_t>(std::floor(mean_strip));
  }
  cfg.interior = sample_uniform_in(rng, w, n_in);
  cfg.strip = sample_uniform_in_strip(rng, cfg.window, cfg.stretched, n_strip);
  return cfg;
}

/// Acceptance test on an existing tessellation of cfg.all_points().
inline bool accept_tessellation(const PointConfig& cfg, const Tessellation& tess,
                                bool strict_radius = false) {
  const double eps = cfg.stretched.half_extent - cfg.window.half_extent;
  for (std::size_t i = 0; i < cfg.interior.size(); ++i) {
    const VoronoiCell& c = tess.cell(i);
    if (!c.bounded) return false;
    if (strict_radius && c.circ_radius > eps) return false;
  }
  return true;
}

/// True iff every nucleus inside the window has a bounded cell in the
/// tessellation of interior and strip nuclei together.
inline bool accept_config(const PointConfig& cfg, bool strict_radius = false) {
  if (cfg.interior.empty() && cfg.strip.empty())
    throw InvalidArgument("cannot test an empty configuration");
  return accept_tessellation(cfg, build_tessellation(cfg.all_points()), strict_radius);
}

/// An accepted configuration together with its tessellation (index order:
/// interior then strip).
struct SpppDraw {
  PointConfig config;
  Tessellation tessellation;
};

/// Draws until a configuration is accepted; throws RejectionExhausted after
/// max_retries rejected draws.
inline SpppDraw sample_sppp_tessellated(Rng& rng, const SpppParams& params, const Window& w) {
  params.validate();
  w.validate();
  for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
    PointConfig cfg = draw_sppp(rng, params, w);
    cfg.retries_used = attempt;
    if (cfg.interior.empty() && cfg.strip.empty()) return {std::move(cfg), Tessellation{}};
    Tessellation tess = build_tessellation(cfg.all_points());
    if (accept_tessellation(cfg, tess, params.strict_radius))
      return {std::move(cfg), std::move(tess)};
  }
  throw RejectionExhausted("no admissible configuration after " +
                           std::to_string(params.max_retries) + " retries");
}

inline PointConfig sample_sppp(Rng& rng, const SpppParams& params, const Window& w) {
  return sample_sppp_tessellated(rng, params, w).config;
}

}  // namespace vormc
