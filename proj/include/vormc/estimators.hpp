// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Integral estimators over a square window:
//   mc    |W| times the plain sample mean of f at uniform points
//   vor   sum of f(x) * area(cell(x)) over nuclei in W of a stretched draw
//   fvor  the same, self-normalized over cells that stay inside W'
//   cvor  nuclei only in W, cells clipped to W (biased)

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "vormc/errors.hpp"
#include "vormc/geom2d.hpp"
#include "vormc/pointproc.hpp"
#include "vormc/rng.hpp"

namespace vormc {

struct Integrand {
  std::string name;
  std::function<double(Point2)> eval;
  Window support = Window::unit();
  std::optional<double> exact_value;
  std::optional<double> holder_alpha;

  double operator()(Point2 p) const { return eval(p); }
};

enum class Method { mc, vor, fvor, cvor };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::vor: return "vor";
    case Method::fvor: return "fvor";
    case Method::cvor: return "cvor";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "mc") return Method::mc;
  if (s == "vor") return Method::vor;
  if (s == "fvor") return Method::fvor;
  if (s == "cvor") return Method::cvor;
  throw InvalidArgument("unknown method '" + s + "' (expected mc, vor, fvor or cvor)");
}

struct EstimateReport {
  Method method = Method::mc;
  double value = 0.0;
  std::size_t n_interior = 0;
  std::size_t n_strip = 0;
  int retries = 0;
  std::chrono::nanoseconds wall_time{0};

  double wall_ms() const { return std::chrono::duration<double, std::milli>(wall_time).count(); }
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::chrono::nanoseconds elapsed() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start_);
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Result of weighting one accepted draw, or nullopt if it must be redrawn
// (a non-finite sample, or an empty filtered set).
using DrawValue = std::optional<double>;

template <typename Weigh>
EstimateReport run_stretched(Rng& rng, const SpppParams& params, const Window& w, Method method,
                             Weigh&& weigh) {
  params.validate();
  Stopwatch clock;
  EstimateReport rep;
  rep.method = method;
  int redraws = 0;
  for (;;) {
    SpppDraw draw = sample_sppp_tessellated(rng, params, w);
    rep.retries += draw.config.retries_used;
    const DrawValue v = weigh(draw);
    if (v) {
      rep.value = *v;
      rep.n_interior = draw.config.interior.size();
      rep.n_strip = draw.config.strip.size();
      break;
    }
    ++rep.retries;
    if (++redraws > params.max_retries) {
      if (method == Method::fvor)
        throw EmptyFilter("no cell stayed inside the stretched window after " +
                          std::to_string(params.max_retries) + " redraws");
      throw RejectionExhausted("integrand was not finite at the sampled nuclei after " +
                               std::to_string(params.max_retries) + " redraws");
    }
  }
  rep.wall_time = clock.elapsed();
  return rep;
}

}  // namespace detail

/// |W| times the mean of f at n uniform points of w. A non-finite sample is
/// redrawn.
inline EstimateReport estimate_mc(Rng& rng, const Integrand& f, std::size_t n, const Window& w) {
  if (n < 1) throw InvalidArgument("mc needs at least one sample");
  w.validate();
  detail::Stopwatch clock;
  EstimateReport rep;
  rep.method = Method::mc;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v;
    for (int attempt = 0;; ++attempt) {
      const Point2 p{w.xmin() + w.side() * rng.uniform(), w.ymin() + w.side() * rng.uniform()};
      v = f(p);
      if (std::isfinite(v)) break;
      ++rep.retries;
      if (attempt > 1000) throw InvalidArgument("integrand '" + f.name + "' is not finite on W");
    }
    sum += v;
  }
  rep.value = w.area() * sum / double(n);
  rep.n_interior = n;
  rep.wall_time = clock.elapsed();
  return rep;
}

/// Sum over interior nuclei of f(x) times the (unclipped) cell area.
inline EstimateReport estimate_vor(Rng& rng, const Integrand& f, const SpppParams& params,
                                   const Window& w) {
  return detail::run_stretched(rng, params, w, Method::vor,
                               [&](const SpppDraw& d) -> detail::DrawValue {
                                 double sum = 0.0;
                                 for (std::size_t i = 0; i < d.config.interior.size(); ++i) {
                                   const double v = f(d.config.interior[i]);
                                   if (!std::isfinite(v)) return std::nullopt;
                                   sum += v * d.tessellation.cell(i).area;
                                 }
                                 return sum;
                               });
}

/// Self-normalized weighted mean over interior nuclei whose cell lies inside
/// the stretched window, scaled by |W|. An empty filtered set is redrawn.
inline EstimateReport estimate_fvor(Rng& rng, const Integrand& f, const SpppParams& params,
                                    const Window& w) {
  return detail::run_stretched(rng, params, w, Method::fvor,
                               [&](const SpppDraw& d) -> detail::DrawValue {
                                 double num = 0.0, den = 0.0;
                                 for (std::size_t i = 0; i < d.config.interior.size(); ++i) {
                                   const VoronoiCell& c = d.tessellation.cell(i);
                                   if (!cell_within(c, d.config.stretched)) continue;
                                   const double v = f(d.config.interior[i]);
                                   if (!std::isfinite(v)) return std::nullopt;
                                   num += v * c.area;
                                   den += c.area;
                                 }
                                 if (den <= 0.0) return std::nullopt;
                                 return w.area() * num / den;
                               });
}

/// n uniform nuclei in w, cells of the nuclei alone clipped to w.
inline EstimateReport estimate_cvor(Rng& rng, const Integrand& f, std::size_t n, const Window& w) {
  if (n < 1) throw InvalidArgument("cvor needs at least one sample");
  w.validate();
  detail::Stopwatch clock;
  EstimateReport rep;
  rep.method = Method::cvor;
  for (int attempt = 0;; ++attempt) {
    const std::vector<Point2> pts = sample_uniform_in(rng, w, n);
    const Tessellation tess = build_tessellation(pts);
    double sum = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n && finite; ++i) {
      const double v = f(pts[i]);
      finite = std::isfinite(v);
      const VoronoiCell& c = tess.cell(i);
      const double area = cell_within(c, w) ? c.area : clip_cell(c, w).area;
      sum += v * area;
    }
    if (finite) {
      rep.value = sum;
      break;
    }
    ++rep.retries;
    if (attempt > 1000) throw InvalidArgument("integrand '" + f.name + "' is not finite on W");
  }
  rep.n_interior = n;
  rep.wall_time = clock.elapsed();
  return rep;
}

/// Dispatch by method. `n` is the intensity (expected interior count per
/// unit area); the stretched estimators solve their margin from `params`.
inline EstimateReport estimate(Method method, Rng& rng, const Integrand& f,
                               const SpppParams& params, const Window& w) {
  const auto count = static_cast<std::size_t>(std::llround(params.intensity_n * w.area()));
  switch (method) {
    case Method::mc: return estimate_mc(rng, f, count, w);
    case Method::vor: return estimate_vor(rng, f, params, w);
    case Method::fvor: return estimate_fvor(rng, f, params, w);
    case Method::cvor: return estimate_cvor(rng, f, count, w);
  }
  throw InvalidArgument("unknown method");
}

}  // namespace vormc
