// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Per-pixel integration. A sampler places sub-pixel positions in the
// canonical window [-1/2, 1/2]^2, the integrator traces one path through
// each interior position, and a weighting combines the radiance samples:
// plain mean, or Voronoi cell areas (vor, fvor) from one tessellation
// shared by the three channels.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vormc/errors.hpp"
#include "vormc/geom2d.hpp"
#include "vormc/parallel.hpp"
#include "vormc/pointproc.hpp"
#include "vormc/rng.hpp"
#include "vormc/render/image.hpp"
#include "vormc/render/integrator.hpp"
#include "vormc/render/scene.hpp"

namespace vormc::render {

enum class SamplerKind { rnd, stratified, sppp };
enum class Weighting { mc, vor, fvor };

inline const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::rnd: return "rnd";
    case SamplerKind::stratified: return "stratified";
    case SamplerKind::sppp: return "sppp";
  }
  return "?";
}

inline const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::mc: return "mc";
    case Weighting::vor: return "vor";
    case Weighting::fvor: return "fvor";
  }
  return "?";
}

inline SamplerKind parse_sampler(const std::string& s) {
  if (s == "rnd") return SamplerKind::rnd;
  if (s == "stratified") return SamplerKind::stratified;
  if (s == "sppp") return SamplerKind::sppp;
  throw InvalidArgument("unknown sampler '" + s + "' (expected rnd, stratified or sppp)");
}

inline Weighting parse_weighting(const std::string& s) {
  if (s == "mc") return Weighting::mc;
  if (s == "vor") return Weighting::vor;
  if (s == "fvor") return Weighting::fvor;
  throw InvalidArgument("unknown weighting '" + s + "' (expected mc, vor or fvor)");
}

struct RenderJob {
  const Scene* scene = nullptr;
  int spp = 16;
  SamplerKind sampler = SamplerKind::rnd;
  Weighting weighting = Weighting::mc;
  int max_depth = 8;
  bool nee = true;
  std::uint64_t seed = 0;
  double delta = 1e-3;
  CountMode mode = CountMode::fixed;
  std::optional<double> clamp;  ///< firefly cap; defaults to 10x the brightest emitter
  unsigned threads = 0;

  double radiance_cap() const { return clamp ? *clamp : 10.0 * scene->max_emission(); }

  void validate() const {
    if (!scene) throw InvalidArgument("render job has no scene");
    if (spp < 1) throw InvalidArgument("spp must be >= 1");
    if (max_depth < 1) throw InvalidArgument("max depth must be >= 1");
    if (weighting != Weighting::mc && sampler != SamplerKind::sppp)
      throw InvalidArgument(std::string("weighting '") + to_string(weighting) +
                            "' requires the sppp sampler");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfidence("delta must lie in (0, 1)");
    if (clamp && !(*clamp > 0.0)) throw InvalidArgument("clamp must be positive");
  }
};

struct RadianceSample {
  Point2 pixel_uv;
  Rgb radiance;
};

struct PixelResult {
  Rgb color;
  bool fallback = false;  ///< Voronoi weighting was not possible; mean used
  std::vector<RadianceSample> samples;
  std::vector<Point2> strip;
  std::vector<double> weights;  ///< per-sample cell area, empty for mean weighting
};

namespace detail {

// Jittered k x k grid when spp is a square, otherwise n-rooks.
inline std::vector<Point2> stratified_positions(Rng& rng, int spp) {
  std::vector<Point2> pts;
  pts.reserve(std::size_t(spp));
  const int k = int(std::lround(std::sqrt(double(spp))));
  if (k * k == spp) {
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i)
        pts.push_back({(i + rng.uniform()) / k - 0.5, (j + rng.uniform()) / k - 0.5});
    return pts;
  }
  std::vector<int> perm(static_cast<std::size_t>(spp));
  for (int i = 0; i < spp; ++i) perm[std::size_t(i)] = i;
  for (int i = spp - 1; i > 0; --i) {
    const auto j = std::size_t(rng.next_u64() % std::uint64_t(i + 1));
    std::swap(perm[std::size_t(i)], perm[j]);
  }
  for (int i = 0; i < spp; ++i)
    pts.push_back({(i + rng.uniform()) / spp - 0.5, (perm[std::size_t(i)] + rng.uniform()) / spp - 0.5});
  return pts;
}

inline Rgb mean_of(const std::vector<RadianceSample>& s) {
  Rgb m;
  for (const auto& x : s) m += x.radiance;
  return s.empty() ? m : m / double(s.size());
}

}  // namespace detail

/// One pixel of `job`; pixel_index = y * width + x selects the Rng stream.
inline PixelResult render_pixel(const RenderJob& job, std::size_t pixel_index,
                                bool keep_samples = false) {
  const Scene& scene = *job.scene;
  const int px = int(pixel_index % std::size_t(scene.camera.width));
  const int py = int(pixel_index / std::size_t(scene.camera.width));
  Rng rng(job.seed, pixel_index);
  const Window w = Window::unit();
  const double cap = job.radiance_cap();

  std::vector<Point2> positions;
  std::optional<SpppDraw> draw;
  bool fallback = false;
  switch (job.sampler) {
    case SamplerKind::rnd: positions = sample_uniform_in(rng, w, std::size_t(job.spp)); break;
    case SamplerKind::stratified: positions = detail::stratified_positions(rng, job.spp); break;
    case SamplerKind::sppp: {
      SpppParams params = SpppParams::for_intensity(double(job.spp), job.delta, job.mode);
      try {
        draw = sample_sppp_tessellated(rng, params, w);
        positions = draw->config.interior;
      } catch (const RejectionExhausted&) {
        fallback = true;
        positions = sample_uniform_in(rng, w, std::size_t(job.spp));
      }
      break;
    }
  }

  PixelResult res;
  res.samples.reserve(positions.size());
  for (const Point2& p : positions) {
    const Ray ray = scene.camera.generate(px, py, p.x, p.y);
    res.samples.push_back({p, min(trace_radiance(rng, scene, ray, job.max_depth, job.nee), cap)});
  }

  if (job.weighting == Weighting::mc || fallback || res.samples.size() < 2) {
    res.fallback = fallback || (job.weighting != Weighting::mc);
    res.color = detail::mean_of(res.samples);
  } else {
    const Tessellation& tess = draw->tessellation;
    Rgb num;
    double den = 0.0;
    res.weights.resize(res.samples.size(), 0.0);
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
      const VoronoiCell& c = tess.cell(i);
      if (job.weighting == Weighting::fvor && !cell_within(c, draw->config.stretched)) continue;
      res.weights[i] = c.area;
      num += res.samples[i].radiance * c.area;
      den += c.area;
    }
    if (job.weighting == Weighting::vor) {
      res.color = num;  // |W| = 1
    } else if (den > 0.0) {
      res.color = num / den;
    } else {
      res.fallback = true;
      res.weights.clear();
      res.color = detail::mean_of(res.samples);
    }
  }
  if (draw && keep_samples) res.strip = draw->config.strip;
  if (!keep_samples) {
    res.samples.clear();
    res.samples.shrink_to_fit();
    res.weights.clear();
  }
  return res;
}

inline PixelResult render_pixel(const RenderJob& job, int x, int y, bool keep_samples = false) {
  return render_pixel(job, std::size_t(y) * std::size_t(job.scene->camera.width) + std::size_t(x),
                      keep_samples);
}

struct RenderResult {
  Image image;
  std::size_t fallbacks = 0;
  double wall_ms = 0.0;
};

inline RenderResult render_image(const RenderJob& job) {
  job.validate();
  const auto start = std::chrono::steady_clock::now();
  const Camera& cam = job.scene->camera;
  RenderResult out;
  out.image = Image(cam.width, cam.height);
  std::vector<char> flagged(out.image.pixels.size(), 0);
  parallel_for(out.image.pixels.size(), job.threads, [&](std::size_t i) {
    const PixelResult p = render_pixel(job, i);
    out.image.pixels[i] = p.color;
    flagged[i] = p.fallback;
  });
  for (char f : flagged) out.fallbacks += std::size_t(f);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Machine-readable dump of one pixel's samples and weights.
inline nlohmann::json pixel_dump_json(const RenderJob& job, int x, int y, const PixelResult& p) {
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    nlohmann::json s = {{"uv", {p.samples[i].pixel_uv.x, p.samples[i].pixel_uv.y}},
                        {"radiance", {p.samples[i].radiance.x, p.samples[i].radiance.y,
                                      p.samples[i].radiance.z}}};
    if (!p.weights.empty()) s["weight"] = p.weights[i];
    samples.push_back(s);
  }
  nlohmann::json strip = nlohmann::json::array();
  for (const Point2& q : p.strip) strip.push_back({q.x, q.y});
  return {{"pixel", {x, y}},
          {"sampler", to_string(job.sampler)},
          {"weighting", to_string(job.weighting)},
          {"spp", job.spp},
          {"fallback", p.fallback},
          {"color", {p.color.x, p.color.y, p.color.z}},
          {"samples", samples},
          {"strip", strip}};
}

}  // namespace vormc::render
