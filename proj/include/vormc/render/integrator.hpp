// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Unidirectional path tracing with optional next event estimation.
// max_depth bounds the number of segments of every path, light connections
// included, so the estimate is the same truncated integral with and without
// NEE.

#pragma once

#include <cmath>
#include <numbers>

#include "vormc/rng.hpp"
#include "vormc/render/scene.hpp"
#include "vormc/render/vec3.hpp"

namespace vormc::render {

inline Vec3 sample_cosine_hemisphere(const Vec3& n, double u1, double u2) {
  const double r = std::sqrt(u1), phi = 2.0 * std::numbers::pi * u2;
  const double x = r * std::cos(phi), y = r * std::sin(phi);
  const double z = std::sqrt(std::max(0.0, 1.0 - u1));
  Vec3 t, b;
  basis(n, t, b);
  return normalize(x * t + y * b + z * n);
}

inline Rgb trace_radiance(Rng& rng, const Scene& scene, Ray ray, int max_depth, bool nee) {
  Rgb radiance, throughput{1, 1, 1};
  for (int depth = 0; depth < max_depth; ++depth) {
    const auto hit = scene.intersect(ray);
    if (!hit) break;
    const Material& mat = scene.material(scene.quads()[std::size_t(hit->quad)].material);
    const bool front = dot(hit->normal, ray.dir) < 0.0;
    if ((depth == 0 || !nee) && front) radiance += throughput * mat.emission;
    if (is_black(mat.albedo)) break;

    const Vec3 n = front ? hit->normal : -hit->normal;
    const Rgb brdf = mat.albedo * (1.0 / std::numbers::pi);

    if (nee && depth + 2 <= max_depth) {
      const LightSample ls = scene.sample_light(rng.uniform(), rng.uniform(), rng.uniform());
      const Vec3 d = ls.point - hit->point;
      const double dist2 = dot(d, d);
      const Vec3 wi = d / std::sqrt(dist2);
      const double cos_x = dot(n, wi), cos_y = -dot(ls.normal, wi);
      if (cos_x > 0.0 && cos_y > 0.0 && scene.visible(hit->point, ls.point))
        radiance += throughput * brdf * ls.emission * (cos_x * cos_y / (dist2 * ls.pdf_area));
    }

    if (depth + 1 >= max_depth) break;
    // Cosine sampling cancels the cosine and 1/pi of the Lambertian lobe.
    throughput *= mat.albedo;
    if (is_black(throughput)) break;
    ray = {hit->point, sample_cosine_hemisphere(n, rng.uniform(), rng.uniform())};
  }
  return radiance;
}

}  // namespace vormc::render
