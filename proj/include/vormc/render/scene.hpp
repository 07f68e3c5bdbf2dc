// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Scenes made of parallelograms: Lambertian surfaces, one-sided area
// emitters and a pinhole camera. Loaded from JSON.

#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vormc/errors.hpp"
#include "vormc/render/vec3.hpp"

namespace vormc::render {

struct Material {
  Rgb albedo;    ///< diffuse reflectance, each channel in [0, 1]
  Rgb emission;  ///< radiance leaving the front face
};

/// Parallelogram origin + s*u + t*v, s, t in [0, 1]. The front face is the
/// side of cross(u, v).
struct Quad {
  Vec3 origin, u, v;
  int material = 0;

  Vec3 normal() const { return normalize(cross(u, v)); }
  double area() const { return length(cross(u, v)); }
};

struct Camera {
  Vec3 position{278, 273, -800};
  Vec3 look_at{278, 273, 0};
  Vec3 up{0, 1, 0};
  double fov_deg = 39.3;  ///< vertical
  int width = 128;
  int height = 128;

  /// Ray through film position (px + 1/2 + uv.x, py + 1/2 - uv.y); row 0 is
  /// the top of the image and uv is in the canonical pixel window.
  Ray generate(int px, int py, double ux, double uy) const {
    const Vec3 f = normalize(look_at - position);
    const Vec3 r = normalize(cross(f, up));
    const Vec3 u = cross(r, f);
    const double th = std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
    const double aspect = double(width) / double(height);
    const double sx = (2.0 * (px + 0.5 + ux) / width - 1.0) * th * aspect;
    const double sy = (1.0 - 2.0 * (py + 0.5 - uy) / height) * th;
    return {position, normalize(f + sx * r + sy * u)};
  }

  /// Continuous film coordinates (x right, y down, in pixels) of a point in
  /// front of the camera.
  std::array<double, 2> project(const Vec3& p) const {
    const Vec3 f = normalize(look_at - position);
    const Vec3 r = normalize(cross(f, up));
    const Vec3 u = cross(r, f);
    const double th = std::tan(0.5 * fov_deg * std::numbers::pi / 180.0);
    const double aspect = double(width) / double(height);
    const Vec3 d = p - position;
    const double z = dot(d, f);
    const double sx = dot(d, r) / z / (th * aspect), sy = dot(d, u) / z / th;
    return {0.5 * (sx + 1.0) * width, 0.5 * (1.0 - sy) * height};
  }
};

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 point;
  Vec3 normal;  ///< geometric normal of the front face
  int quad = -1;
};

struct LightSample {
  Vec3 point;
  Vec3 normal;
  Rgb emission;
  double pdf_area = 0.0;
};

class Scene {
 public:
  Camera camera;

  int add_material(const std::string& name, const Material& m) {
    materials_.push_back(m);
    names_[name] = int(materials_.size()) - 1;
    return int(materials_.size()) - 1;
  }
  int material_id(const std::string& name) const {
    const auto it = names_.find(name);
    if (it == names_.end()) throw InvalidArgument("scene: unknown material '" + name + "'");
    return it->second;
  }
  const Material& material(int id) const { return materials_[std::size_t(id)]; }

  void add_quad(const Quad& q) {
    if (!(q.area() > 0.0)) throw InvalidArgument("scene: degenerate quad");
    quads_.push_back(q);
    const Quad& s = quads_.back();
    if (!is_black(material(s.material).emission)) {
      light_area_ += s.area();
      lights_.push_back(quads_.size() - 1);
      light_cdf_.push_back(light_area_);
    }
  }

  /// Axis-aligned box [lo, hi] rotated by `deg` about the vertical axis
  /// through its center.
  void add_box(const Vec3& lo, const Vec3& hi, double deg, int mat) {
    const Vec3 c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double a = deg * std::numbers::pi / 180.0, ca = std::cos(a), sa = std::sin(a);
    auto rot = [&](const Vec3& p) { return Vec3{ca * p.x + sa * p.z, p.y, -sa * p.x + ca * p.z}; };
    auto corner = [&](double sx, double sy, double sz) {
      return c + rot({sx * h.x, sy * h.y, sz * h.z});
    };
    const Vec3 ex = rot({2 * h.x, 0, 0}), ey = {0, 2 * h.y, 0}, ez = rot({0, 0, 2 * h.z});
    add_quad({corner(-1, -1, -1), ez, ex, mat});  // bottom
    add_quad({corner(-1, 1, -1), ex, ez, mat});   // top
    add_quad({corner(-1, -1, -1), ex, ey, mat});  // front (-z)
    add_quad({corner(-1, -1, 1), ey, ex, mat});   // back (+z)
    add_quad({corner(-1, -1, -1), ey, ez, mat});  // -x
    add_quad({corner(1, -1, -1), ez, ey, mat});   // +x
  }

  const std::vector<Quad>& quads() const { return quads_; }
  bool has_lights() const { return !lights_.empty(); }
  double light_area() const { return light_area_; }

  double max_emission() const {
    double m = 0.0;
    for (std::size_t i : lights_) m = std::max(m, max_component(material(quads_[i].material).emission));
    return m;
  }

  std::optional<Hit> intersect(const Ray& ray, double t_max = std::numeric_limits<double>::infinity()) const {
    Hit best;
    best.t = t_max;
    for (std::size_t i = 0; i < quads_.size(); ++i) {
      const Quad& q = quads_[i];
      const Vec3 n = cross(q.u, q.v);
      const double denom = dot(n, ray.dir);
      if (std::abs(denom) < 1e-12 * length(n)) continue;
      const double t = dot(n, q.origin - ray.origin) / denom;
      if (!(t > kTMin && t < best.t)) continue;
      const Vec3 p = ray.origin + t * ray.dir;
      const Vec3 w = n / dot(n, n);
      const Vec3 d = p - q.origin;
      const double s = dot(w, cross(d, q.v));
      const double r = dot(w, cross(q.u, d));
      if (s < 0 || s > 1 || r < 0 || r > 1) continue;
      best.t = t;
      best.point = p;
      best.quad = int(i);
    }
    if (best.quad < 0) return std::nullopt;
    best.normal = quads_[std::size_t(best.quad)].normal();
    return best;
  }

  bool visible(const Vec3& a, const Vec3& b) const {
    const Vec3 d = b - a;
    const double dist = length(d);
    return !intersect({a, d / dist}, dist * (1.0 - 1e-7) - kTMin);
  }

  /// Area-uniform point over all emitters; u0 picks the emitter.
  LightSample sample_light(double u0, double u1, double u2) const {
    const double target = u0 * light_area_;
    std::size_t k = 0;
    while (k + 1 < light_cdf_.size() && light_cdf_[k] <= target) ++k;
    const Quad& q = quads_[lights_[k]];
    return {q.origin + u1 * q.u + u2 * q.v, q.normal(), material(q.material).emission,
            1.0 / light_area_};
  }

  static constexpr double kTMin = 1e-6;

 private:
  std::vector<Material> materials_;
  std::map<std::string, int> names_;
  std::vector<Quad> quads_;
  std::vector<std::size_t> lights_;
  std::vector<double> light_cdf_;
  double light_area_ = 0.0;
};

namespace detail {

inline Vec3 vec3_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument("scene: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// Scene schema:
///   camera    {position, look_at, up, fov_deg, width, height}
///   materials {name: {albedo: [r,g,b], emission: [r,g,b]}}
///   quads     [{origin, u, v, material}]
///   boxes     [{min, max, rotate_y_deg, material}]
inline Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  try {
    if (j.contains("camera")) {
      const auto& c = j.at("camera");
      if (c.contains("position")) s.camera.position = detail::vec3_from(c.at("position"));
      if (c.contains("look_at")) s.camera.look_at = detail::vec3_from(c.at("look_at"));
      if (c.contains("up")) s.camera.up = detail::vec3_from(c.at("up"));
      s.camera.fov_deg = c.value("fov_deg", s.camera.fov_deg);
      s.camera.width = c.value("width", s.camera.width);
      s.camera.height = c.value("height", s.camera.height);
    }
    for (const auto& [name, m] : j.at("materials").items()) {
      Material mat;
      if (m.contains("albedo")) mat.albedo = detail::vec3_from(m.at("albedo"));
      if (m.contains("emission")) mat.emission = detail::vec3_from(m.at("emission"));
      for (int c = 0; c < 3; ++c) {
        if (!(mat.albedo[c] >= 0.0 && mat.albedo[c] <= 1.0))
          throw InvalidArgument("scene: albedo of '" + name + "' outside [0, 1]");
        if (!(mat.emission[c] >= 0.0) || !std::isfinite(mat.emission[c]))
          throw InvalidArgument("scene: emission of '" + name + "' must be finite and >= 0");
      }
      s.add_material(name, mat);
    }
    if (j.contains("quads"))
      for (const auto& q : j.at("quads"))
        s.add_quad({detail::vec3_from(q.at("origin")), detail::vec3_from(q.at("u")),
                    detail::vec3_from(q.at("v")), s.material_id(q.at("material").get<std::string>())});
    if (j.contains("boxes"))
      for (const auto& b : j.at("boxes"))
        s.add_box(detail::vec3_from(b.at("min")), detail::vec3_from(b.at("max")),
                  b.value("rotate_y_deg", 0.0), s.material_id(b.at("material").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("scene: ") + e.what());
  }
  if (!s.has_lights()) throw InvalidArgument("scene: needs at least one emitter");
  if (s.camera.width < 1 || s.camera.height < 1) throw InvalidArgument("scene: bad resolution");
  return s;
}

inline Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("scene '" + path.string() + "': " + e.what());
  }
  return scene_from_json(j);
}

}  // namespace vormc::render
