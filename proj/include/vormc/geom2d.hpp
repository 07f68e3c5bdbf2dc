// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Planar Delaunay triangulation and its dual Voronoi tessellation.
//
// The triangulation is built by Bowyer-Watson insertion over a Hilbert-sorted
// point order. The convex hull is closed off with "ghost" triangles sharing
// a vertex at infinity, so a nucleus is on the hull exactly when one of its
// incident triangles is a ghost. All decisions go through the exact
// predicates in predicates.hpp; a cocircular quadruple never triggers a
// flip, which picks one of the equivalent triangulations and leaves the
// Voronoi diagram unchanged.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vormc/errors.hpp"
#include "vormc/predicates.hpp"

namespace vormc {

// ---------------------------------------------------------------------------
// Basic types
// ---------------------------------------------------------------------------

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

inline constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double orient2d(Point2 a, Point2 b, Point2 c) {
  return predicates::orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

inline double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  return predicates::incircle(a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y);
}

/// Axis-aligned square [cx-h, cx+h] x [cy-h, cy+h].
struct Window {
  Point2 center{0.0, 0.0};
  double half_extent = 0.5;

  static constexpr Window unit() { return Window{}; }

  constexpr double side() const { return 2.0 * half_extent; }
  constexpr double area() const { return side() * side(); }
  constexpr double xmin() const { return center.x - half_extent; }
  constexpr double xmax() const { return center.x + half_extent; }
  constexpr double ymin() const { return center.y - half_extent; }
  constexpr double ymax() const { return center.y + half_extent; }

  /// Closed containment.
  constexpr bool contains(Point2 p) const {
    return p.x >= xmin() && p.x <= xmax() && p.y >= ymin() && p.y <= ymax();
  }

  /// Same center, half extent grown by `margin`.
  constexpr Window stretched(double margin) const {
    return Window{center, half_extent + margin};
  }

  std::vector<Point2> polygon() const {
    return {{xmin(), ymin()}, {xmax(), ymin()}, {xmax(), ymax()}, {xmin(), ymax()}};
  }

  void validate() const {
    if (!(half_extent > 0.0) || !std::isfinite(half_extent) ||
        !std::isfinite(center.x) || !std::isfinite(center.y))
      throw InvalidArgument("window half extent must be positive and finite");
  }
};

inline constexpr double kUnboundedMarker = std::numeric_limits<double>::infinity();

struct VoronoiCell {
  Point2 nucleus;
  /// Counter-clockwise polygon; empty when the cell is unbounded.
  std::vector<Point2> vertices;
  bool bounded = false;
  double area = kUnboundedMarker;
  double circ_radius = kUnboundedMarker;
  /// Nuclei of the adjacent cells. Only populated for unbounded cells,
  /// whose geometry is recovered by half-plane clipping.
  std::vector<Point2> neighbors;
};

// ---------------------------------------------------------------------------
// Polygon helpers
// ---------------------------------------------------------------------------

inline double polygon_area(std::span<const Point2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  const Point2 o = poly[0];
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(poly[i] - o, poly[i + 1] - o);
  return 0.5 * twice;
}

/// Keeps the part of a convex polygon where dot(normal, p - anchor) <= 0.
inline std::vector<Point2> clip_halfplane(std::span<const Point2> poly, Point2 normal,
                                          Point2 anchor) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double da = dot(normal, a - anchor);
    const double db = dot(normal, b - anchor);
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

namespace detail {

inline void dedupe_ring(std::vector<Point2>& ring, double tol) {
  if (ring.empty()) return;
  std::vector<Point2> out;
  out.reserve(ring.size());
  for (const Point2& p : ring)
    if (out.empty() || distance(out.back(), p) > tol) out.push_back(p);
  while (out.size() > 1 && distance(out.front(), out.back()) <= tol) out.pop_back();
  ring = std::move(out);
}

inline std::vector<Point2> clip_to_window(std::span<const Point2> poly, const Window& w) {
  std::vector<Point2> out(poly.begin(), poly.end());
  out = clip_halfplane(out, {1.0, 0.0}, {w.xmax(), 0.0});
  out = clip_halfplane(out, {-1.0, 0.0}, {w.xmin(), 0.0});
  out = clip_halfplane(out, {0.0, 1.0}, {0.0, w.ymax()});
  out = clip_halfplane(out, {0.0, -1.0}, {0.0, w.ymin()});
  return out;
}

inline std::vector<Point2> clip_by_bisectors(Point2 nucleus, std::span<const Point2> neighbors,
                                             const Window& w) {
  std::vector<Point2> poly = w.polygon();
  for (const Point2& q : neighbors) {
    if (poly.empty()) break;
    poly = clip_halfplane(poly, q - nucleus, 0.5 * (nucleus + q));
  }
  return poly;
}

}  // namespace detail

/// Convex polygon cell ∩ w and its area.
struct ClippedCell {
  std::vector<Point2> polygon;
  double area = 0.0;
};

inline ClippedCell clip_cell(const VoronoiCell& cell, const Window& w) {
  ClippedCell out;
  if (cell.bounded)
    out.polygon = detail::clip_to_window(cell.vertices, w);
  else
    out.polygon = detail::clip_by_bisectors(cell.nucleus, cell.neighbors, w);
  detail::dedupe_ring(out.polygon, 1e-12);
  out.area = std::max(0.0, polygon_area(out.polygon));
  return out;
}

/// True iff the cell is bounded and all its vertices lie in the closed window.
inline bool cell_within(const VoronoiCell& cell, const Window& w) {
  if (!cell.bounded) return false;
  return std::all_of(cell.vertices.begin(), cell.vertices.end(),
                     [&](Point2 v) { return w.contains(v); });
}

/// Point-in-cell test; `tol` widens the cell so boundary points count as inside.
inline bool cell_contains(const VoronoiCell& cell, Point2 q, double tol = 1e-12) {
  if (cell.bounded) {
    const auto& v = cell.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2 a = v[i], b = v[(i + 1) % v.size()];
      const double len = distance(a, b);
      if (len == 0.0) continue;
      if (cross(b - a, q - a) / len < -tol) return false;
    }
    return true;
  }
  for (const Point2& n : cell.neighbors) {
    const Point2 d = n - cell.nucleus;
    const double len = std::hypot(d.x, d.y);
    if (dot(d, q - 0.5 * (cell.nucleus + n)) / len > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Delaunay triangulation
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr int kInfinite = -1;
inline constexpr int kNone = -1;

/// Vertex v[i] is opposite edge (v[i+1], v[i+2]); nb[i] is the triangle
/// across that edge. Finite triangles are counter-clockwise. A ghost keeps
/// the vertex at infinity in slot 2 and the exterior of the hull lies to
/// the left of v[0] -> v[1].
struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;
  bool ghost() const { return v[2] == kInfinite; }
};

inline std::uint32_t hilbert_index(std::uint32_t x, std::uint32_t y, std::uint32_t order) {
  std::uint32_t d = 0;
  for (std::uint32_t s = order / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0 ? 1u : 0u;
    const std::uint32_t ry = (y & s) > 0 ? 1u : 0u;
    d += s * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = order - 1 - x;
        y = order - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

class Delaunay {
 public:
  explicit Delaunay(std::span<const Point2> pts) : pts_(pts) {}

  /// Returns false if all points are collinear (no triangle exists).
  bool build() {
    const int n = static_cast<int>(pts_.size());
    if (n < 3) return false;
    std::vector<int> order = hilbert_order();

    const int i0 = order[0], i1 = order[1];
    if (pts_[i0] == pts_[i1]) throw_duplicate(i0);
    int k = -1;
    for (int j = 2; j < n; ++j) {
      if (orient2d(pts_[i0], pts_[i1], pts_[order[j]]) != 0.0) {
        k = j;
        break;
      }
    }
    if (k < 0) return false;
    const int i2 = order[k];
    order.erase(order.begin() + k);
    init_triangle(i0, i1, i2);

    conflict_stamp_.reserve(4 * n);
    start_.assign(n + 1, kNone);
    for (std::size_t j = 2; j < order.size(); ++j) insert(order[j]);
    return true;
  }

  const std::vector<Tri>& tris() const { return tris_; }
  const std::vector<char>& alive() const { return alive_; }
  const std::vector<int>& vertex_tri() const { return vtri_; }

 private:
  std::vector<int> hilbert_order() const {
    double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
    for (const Point2& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
    constexpr std::uint32_t kOrder = 1u << 16;
    const std::size_t n = pts_.size();
    std::vector<std::pair<std::uint32_t, int>> keyed(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto gx = static_cast<std::uint32_t>(
          std::min(65535.0, (pts_[i].x - xmin) / span * 65535.0));
      const auto gy = static_cast<std::uint32_t>(
          std::min(65535.0, (pts_[i].y - ymin) / span * 65535.0));
      keyed[i] = {hilbert_index(gx, gy, kOrder), static_cast<int>(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = keyed[i].second;
    return order;
  }

  [[noreturn]] void throw_duplicate(int i) const {
    throw DuplicatePoint("duplicate point (" + std::to_string(pts_[i].x) + ", " +
                         std::to_string(pts_[i].y) + ")");
  }

  int new_tri(const Tri& t) {
    int id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      tris_[id] = t;
      alive_[id] = 1;
    } else {
      id = static_cast<int>(tris_.size());
      tris_.push_back(t);
      alive_.push_back(1);
      conflict_stamp_.push_back(0);
    }
    return id;
  }

  void init_triangle(int a, int b, int c) {
    vtri_.assign(pts_.size(), kNone);
    if (orient2d(pts_[a], pts_[b], pts_[c]) < 0.0) std::swap(b, c);
    const std::array<int, 3> v{a, b, c};
    const int t0 = new_tri({v, {kNone, kNone, kNone}});
    std::array<int, 3> g{};
    for (int k = 0; k < 3; ++k)
      g[k] = new_tri({{v[(k + 2) % 3], v[(k + 1) % 3], kInfinite}, {kNone, kNone, t0}});
    for (int k = 0; k < 3; ++k) {
      tris_[t0].nb[k] = g[k];
      tris_[g[k]].nb[0] = g[(k + 2) % 3];
      tris_[g[k]].nb[1] = g[(k + 1) % 3];
      vtri_[v[k]] = t0;
    }
    last_ = t0;
  }

  bool in_conflict(const Tri& t, Point2 p) const {
    if (!t.ghost())
      return incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0.0;
    const Point2 a = pts_[t.v[0]], b = pts_[t.v[1]];
    const double o = orient2d(a, b, p);
    if (o > 0.0) return true;
    if (o < 0.0) return false;
    // Collinear with a hull edge: in conflict only strictly inside the segment.
    const double s = dot(p - a, b - a);
    return s > 0.0 && s < dot(b - a, b - a);
  }

  /// Visibility walk; returns a triangle in conflict with p.
  int locate(int pi) {
    const Point2 p = pts_[pi];
    int t = last_;
    for (std::size_t steps = 0;; ++steps) {
      const Tri& tr = tris_[t];
      if (tr.ghost()) return t;
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int a = tr.v[(k + 1) % 3], b = tr.v[(k + 2) % 3];
        if (orient2d(pts_[a], pts_[b], p) < 0.0) {
          t = tr.nb[k];
          moved = true;
          break;
        }
      }
      if (!moved) {
        for (int k = 0; k < 3; ++k)
          if (pts_[tr.v[k]] == p) throw_duplicate(pi);
        return t;
      }
      if (steps > 4 * tris_.size() + 16)
        throw DegenerateInput("point location failed to terminate");
    }
  }

  void insert(int pi) {
    const Point2 p = pts_[pi];
    const int t0 = locate(pi);
    ++epoch_;
    const std::uint32_t in = 2 * epoch_, out = 2 * epoch_ + 1;

    cavity_.clear();
    boundary_.clear();
    cavity_.push_back(t0);
    conflict_stamp_[t0] = in;
    for (std::size_t i = 0; i < cavity_.size(); ++i) {
      const int t = cavity_[i];
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[t].nb[k];
        if (conflict_stamp_[nb] == in) continue;
        if (conflict_stamp_[nb] != out) {
          if (in_conflict(tris_[nb], p)) {
            conflict_stamp_[nb] = in;
            cavity_.push_back(nb);
            continue;
          }
          conflict_stamp_[nb] = out;
        }
        boundary_.push_back({t, k, nb});
      }
    }

    // New triangles (u, w, p) over each boundary edge u -> w.
    new_ids_.clear();
    for (const auto& [t, k, outside] : boundary_) {
      const int u = tris_[t].v[(k + 1) % 3], w = tris_[t].v[(k + 2) % 3];
      new_ids_.push_back(new_tri({{u, w, pi}, {kNone, kNone, outside}}));
      // Retarget the outside triangle's back pointer.
      Tri& o = tris_[outside];
      for (int j = 0; j < 3; ++j)
        if (o.nb[j] == t) o.nb[j] = new_ids_.back();
    }
    // Free the cavity only after the new ids were allocated so that ids of
    // cavity triangles cannot be recycled while the outside links point at them.
    for (int t : cavity_) {
      alive_[t] = 0;
      free_.push_back(t);
    }
    for (int id : new_ids_) start_[tris_[id].v[0] + 1] = id;
    for (int id : new_ids_) {
      const int w = tris_[id].v[1];
      const int s = start_[w + 1];
      tris_[id].nb[0] = s;  // across (w, p)
      tris_[s].nb[1] = id;  // across (p, w)
    }
    for (int id : new_ids_) {
      Tri& t = tris_[id];
      start_[t.v[0] + 1] = kNone;
      // Keep the vertex at infinity in slot 2.
      if (t.v[0] == kInfinite) {
        t.v = {t.v[1], t.v[2], t.v[0]};
        t.nb = {t.nb[1], t.nb[2], t.nb[0]};
      } else if (t.v[1] == kInfinite) {
        t.v = {t.v[2], t.v[0], t.v[1]};
        t.nb = {t.nb[2], t.nb[0], t.nb[1]};
      }
      for (int vi : t.v)
        if (vi != kInfinite) vtri_[vi] = id;
      if (!t.ghost()) last_ = id;
    }
  }

  std::span<const Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<char> alive_;
  std::vector<int> free_;
  std::vector<int> vtri_;
  std::vector<std::uint32_t> conflict_stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<int> start_;
  std::vector<int> cavity_;
  std::vector<int> new_ids_;
  struct BoundaryEdge {
    int tri, k, outside;
  };
  std::vector<BoundaryEdge> boundary_;
  int last_ = 0;
};

inline Point2 circumcenter(Point2 a, Point2 b, Point2 c) {
  const Point2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double bb = dot(ab, ab), cc = dot(ac, ac);
  return {a.x + (ac.y * bb - ab.y * cc) / d, a.y + (ab.x * cc - ac.x * bb) / d};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tessellation
// ---------------------------------------------------------------------------

/// Voronoi tessellation of a finite point set; cells are index-aligned with
/// the generating points. Immutable after construction.
class Tessellation {
 public:
  Tessellation() = default;

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<VoronoiCell>& cells() const { return cells_; }
  const VoronoiCell& cell(std::size_t i) const { return cells_[i]; }
  std::size_t size() const { return points_.size(); }

  friend Tessellation build_tessellation(std::vector<Point2> points);

 private:
  std::vector<Point2> points_;
  std::vector<VoronoiCell> cells_;
};

namespace detail {

inline void check_finite(std::span<const Point2> pts) {
  for (const Point2& p : pts)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InvalidArgument("point coordinates must be finite");
}

// Every cell is unbounded; neighbors are the adjacent points along the line
// (or the single other point).
inline void collinear_cells(std::span<const Point2> pts, std::vector<VoronoiCell>& cells) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && pts[a].y < pts[b].y);
  });
  for (std::size_t i = 0; i + 1 < idx.size(); ++i)
    if (pts[idx[i]] == pts[idx[i + 1]])
      throw DuplicatePoint("duplicate point (" + std::to_string(pts[idx[i]].x) + ", " +
                           std::to_string(pts[idx[i]].y) + ")");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    VoronoiCell& c = cells[idx[i]];
    if (i > 0) c.neighbors.push_back(pts[idx[i - 1]]);
    if (i + 1 < idx.size()) c.neighbors.push_back(pts[idx[i + 1]]);
  }
}

}  // namespace detail

/// Builds the Voronoi tessellation of `points`. Throws DuplicatePoint on
/// coincident points and InvalidArgument on an empty or non-finite input.
/// Fewer than three points, or collinear input, yields only unbounded cells.
inline Tessellation build_tessellation(std::vector<Point2> points) {
  if (points.empty()) throw InvalidArgument("tessellation needs at least one point");
  detail::check_finite(points);

  Tessellation tess;
  tess.points_ = std::move(points);
  const auto& pts = tess.points_;
  const std::size_t n = pts.size();
  tess.cells_.resize(n);
  for (std::size_t i = 0; i < n; ++i) tess.cells_[i].nucleus = pts[i];

  detail::Delaunay dt(pts);
  if (!dt.build()) {
    detail::collinear_cells(pts, tess.cells_);
    return tess;
  }

  const auto& tris = dt.tris();
  const auto& alive = dt.alive();
  std::vector<Point2> centers(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t)
    if (alive[t] && !tris[t].ghost())
      centers[t] = detail::circumcenter(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]]);

  std::vector<int> ring;
  for (std::size_t i = 0; i < n; ++i) {
    VoronoiCell& cell = tess.cells_[i];
    const int vi = static_cast<int>(i);
    const int start = dt.vertex_tri()[i];
    ring.clear();
    bool hull = false;
    int t = start;
    do {
      ring.push_back(t);
      const auto& tr = tris[t];
      const int k = tr.v[0] == vi ? 0 : (tr.v[1] == vi ? 1 : 2);
      if (tr.ghost()) hull = true;
      t = tr.nb[(k + 1) % 3];
    } while (t != start);

    if (hull) {
      for (int r : ring) {
        const auto& tr = tris[r];
        const int k = tr.v[0] == vi ? 0 : (tr.v[1] == vi ? 1 : 2);
        const int a = tr.v[(k + 1) % 3];
        if (a != detail::kInfinite) cell.neighbors.push_back(pts[a]);
      }
      continue;
    }
    cell.vertices.reserve(ring.size());
    for (int r : ring) cell.vertices.push_back(centers[r]);
    detail::dedupe_ring(cell.vertices, 1e-12);
    cell.bounded = true;
    cell.area = polygon_area(cell.vertices);
    double r2 = 0.0;
    for (const Point2& v : cell.vertices) {
      const Point2 d = v - cell.nucleus;
      r2 = std::max(r2, dot(d, d));
    }
    cell.circ_radius = std::sqrt(r2);
  }
  return tess;
}

}  // namespace vormc
