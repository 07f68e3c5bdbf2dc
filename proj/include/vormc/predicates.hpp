// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// Orientation and in-circle predicates with a floating-point filter and an
// exact expansion-arithmetic fallback. The returned value has the sign of
// the exact determinant; its magnitude is only meaningful on the fast path.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace vormc::predicates {

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon() / 2;  // 2^-53
inline constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kInCircleBound = (10.0 + 96.0 * kEps) * kEps;

// Expansions are stored in increasing order of magnitude, non-overlapping,
// with zero components removed.
using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

inline Expansion two_diff(double a, double b) {
  double x, y;
  two_sum(a, -b, x, y);
  Expansion e;
  if (y != 0.0) e.push_back(y);
  if (x != 0.0) e.push_back(x);
  return e;
}

inline Expansion grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double ei : e) {
    double s, r;
    two_sum(q, ei, s, r);
    if (r != 0.0) h.push_back(r);
    q = s;
  }
  if (q != 0.0) h.push_back(q);
  return h;
}

inline Expansion sum(const Expansion& e, const Expansion& f) {
  Expansion h = e;
  for (double fi : f) h = grow(h, fi);
  return h;
}

inline Expansion negate(Expansion e) {
  for (double& x : e) x = -x;
  return e;
}

inline Expansion scale(const Expansion& e, double b) {
  Expansion h;
  if (e.empty() || b == 0.0) return h;
  h.reserve(2 * e.size());
  double q, lo;
  two_product(e[0], b, q, lo);
  if (lo != 0.0) h.push_back(lo);
  for (std::size_t i = 1; i < e.size(); ++i) {
    double p1, p0, s, r;
    two_product(e[i], b, p1, p0);
    two_sum(q, p0, s, r);
    if (r != 0.0) h.push_back(r);
    two_sum(p1, s, q, r);
    if (r != 0.0) h.push_back(r);
  }
  if (q != 0.0) h.push_back(q);
  return h;
}

inline Expansion mul(const Expansion& e, const Expansion& f) {
  Expansion h;
  for (double fi : f) h = sum(h, scale(e, fi));
  return h;
}

inline double most_significant(const Expansion& e) {
  return e.empty() ? 0.0 : e.back();
}

inline double orient_exact(double ax, double ay, double bx, double by,
                           double cx, double cy) {
  const Expansion ux = two_diff(ax, cx), uy = two_diff(ay, cy);
  const Expansion vx = two_diff(bx, cx), vy = two_diff(by, cy);
  return most_significant(sum(mul(ux, vy), negate(mul(uy, vx))));
}

inline double incircle_exact(double ax, double ay, double bx, double by,
                             double cx, double cy, double dx, double dy) {
  const Expansion adx = two_diff(ax, dx), ady = two_diff(ay, dy);
  const Expansion bdx = two_diff(bx, dx), bdy = two_diff(by, dy);
  const Expansion cdx = two_diff(cx, dx), cdy = two_diff(cy, dy);
  const Expansion alift = sum(mul(adx, adx), mul(ady, ady));
  const Expansion blift = sum(mul(bdx, bdx), mul(bdy, bdy));
  const Expansion clift = sum(mul(cdx, cdx), mul(cdy, cdy));
  const Expansion bc = sum(mul(bdx, cdy), negate(mul(bdy, cdx)));
  const Expansion ca = sum(mul(cdx, ady), negate(mul(cdy, adx)));
  const Expansion ab = sum(mul(adx, bdy), negate(mul(ady, bdx)));
  return most_significant(
      sum(sum(mul(alift, bc), mul(blift, ca)), mul(clift, ab)));
}

}  // namespace detail

/// Positive if (a, b, c) turn counter-clockwise, negative if clockwise,
/// zero if collinear. Exact sign.
inline double orient2d(double ax, double ay, double bx, double by, double cx,
                       double cy) {
  const double detleft = (ax - cx) * (by - cy);
  const double detright = (ay - cy) * (bx - cx);
  const double det = detleft - detright;
  const double bound =
      detail::kOrientBound * (std::abs(detleft) + std::abs(detright));
  if (det > bound || -det > bound) return det;
  return detail::orient_exact(ax, ay, bx, by, cx, cy);
}

/// Positive if d lies strictly inside the circle through the
/// counter-clockwise triangle (a, b, c), negative if outside, zero if
/// cocircular. Exact sign.
inline double incircle(double ax, double ay, double bx, double by, double cx,
                       double cy, double dx, double dy) {
  const double adx = ax - dx, ady = ay - dy;
  const double bdx = bx - dx, bdy = by - dy;
  const double cdx = cx - dx, cdy = cy - dy;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent =
      (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
      (std::abs(cdxady) + std::abs(adxcdy)) * blift +
      (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = detail::kInCircleBound * permanent;
  if (det > bound || -det > bound) return det;
  return detail::incircle_exact(ax, ay, bx, by, cx, cy, dx, dy);
}

}  // namespace vormc::predicates
