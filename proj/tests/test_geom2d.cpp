// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hull_oracle.hpp"
#include "vormc/geom2d.hpp"
#include "vormc/rng.hpp"

using namespace vormc;

namespace {

std::vector<Point2> random_points(Rng& rng, std::size_t n, double lo = -0.5, double hi = 0.5) {
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {rng.uniform(lo, hi), rng.uniform(lo, hi)};
  return pts;
}

std::size_t nearest(const std::vector<Point2>& pts, Point2 q) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = dot(pts[i] - q, pts[i] - q);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST(Predicates, ExactOnNearDegenerateInput) {
  // Classic near-collinear stress: points on the line y = x perturbed by ulps.
  const double base = 0.5;
  const Point2 a{12.0, 12.0}, b{24.0, 24.0};
  int sign_changes = 0;
  double prev = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double x = std::nextafter(base, 1.0) + i * 1e-17;
    const double o = orient2d({x, base}, a, b);
    if (prev != 0.0 && o != 0.0 && (o > 0) != (prev > 0)) ++sign_changes;
    if (o != 0.0) prev = o;
  }
  EXPECT_LE(sign_changes, 1);
  EXPECT_EQ(orient2d({0, 0}, {1, 1}, {2, 2}), 0.0);
  EXPECT_EQ(orient2d({0.1, 0.1}, {0.3, 0.3}, {0.7, 0.7}) > 0, false);
  EXPECT_EQ(incircle({0, 0}, {1, 0}, {1, 1}, {0, 1}), 0.0);
  EXPECT_GT(incircle({0, 0}, {1, 0}, {0, 1}, {0.2, 0.2}), 0.0);
  EXPECT_LT(incircle({0, 0}, {1, 0}, {0, 1}, {2, 2}), 0.0);
}

TEST(BuildTessellation, SinglePointIsUnbounded) {
  const auto t = build_tessellation({{0, 0}});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_FALSE(t.cell(0).bounded);
  EXPECT_TRUE(std::isinf(t.cell(0).area));
  EXPECT_TRUE(cell_contains(t.cell(0), {123.0, -77.0}));
  EXPECT_DOUBLE_EQ(clip_cell(t.cell(0), Window::unit()).area, 1.0);
}

TEST(BuildTessellation, TwoPointsSplitWindow) {
  const auto t = build_tessellation({{-0.25, 0}, {0.25, 0}});
  for (const auto& c : t.cells()) {
    EXPECT_FALSE(c.bounded);
    EXPECT_NEAR(clip_cell(c, Window::unit()).area, 0.5, 1e-15);
  }
}

TEST(BuildTessellation, CornersAndCenter) {
  // Bisectors with the four corners give the diamond |x| + |y| <= 1/2.
  const auto t = build_tessellation({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {0, 0}});
  for (int i = 0; i < 4; ++i) EXPECT_FALSE(t.cell(i).bounded);
  const auto& c = t.cell(4);
  ASSERT_TRUE(c.bounded);
  EXPECT_NEAR(c.area, 0.5, 1e-15);
  EXPECT_NEAR(c.circ_radius, 0.5, 1e-15);
  EXPECT_EQ(c.vertices.size(), 4u);
  EXPECT_NEAR(clip_cell(c, Window::unit()).area, 0.5, 1e-15);
  EXPECT_TRUE(cell_within(c, Window::unit()));
  EXPECT_FALSE(cell_within(c, Window{{0, 0}, 0.2}));
  EXPECT_FALSE(cell_within(t.cell(0), Window{{0, 0}, 100.0}));
}

TEST(BuildTessellation, EdgeMidpointsAndCenterGiveSquareCell) {
  const auto t = build_tessellation({{-0.5, 0}, {0.5, 0}, {0, -0.5}, {0, 0.5}, {0, 0}});
  const auto& c = t.cell(4);
  ASSERT_TRUE(c.bounded);
  EXPECT_NEAR(c.area, 0.25, 1e-15);
  EXPECT_NEAR(c.circ_radius, std::sqrt(2.0) / 4, 1e-15);
  EXPECT_NEAR(clip_cell(c, Window::unit()).area, 0.25, 1e-15);
  EXPECT_TRUE(cell_within(c, Window::unit()));
  EXPECT_FALSE(cell_within(c, Window{{0, 0}, 0.2}));
}

TEST(BuildTessellation, LatticeCenterCellIsUnitSquare) {
  std::vector<Point2> pts;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) pts.push_back({double(i), double(j)});
  const auto t = build_tessellation(pts);
  int bounded = 0;
  for (const auto& c : t.cells()) {
    if (!c.bounded) continue;
    ++bounded;
    EXPECT_EQ(c.nucleus, (Point2{0, 0}));
    EXPECT_NEAR(c.area, 1.0, 1e-15);
    EXPECT_EQ(c.vertices.size(), 4u);
  }
  EXPECT_EQ(bounded, 1);
}

TEST(BuildTessellation, LargeLatticeWithCocircularQuads) {
  std::vector<Point2> pts;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) pts.push_back({0.05 * i - 0.475, 0.05 * j - 0.475});
  const auto t = build_tessellation(pts);
  double sum = 0.0;
  for (const auto& c : t.cells()) {
    sum += clip_cell(c, Window::unit()).area;
    if (c.bounded) EXPECT_NEAR(c.area, 0.0025, 1e-12);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(BuildTessellation, CollinearInput) {
  const auto t = build_tessellation({{0, 0}, {0.2, 0.1}, {-0.2, -0.1}, {0.4, 0.2}});
  double sum = 0.0;
  for (const auto& c : t.cells()) {
    EXPECT_FALSE(c.bounded);
    sum += clip_cell(c, Window::unit()).area;
  }
  EXPECT_NEAR(sum, 1.0, 1e-14);
}

TEST(BuildTessellation, CollinearPointsOnHullEdge) {
  // (0,-1) sits in the middle of a hull edge: its cell is unbounded.
  const auto t = build_tessellation({{-1, -1}, {0, -1}, {1, -1}, {0, 1}, {0, 0}});
  EXPECT_FALSE(t.cell(1).bounded);
  EXPECT_TRUE(t.cell(4).bounded);
}

TEST(BuildTessellation, RejectsDuplicates) {
  EXPECT_THROW(build_tessellation({{0, 0}, {1, 0}, {0, 1}, {1, 0}}), DuplicatePoint);
  EXPECT_THROW(build_tessellation({{0, 0}, {0, 0}}), DuplicatePoint);
  EXPECT_THROW(build_tessellation({{0, 0}, {1, 1}, {0, 0}}), DuplicatePoint);
  EXPECT_THROW(build_tessellation({}), InvalidArgument);
  EXPECT_THROW(build_tessellation({{0, std::nan("")}}), InvalidArgument);
}

TEST(ClipCell, EmptyIntersection) {
  const auto t = build_tessellation({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {0, 0}});
  EXPECT_EQ(clip_cell(t.cell(4), Window{{10, 10}, 1}).area, 0.0);
}

// Partition: the brute-force nearest generator owns the query point.
TEST(TessellationProperties, PartitionMatchesNearestGenerator) {
  Rng rng(11, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = random_points(rng, 10 + 30 * trial);
    const auto t = build_tessellation(pts);
    for (int q = 0; q < 1000; ++q) {
      const Point2 p{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
      const std::size_t i = nearest(pts, p);
      EXPECT_TRUE(cell_contains(t.cell(i), p, 1e-12)) << "trial " << trial << " query " << q;
    }
  }
}

TEST(TessellationProperties, ClippedAreasTileWindow) {
  Rng rng(12, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_u32() % 300;
    const auto pts = random_points(rng, n);
    const auto t = build_tessellation(pts);
    double sum = 0.0;
    for (const auto& c : t.cells()) sum += clip_cell(c, Window::unit()).area;
    EXPECT_NEAR(sum, 1.0, 1e-9) << "n = " << n;
  }
}

TEST(TessellationProperties, BoundednessMatchesHullOracle) {
  Rng rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.next_u32() % 198;
    const auto pts = random_points(rng, n);
    const auto t = build_tessellation(pts);
    const auto on_hull = oracle::hull_membership(pts);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(t.cell(i).bounded, !on_hull[i]);
  }
}

TEST(TessellationProperties, BoundedCellsAreConsistent) {
  Rng rng(14, 0);
  const auto pts = random_points(rng, 2000);
  const auto t = build_tessellation(pts);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& c = t.cell(i);
    EXPECT_EQ(c.nucleus, pts[i]);
    if (!c.bounded) continue;
    EXPECT_NEAR(c.area, polygon_area(c.vertices), 1e-15);
    EXPECT_GT(c.area, 0.0);
    EXPECT_TRUE(cell_contains(c, c.nucleus, 0.0));
    double far = 0.0;
    for (std::size_t k = 0; k < c.vertices.size(); ++k) {
      const Point2 a = c.vertices[k], b = c.vertices[(k + 1) % c.vertices.size()],
                   d = c.vertices[(k + 2) % c.vertices.size()];
      EXPECT_GE(cross(b - a, d - b), -1e-12);  // convex, CCW
      const double r = distance(a, c.nucleus);
      EXPECT_LE(r, c.circ_radius + 1e-9);
      far = std::max(far, r);
    }
    EXPECT_NEAR(far, c.circ_radius, 1e-9);
  }
}

TEST(TessellationProperties, ClusteredAndTinyScales) {
  Rng rng(15, 0);
  std::vector<Point2> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({1e-9 * rng.uniform(), 1e-9 * rng.uniform()});
  for (int i = 0; i < 500; ++i) pts.push_back({rng.uniform(-1e6, 1e6), rng.uniform(-1e6, 1e6)});
  const auto t = build_tessellation(pts);
  const auto on_hull = oracle::hull_membership(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(t.cell(i).bounded, !on_hull[i]);
}
