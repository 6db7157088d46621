#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rflow/error.hpp"
#include "rflow/curve.hpp"
#include "test_helpers.hpp"

using namespace rflow;
using testutil::circle;

TEST_CASE("regular polygon area and perimeter match closed forms") {
  for (std::size_t n : {16u, 100u, 512u}) {
    double R = 0.7;
    auto c = circle(R, n);
    double a_exact = 0.5 * n * R * R * std::sin(2.0 * M_PI / n);
    double p_exact = 2.0 * n * R * std::sin(M_PI / n);
    CHECK(area(c) == doctest::Approx(a_exact).epsilon(1e-13));
    CHECK(perimeter(c) == doctest::Approx(p_exact).epsilon(1e-13));
  }
}

TEST_CASE("turning-angle curvature is exact on an inscribed regular polygon") {
  for (double R : {0.05, 1.0, 3.0}) {
    auto c = circle(R, 512);
    for (double k : curvature(c)) CHECK(std::abs(k - 1.0 / R) <= 1e-11 / R);
  }
}

TEST_CASE("curvature on an ellipse converges at second order") {
  // exact curvature at (a, 0) is a / b^2
  double a = 2.0, b = 1.0;
  auto ellipse = [&](std::size_t n) {
    std::vector<Point2> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      double t = 2.0 * M_PI * k / n;
      v[k] = {a * std::cos(t), b * std::sin(t)};
    }
    return PlanarCurve(v);
  };
  double exact = a / (b * b);
  double e1 = std::abs(curvature_at(ellipse(256), 0) - exact);
  double e2 = std::abs(curvature_at(ellipse(512), 0) - exact);
  CHECK(e1 < 1e-2);
  CHECK(e2 < e1 / 3.0);
}

TEST_CASE("uniform resampling of a regular polygon is the identity") {
  auto c = circle(1.3, 400);
  auto r = resample_uniform(c, 400);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(dist(c[i], r[i]) < 1e-12);
}

TEST_CASE("resampling the unit circle changes area and perimeter by O(h^2)") {
  auto c = circle(1.0, 512);
  // shift the start point half an edge so resampling is not the identity
  std::vector<Point2> v = c.vertices();
  std::vector<Point2> shifted(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) shifted[i] = 0.5 * (v[i] + v[(i + 1) % v.size()]);
  PlanarCurve s(shifted);
  auto r = resample_uniform(s, 512);
  CHECK(std::abs(area(r) - area(s)) / area(s) < 1e-3);
  CHECK(std::abs(perimeter(r) - perimeter(s)) / perimeter(s) < 1e-3);
}

TEST_CASE("resampling a square keeps points on the boundary and the perimeter") {
  PlanarCurve sq(testutil::rectangle_points(0.5, 0.5, 4));
  auto r = resample_uniform(sq, 64);
  CHECK(perimeter(r) == doctest::Approx(4.0).epsilon(1e-14));
  for (auto p : r.vertices()) {
    double m = std::max(std::abs(p.x), std::abs(p.y));
    CHECK(m == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("clockwise input is normalised to counter-clockwise") {
  auto v = testutil::circle_points(1.0, 64, {}, true);
  PlanarCurve c(v);
  CHECK(area(c) > 0.0);
  // reversing twice recovers the original ordering
  std::vector<Point2> back(v.rbegin(), v.rend());
  PlanarCurve d(back);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(dist(c[i], d[i]) == 0.0);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(PlanarCurve(testutil::circle_points(1.0, 15)), Error);
  auto v = testutil::circle_points(1.0, 32);
  v[5] = v[4];
  CHECK_THROWS_AS(PlanarCurve{v}, Error);

  // figure eight: the lemniscate crosses itself at the origin
  std::vector<Point2> eight;
  for (int k = 0; k < 64; ++k) {
    double t = 2.0 * M_PI * (k + 0.5) / 64;
    eight.push_back({std::sin(t), std::sin(t) * std::cos(t)});
  }
  CHECK_FALSE(is_simple(eight));
  CHECK_THROWS_AS(PlanarCurve{eight}, Error);
  CHECK(is_simple(testutil::circle_points(1.0, 64)));
}

TEST_CASE("touching vertex counts as non-simple (exact predicate)") {
  auto v = testutil::rectangle_points(1.0, 1.0, 8);
  // push one vertex of the top edge down onto the bottom edge
  v[28] = {v[28].x, -1.0};
  CHECK_FALSE(is_simple(v));
}

TEST_CASE("families of intersecting curves are rejected") {
  std::vector<PlanarCurve> two{circle(1.0, 64), circle(1.0, 64, {1.5, 0.0})};
  CHECK_THROWS_AS(CurveFamily{two}, Error);
  std::vector<PlanarCurve> apart{circle(1.0, 64), circle(1.0, 64, {2.5, 0.0})};
  CHECK_NOTHROW(CurveFamily{apart});
}

TEST_CASE("signed distance: inside negative, vertex zero, outside positive") {
  std::size_t n = 256;
  auto c = circle(1.0, n);
  CHECK(signed_distance(c, {0.0, 0.0}) == doctest::Approx(-std::cos(M_PI / n)).epsilon(1e-14));
  CHECK(signed_distance(c, c[17]) == 0.0);
  CHECK(signed_distance(c, {2.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("minimal width of a thin rectangle") {
  PlanarCurve rect(testutil::rectangle_points(2.0, 0.05, 16));
  auto w = min_width(rect);
  CHECK(w.width == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(w.direction == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("inradius of a circle and a rectangle") {
  auto ci = inradius(circle(1.0, 512));
  CHECK(std::abs(ci.radius - 1.0) < 1e-2);
  PlanarCurve rect(testutil::rectangle_points(2.0, 0.05, 64));
  auto ri = inradius(rect);
  CHECK(std::abs(ri.radius - 0.05) < 1e-3);
}

TEST_CASE("property: random star polygons are valid, CCW and translation invariant") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.6, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 32 + trial;
    std::vector<Point2> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      double t = -2.0 * M_PI * k / n;  // clockwise on purpose
      double rad = u(rng);
      v[k] = {rad * std::cos(t), rad * std::sin(t)};
    }
    PlanarCurve c(v);
    CHECK(area(c) > 0.0);
    CHECK(is_simple(c.vertices()));
    auto k0 = curvature(c);
    std::vector<Point2> moved = c.vertices();
    for (auto& p : moved) p = p + Point2{3.25, -1.5};
    auto k1 = curvature(PlanarCurve(moved));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(k0[i] - k1[i]) < 1e-9 * (1 + std::abs(k0[i])));
    // area of a convex-hull-free check: signed distance of the origin is negative
    CHECK(signed_distance(c, {0.0, 0.0}) < 0.0);
  }
}
