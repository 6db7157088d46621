#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rflow/error.hpp"
#include "rflow/r_curvature.hpp"
#include "test_helpers.hpp"

using namespace rflow;
using testutil::circle;

namespace {

// Stadium: rectangle [-L, L] x [-l, l] with semicircular caps of radius l.
PlanarCurve stadium(double l, double L, double h) {
  std::vector<Point2> dense;
  int m = 4000;
  for (int k = 0; k < m; ++k) dense.push_back({-L + 2 * L * k / m, -l});
  for (int k = 0; k < m; ++k) {
    double t = -M_PI / 2 + M_PI * k / m;
    dense.push_back({L + l * std::cos(t), l * std::sin(t)});
  }
  for (int k = 0; k < m; ++k) dense.push_back({L - 2 * L * k / m, l});
  for (int k = 0; k < m; ++k) {
    double t = M_PI / 2 + M_PI * k / m;
    dense.push_back({-L + l * std::cos(t), l * std::sin(t)});
  }
  double per = 4 * L + 2 * M_PI * l;
  return PlanarCurve(resample_polyline_closed(dense, std::size_t(std::lround(per / h))));
}

}  // namespace

TEST_CASE("circle larger than r: both balls fit, kappa_r equals kappa") {
  auto s = kappa_r(circle(0.5, 512), 0.2);
  for (const auto& x : s) {
    CHECK(x.ext_fits);
    CHECK(x.int_fits);
    CHECK(x.value == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("circle smaller than r: interior ball does not fit") {
  auto s = kappa_r(circle(0.1, 512), 0.2);
  for (const auto& x : s) {
    CHECK(x.ext_fits);
    CHECK_FALSE(x.int_fits);
    CHECK(x.value == doctest::Approx(7.5).epsilon(1e-10));
  }
}

TEST_CASE("thin stadium: flat-side vertices get 1/(2r)") {
  double r = 0.2;
  auto c = stadium(0.05, 0.5, 0.002);
  auto s = kappa_r(c, r);
  int flat = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i].x) > 0.3) continue;
    ++flat;
    CHECK_FALSE(s[i].int_fits);
    CHECK(s[i].ext_fits);
    CHECK(s[i].value == doctest::Approx(1.0 / (2 * r)).epsilon(1e-9));
  }
  CHECK(flat > 100);
}

TEST_CASE("sigma profile on the flat side of a stadium") {
  // half-width 0.1: interior balls fit only for sigma <= 0.1
  auto c = stadium(0.1, 0.5, 0.002);
  std::size_t mid = 0;
  double best = 1e9;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].y < 0 && std::abs(c[i].x) < best) best = std::abs(c[i].x), mid = i;
  auto prof = kappa_sigma_profile(c, mid, 0.2, 64);
  for (const auto& p : prof) {
    CHECK(p.ext_fits);
    CHECK(p.plus == doctest::Approx(0.5 / p.sigma).epsilon(1e-9));
    if (p.sigma > 0.1 * (1 + 1e-6)) CHECK_FALSE(p.int_fits);
    if (p.sigma < 0.1 * (1 - 1e-3)) CHECK(p.int_fits);
    if (p.int_fits) CHECK(p.minus == doctest::Approx(-0.5 / p.sigma).epsilon(1e-9));
  }
}

TEST_CASE("property: ball predicates are monotone in the radius") {
  auto c = stadium(0.07, 0.3, 0.003);
  for (std::size_t i = 0; i < c.size(); i += 7) {
    auto prof = kappa_sigma_profile(c, i, 0.3, 128);
    for (std::size_t k = 1; k < prof.size(); ++k) {
      if (prof[k].ext_fits) CHECK(prof[k - 1].ext_fits);
      if (prof[k].int_fits) CHECK(prof[k - 1].int_fits);
    }
  }
}

TEST_CASE("balls are tested against other components") {
  // two unit-ish circles 0.1 apart: exterior balls of radius 0.2 facing the
  // neighbour must fail, those facing away must fit
  std::vector<PlanarCurve> cs{circle(0.5, 256), circle(0.5, 256, {1.1, 0.0})};
  CurveFamily fam(cs);
  auto s = kappa_r(fam, 0.2);
  CHECK_FALSE(s[0][0].ext_fits);       // vertex (0.5, 0) faces the other circle
  CHECK(s[0][128].ext_fits);           // vertex (-0.5, 0)
}

TEST_CASE("smoothed curvature on a circle: integral of f over r") {
  // both balls fit for all sigma <= r < R, so kappa_sigma = kappa and
  // kappa_f = kappa * (1/r) * int_0^r f = kappa * (1 - delta / (2 r))
  auto c = circle(1.0, 512);
  SmoothingSpec spec{0.2, 0.1, 64};
  auto k = kappa_f(c, 0, spec);
  CHECK(k.value == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("smoothed curvature tends to kappa_r as delta shrinks") {
  auto c = circle(0.1, 512);
  double kr = kappa_r(c, 0.2)[0].value;
  double prev = 1e9;
  for (double frac : {1e-1, 1e-2, 1e-3}) {
    SmoothingSpec spec{0.2, frac * 0.2, 4096};
    double err = std::abs(kappa_f(c, 0, spec).value - kr);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev / kr < 1e-3);
}

TEST_CASE("quadrature underflow and bad arguments") {
  auto c = circle(1.0, 64);
  CHECK_THROWS_AS(kappa_f(c, 0, SmoothingSpec{0.2, 1e-4, 64}), Error);
  CHECK_THROWS_AS(kappa_r(c, -1.0), Error);
  CHECK_THROWS_AS(ext_ball_fits(c, 64, 0.1), Error);
}
