#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "rflow/analytic_sets.hpp"
#include "rflow/constants.hpp"
#include "rflow/error.hpp"
#include "rflow/r_curvature.hpp"

using namespace rflow;

TEST_CASE("circle discretization is the regular polygon") {
  auto c = discretize(make_circle(1.0), 512);
  REQUIRE(c.size() == 512);
  for (std::size_t k = 0; k < 512; ++k) {
    double t = 2.0 * M_PI * k / 512;
    CHECK(dist(c[k], {std::cos(t), std::sin(t)}) < 1e-15);
  }
}

TEST_CASE("G_eta vertical extent and closed-form curvature") {
  double r = 0.01, eta = r / (128 * M_PI * M_PI);
  auto s = make_g_eta(r, eta);
  auto c = discretize(s, 8192, 1.0);
  double ymax = 0;
  for (auto p : c.vertices()) ymax = std::max(ymax, p.y);
  CHECK(ymax <= eta + r / (16 * M_PI * M_PI) + 1e-15);
  // g'(0) = 0 and g''(0) = a k^2 = r/2
  CHECK(exact_curvature(s, 0.0) == doctest::Approx(-r / 2).epsilon(1e-12));
  for (double x = -1; x <= 1; x += 0.01) CHECK(std::abs(exact_curvature(s, x)) <= r / 2 + 1e-15);
  CHECK_THROWS_AS(exact_curvature(s, 1.5), Error);
  CHECK_THROWS_AS(make_g_eta(r, r / (64 * M_PI * M_PI)), Error);
}

TEST_CASE("F_eps contains the axis segment") {
  double r = 0.01, M = kCalibratedM;
  auto s = make_f_eps(r, M, r / (2 * M));
  auto c = discretize(s, 100000, 10.0 + 2 * r);
  for (double x = -10; x <= 10; x += 0.5) CHECK(signed_distance(c, {x, 0.0}) < 0.0);
}

TEST_CASE("closed-form curvature matches the polyline estimator at n = 4096") {
  // G with a visible amplitude and F with a small M
  std::vector<std::pair<AnalyticSet, double>> sets{
      {make_g_eta(0.2, 0.01, 0.02, 2 * M_PI), 1.0}, {make_f_eps(0.05, 4.0, 0.005), 1.0}};
  for (auto& [s, window] : sets) {
    auto c = discretize(s, 4096, window);
    auto k = curvature(c);
    double kmax = 0, err = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].y <= 0 || std::abs(c[i].x) > 0.8 * window) continue;
      double e = exact_curvature(s, c[i].x, window);
      kmax = std::max(kmax, std::abs(e));
      err = std::max(err, std::abs(e - k[i]));
    }
    CHECK(err <= 1e-2 * kmax);
  }
}

TEST_CASE("G_eta barrier: kappa_r >= 1/(4r) and the sharper flat bound") {
  double r = 0.01;
  auto res = verify_barrier_G(r, r / (128 * M_PI * M_PI), 2000);
  CHECK(res.pass);
  CHECK(res.min_kappa_r >= 25.0);
  CHECK(res.min_kappa_r >= (-r / 2 + 1 / (2 * r)) * 0.99);
  CHECK(verify_barrier_G(0.05, 0.05 / (128 * M_PI * M_PI), 500).pass);
  CHECK_THROWS_AS(verify_barrier_G(r, r / (64 * M_PI * M_PI), 100), Error);
}

TEST_CASE("algebraic flat-case chain -r/2 + 1/(2r) >= 1/(4r) for r <= 0.7") {
  for (double r = 1e-3; r <= 0.7; r += 1e-3) CHECK(-r / 2 + 1 / (2 * r) >= 1 / (4 * r));
}

TEST_CASE("wide cosine barrier of the thin dumbbell keeps kappa_r >= 1/(4r)") {
  double r = 0.01;
  auto p = thin_dumbbell_barrier(r);
  // curvature bound a k^2 <= 1/r - 4 * (1/(4r)) ... checked numerically
  auto res = verify_barrier_G(p, 2000, 1.0);
  CHECK(res.pass);
  CHECK(res.min_kappa_r >= 1 / (2 * r) - 0.5 * p.a() * p.k() * p.k() - 1.0);
}

TEST_CASE("F_eps barrier bound at the calibrated M") {
  double r = 0.01;
  auto res = calibrate_and_verify_barrier_F(r, kCalibratedM, 2000);
  CHECK(res.pass);
  CHECK(res.c0_observed > 0.0);
  CHECK(res.c0_observed >= 0.5 / (kCalibratedM * kCalibratedM * 1331.0));
  CHECK(res.min_near_origin >= 1 / (3 * r) * (1 - 1e-2));
  CHECK_FALSE(res.int_fits_near_origin);
  CHECK_THROWS_AS(calibrate_and_verify_barrier_F(r, 1.0, 100), Error);
}

TEST_CASE("calibration sweep reproduces the recorded M") {
  CHECK(calibrate_M(0.01) == kCalibratedM);
}

TEST_CASE("F_eps bound chain by dense sampling") {
  for (double M : {50.0, 100.0, 200.0}) {
    FEpsParams p{0.01, M, 0.01 / (2 * M)};
    auto b = f_bound_chain(p);
    CHECK(b.max_g2_scaled <= 23.0);
    CHECK(b.max_g1_far_scaled <= 1.0);
    CHECK(b.max_g_near_scaled <= 5.0);
    CHECK(b.max_g1_near_scaled <= 11.0);
    CHECK(b.min_kappa_far_scaled >= 1.0);
  }
}

TEST_CASE("bump function shape") {
  auto b = bump_bounds();
  CHECK(bump_value(0.5).g == 1.0);
  CHECK(bump_value(-2.0).g == 0.0);
  CHECK(b.max_d1 <= 2.0);
  CHECK(b.max_d2 == doctest::Approx(10.0 / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("rounded square: geometry and bottom profile plateaus") {
  RoundedSquareParams sq{1.0, 1e-3, 0.0};
  auto c = discretize(AnalyticSet{ShapeKind::RoundedSquare, sq}, 20000);
  double ymin = 1e9;
  for (auto p : c.vertices()) ymin = std::min(ymin, p.y);
  CHECK(ymin == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(area(c) < 1.0);
  CHECK(area(c) > 1.0 - 1e-5);

  double r = 0.05;
  auto prof = kappa_r_bottom_profile(sq, r, 20000);
  for (auto& p : prof) {
    if (p.x > -0.5 + r + 1e-3) CHECK(p.phi == doctest::Approx(0.0));
    else if (p.x < -0.5 + r - 1e-3 && p.x > -0.5 + 2e-3) CHECK(p.phi == doctest::Approx(0.5 / r));
  }
  auto w = midpoint_convexity_witness(prof, r);
  CHECK(w.plateaus_found);
  CHECK(w.violation >= 0.25 / r * (1 - 1e-9));
}

TEST_CASE("thin dumbbell is r-thin with its neck below r/100") {
  double r = 0.01;
  auto s = thin_dumbbell(r);
  auto c = discretize(s, 4096);
  CHECK(min_width(c).width < r);
  auto& p = std::get<DumbbellParams>(s.params);
  for (auto q : c.vertices())
    if (std::abs(q.x) <= p.neck_half_length()) CHECK(std::abs(q.y) <= r / 100 + 1e-15);
  // initial set inside the barrier
  auto sched = g_eta_schedule(thin_dumbbell_barrier(r));
  for (auto q : c.vertices()) CHECK(std::abs(q.y) <= sched.half_height(0.0, q.x));
  CHECK(sched.closing_time() == doctest::Approx(4 * r * 0.009 * r));
}

TEST_CASE("fat dumbbell is R-pudgy") {
  auto s = fat_dumbbell(0.01, 3.0);
  auto c = discretize(s, 8192);
  CHECK(inradius(c).radius >= 3.0 * (1 - 1e-2));
  auto& p = std::get<DumbbellParams>(s.params);
  for (auto q : c.vertices())
    if (std::abs(q.x) <= p.neck_half_length()) CHECK(std::abs(q.y) <= 0.01 / 100 + 1e-15);
}

TEST_CASE("barrier schedules close at the stated times") {
  auto f = f_eps_schedule(0.01, 50.0, 0.5);
  CHECK(f.closing_time() == doctest::Approx(0.01 / (0.5 * 50.0)).epsilon(1e-14));
  CHECK_THROWS_AS(f_eps_schedule(0.01, 50.0, 1.5), Error);
}
