#pragma once

#include <utility>
#include <vector>

#include "rflow/curve.hpp"

namespace rflow {

// Right side of phi' = 2(1+phi^2) - (1+phi^2)^{3/2} / r.
double phi_rhs(double r, double phi);
// Limit value sqrt(4r^2 - 1).
double wave_ell(double r);
// Curvature of the central graph for slope s: 2/sqrt(1+s^2) - 1/r.
double kappa0(double r, double slope);

struct PhiSolution {
  double r = 0.0;
  double step = 0.0;
  std::vector<double> x;  // symmetric grid, x[origin()] == 0
  std::vector<double> phi;
  double error_estimate = 0.0;  // step-halving estimate at the right end

  std::size_t origin() const { return x.size() / 2; }
  double x_max() const { return x.back(); }
};

// RK4 on [0, x_max], extended to negative x by oddness. x_max <= 0 picks 10 + 5/ell.
PhiSolution solve_phi(double r, double x_max = 0.0, double h_step = 1e-4);

// h0(x) = integral of phi from 0 to x, on the same grid.
std::vector<double> build_h0(const PhiSolution& s);

struct BallDrop {
  double x_argmax = 0.0;       // golden-section argmax of h0(x) + sqrt(r^2 - x^2)
  double x_r = 0.0;            // Newton root of x - r h0'/sqrt(1+h0'^2), started at x_argmax
  double center_height = 0.0;  // the maximum itself
};

BallDrop drop_ball(const PhiSolution& s, const std::vector<double>& h0);
// Interior local maxima of h0(x) + sqrt(r^2 - x^2) on (0, r) at grid resolution.
int tangency_maxima(const PhiSolution& s, const std::vector<double>& h0);

class WaveProfile {
 public:
  WaveProfile(PhiSolution phi, std::vector<double> h0, BallDrop drop);

  double r = 0.0;
  double ell = 0.0;
  double x_r = 0.0;
  double x_tilde_r = 0.0;
  double h0_prime_at_xr = 0.0;
  double center_height = 0.0;
  PhiSolution phi;
  std::vector<double> h0;

  double phi_at(double x) const;
  double h0_at(double x) const;
  // h_star lives on |x| < half_domain()
  double half_domain() const;
  double h_star(double x) const;
  double h_star_d1(double x) const;
  double h_star_d2(double x) const;
  double curvature(double x) const;
  // height at which the branch reaches abscissa |x| = x_top(y)
  double x_top(double y) const;

  // arclength from x = 0 along the graph (odd in x) and its inverse
  double arclength(double x) const;
  double abscissa_at(double s) const;

 private:
  std::vector<double> s_table_;
  double h0_xr_ = 0.0;
  double s_xr_ = 0.0;
};

WaveProfile build_h_star(double r, double x_max = 0.0, double h_step = 1e-4);

// Truncated supergraph as a closed counterclockwise polyline sampled at uniform
// arclength ds: graph from -x_top to x_top, then a flat top at y_top.
struct Supergraph {
  std::vector<Point2> points;
  std::size_t graph_count = 0;  // the first graph_count points lie on the graph
  double y_top = 0.0;
};

Supergraph wave_supergraph(const WaveProfile& w, double ds, double y_top);

struct WaveReport {
  double c11_jump = 0.0;
  double second_derivative_jump = 0.0;  // h'' right minus left at x_r
  double max_second_derivative = 0.0;
  double max_branch_curvature = 0.0;
  double vb1_residual = 0.0;
  double kappa_r_agreement = 0.0;  // fraction of checked vertices with the expected ball flags
  std::size_t checked = 0;
  double junction_band = 0.0;  // half-width around +-x_r left out of (c) and (d)
};

// Computes every check without judging.
WaveReport measure_wave(const WaveProfile& w, int n_check = 4000);
// Same, but throws ValidationFailed naming the first failing check.
WaveReport validate_wave(const WaveProfile& w, int n_check = 4000);

struct TranslationResult {
  double speed = 0.0;
  std::vector<std::pair<double, double>> apex;  // (t, h(0, t))
  int steps = 0;
};

double default_translation_window(const WaveProfile& w);
TranslationResult graph_flow_translation_test(const WaveProfile& w, double half_window,
                                              double t_max, double dx = 0.01, double cfl = 0.2);
// -log(cos x) under the classical law h_t = h_xx / (1 + h_x^2).
TranslationResult grim_reaper_translation_test(double half_window, double t_max,
                                               double dx = 0.01, double cfl = 0.2);

// A wave of speed c for radius r' becomes the speed-1 problem with radius r' c
// after scaling lengths by c and times by c^2.
struct WaveScaling {
  double r_prime = 0.0;
  double c = 0.0;

  double normalized_r() const { return r_prime * c; }
  double to_normalized_length(double x) const { return c * x; }
  double from_normalized_length(double x) const { return x / c; }
  double to_normalized_time(double t) const { return c * c * t; }
  double from_normalized_time(double t) const { return t / (c * c); }
};

WaveScaling make_scaling(double r_prime, double c);

}  // namespace rflow
