#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rflow/curve.hpp"

namespace rflow {

enum class ShapeKind { Circle, Stadium, GEta, FEps, DumbbellThin, DumbbellFat, RoundedSquare };

const char* to_string(ShapeKind k);

struct CircleParams {
  double R = 1.0;
  Point2 center{};
};

// Rectangle [-L, L] x [-l, l] capped by half discs of radius l.
struct StadiumParams {
  double half_width = 0.1;
  double half_length = 0.5;
};

// |y| <= eta + a (1 - cos(k x)). a = r/(32 pi^2), k = 4 pi is the standard
// barrier; other (a, k) give the wider family used to enclose larger lobes.
struct GEtaParams {
  double r = 0.01;
  double eta = 0.0;
  double amplitude = 0.0;   // 0 selects r/(32 pi^2)
  double wavenumber = 0.0;  // 0 selects 4 pi
  bool standard_shape() const { return amplitude == 0.0 && wavenumber == 0.0; }
  double a() const;
  double k() const;
};

// |y| <= eps + g(x) with rho = M r.
struct FEpsParams {
  double r = 0.01;
  double M = 50.0;
  double eps = 0.0;
};

// Two discs of radius R centred at (+-c, 0), a neck |y| <= w(x) on
// |x| <= x_f with waist w0 at 0 and w1 at the ends, joined to the discs by
// concave fillet arcs of radius rf.
struct DumbbellParams {
  double lobe_radius = 0.0;
  double lobe_center = 0.0;
  double neck_waist = 0.0;
  double neck_end = 0.0;
  double fillet = 0.0;
  double r = 0.0;  // the flow radius the geometry was designed for
  double neck_half_length() const;
};

struct RoundedSquareParams {
  double side = 1.0;
  double corner = 1e-3;  // arc radius
  double blend = 0.0;    // curvature ramp length; 0 selects corner / 2
};

struct AnalyticSet {
  ShapeKind kind = ShapeKind::Circle;
  std::variant<CircleParams, StadiumParams, GEtaParams, FEpsParams, DumbbellParams,
               RoundedSquareParams>
      params;
};

AnalyticSet make_circle(double R, Point2 center = {});
AnalyticSet make_stadium(double half_width, double half_length);
AnalyticSet make_g_eta(double r, double eta, double amplitude = 0.0, double wavenumber = 0.0);
AnalyticSet make_f_eps(double r, double M, double eps);
AnalyticSet make_rounded_square(double side, double corner, double blend = 0.0);
AnalyticSet make_dumbbell(ShapeKind kind, const DumbbellParams& p);

// Thin dumbbell for a given r: lobes of radius r/4 under the wide cosine
// barrier, neck inside |y| <= r/100.
AnalyticSet thin_dumbbell(double r);
GEtaParams thin_dumbbell_barrier(double r);
// Fat dumbbell: lobes of radius R, neck of half-length gap inside |y| <= r/100.
AnalyticSet fat_dumbbell(double r, double R = 3.0, double gap = 0.0);
// Target spacing that is fine near the neck at the origin and grows linearly
// away from it.
struct GradedSpacing {
  double h_fine = 4e-5;
  double h_coarse = 0.02;
  double fine_radius = 0.03;
  double growth = 0.15;
  double operator()(Point2 p) const;
};

void validate(const AnalyticSet& s);

// Half-height profile of the graph-type sets and its derivatives.
struct GraphValue {
  double g = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
GraphValue g_eta_value(const GEtaParams& p, double x);
GraphValue f_eps_value(const FEpsParams& p, double x);
// Bump: 1 on [-1, 1], 0 outside [-2, 2], smootherstep in between.
GraphValue bump_value(double t);

PlanarCurve discretize(const AnalyticSet& s, std::size_t n, double window = 1.0);
// Spacing follows h(p); only the bounded kinds (circle, stadium, dumbbells).
PlanarCurve discretize_graded(const AnalyticSet& s, const std::function<double(Point2)>& h);
// Dense counter-clockwise polyline with spacing at most `ds` (before resampling).
std::vector<Point2> dense_boundary(const AnalyticSet& s, double ds, double window = 1.0);

// Signed curvature of the upper boundary above abscissa x (bottom boundary for
// the rounded square).
double exact_curvature(const AnalyticSet& s, double x, double window = 1.0);

struct BarrierCheck {
  double min_kappa_r = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};
BarrierCheck verify_barrier_G(const GEtaParams& p, int n_samples, double window = 1.0);
BarrierCheck verify_barrier_G(double r, double eta, int n_samples);

struct FBarrierCheck {
  double c0_observed = 0.0;     // min kappa_r over |p1| <= 10
  double min_near_origin = 0.0; // min kappa_r over |p1| <= 2 rho
  double min_far = 0.0;         // min kappa_r over 2 rho <= |p1| <= 10
  bool int_fits_near_origin = false;  // any interior ball fitting near the origin
  bool pass = false;
  std::size_t samples = 0;
};
FBarrierCheck calibrate_and_verify_barrier_F(double r, double M, int n_samples);
// Smallest M in `candidates` whose verification passes.
double calibrate_M(double r, const std::vector<double>& candidates = {50.0, 100.0, 200.0},
                   int n_samples = 2000);

// Bound chain of the F barrier on [0, 10], sampled densely.
struct FBoundChain {
  double max_g2_scaled = 0.0;         // max |g''| * M^3 r        (bound 23)
  double max_g1_far_scaled = 0.0;     // max |g'| M^2 on [2rho,10] (bound 1)
  double max_g_near_scaled = 0.0;     // max g M / r on [0,2rho]   (bound 5)
  double max_g1_near_scaled = 0.0;    // max |g'| M^2 on [0,2rho]  (bound 11)
  double min_kappa_far_scaled = 0.0;  // min kappa M^2 11^3 on [2rho,10] (bound 1)
};
FBoundChain f_bound_chain(const FEpsParams& p, int n = 200000);

struct BumpBounds {
  double max_d1 = 0.0;
  double max_d2 = 0.0;
};
BumpBounds bump_bounds(int n = 100000);

struct ProfilePoint {
  double x = 0.0;
  double phi = 0.0;
  double kappa = 0.0;
};
// kappa_r along the bottom side from the left corner arc to the middle.
std::vector<ProfilePoint> kappa_r_bottom_profile(const RoundedSquareParams& sq, double r,
                                                 std::size_t n);

struct ConvexityWitness {
  double violation = 0.0;  // phi(x2) - (phi(x1) + phi(x3)) / 2
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;
  double plateau_high = 0.0;  // level of the upper plateau
  double plateau_low = 0.0;   // level of the lower plateau
  bool plateaus_found = false;
};
ConvexityWitness midpoint_convexity_witness(const std::vector<ProfilePoint>& profile, double r);

// Shrinking barriers and their closing times.
struct BarrierSchedule {
  AnalyticSet base;
  double param0 = 0.0;  // eta0 or eps0
  double rate = 0.0;    // decrease of the parameter per unit time
  double param_at(double t) const { return param0 - rate * t; }
  double closing_time() const { return param0 / rate; }
  double half_height(double t, double x) const;
};
BarrierSchedule g_eta_schedule(const GEtaParams& p);
BarrierSchedule f_eps_schedule(double r, double M, double c0);

}  // namespace rflow
