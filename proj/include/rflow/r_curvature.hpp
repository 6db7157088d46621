#pragma once

#include <vector>

#include "rflow/curve.hpp"
#include "rflow/segment_index.hpp"

namespace rflow {

// Relative tolerance of the ball-fitting test (on top of the chord allowance).
inline constexpr double kBallRelTol = 1e-6;

struct RCurvatureSample {
  double kappa = 0.0;
  bool ext_fits = false;
  bool int_fits = false;
  double plus = 0.0;   // kappa/2 + 1/(2r) when the exterior ball fits
  double minus = 0.0;  // kappa/2 - 1/(2r) when the interior ball fits
  double value = 0.0;  // plus + minus
};

// Ball predicates evaluated against every curve of a family, so balls that
// would cross another component or a distant part of the same curve fail.
class BallOracle {
 public:
  explicit BallOracle(const CurveFamily& family);

  const CurveFamily& family() const { return *family_; }
  bool ext_fits(std::size_t curve, std::size_t i, double rho) const;
  bool int_fits(std::size_t curve, std::size_t i, double rho) const;
  RCurvatureSample sample(std::size_t curve, std::size_t i, double r) const;

  double kappa(std::size_t curve, std::size_t i) const { return kappa_[curve][i]; }
  Point2 normal(std::size_t curve, std::size_t i) const { return normal_[curve][i]; }

 private:
  const CurveFamily* family_;
  SegmentIndex index_;
  std::vector<std::vector<double>> kappa_;
  std::vector<std::vector<Point2>> normal_;
};

std::vector<RCurvatureSample> kappa_r(const PlanarCurve& c, double r);
std::vector<std::vector<RCurvatureSample>> kappa_r(const CurveFamily& f, double r);

bool ext_ball_fits(const PlanarCurve& c, std::size_t i, double rho);
bool int_ball_fits(const PlanarCurve& c, std::size_t i, double rho);

struct SigmaSample {
  double sigma = 0.0;
  double weight = 0.0;  // quadrature weight of this node
  bool ext_fits = false;
  bool int_fits = false;
  double plus = 0.0;
  double minus = 0.0;
};

// Profile f: equal to 1 on [0, r - delta], smootherstep down to 0 at r.
struct SmoothingSpec {
  double r = 0.0;
  double delta = 0.0;
  int quadrature_nodes = 64;
};

double smoothing_profile(const SmoothingSpec& s, double sigma);
double smoothing_profile_derivative(const SmoothingSpec& s, double sigma);

// Composite 4-point Gauss-Legendre nodes on (0, r], with a panel boundary at
// r - delta. delta <= 0 means a plain uniform layout.
std::vector<std::pair<double, double>> sigma_nodes(double r, double delta, int nodes);

std::vector<SigmaSample> kappa_sigma_profile(const PlanarCurve& c, std::size_t i, double r,
                                             int n_sigma);
std::vector<SigmaSample> kappa_sigma_profile(const PlanarCurve& c, std::size_t i,
                                             const SmoothingSpec& spec);

struct KappaF {
  double plus = 0.0;
  double minus = 0.0;
  double value = 0.0;
};
// -(1/r) * integral of sigma f'(sigma) kappa_sigma over (0, r].
KappaF kappa_f(const PlanarCurve& c, std::size_t i, const SmoothingSpec& spec);

}  // namespace rflow
