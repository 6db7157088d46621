#include "rflow/r_curvature.hpp"

#include <array>
#include <cmath>

#include "rflow/error.hpp"

namespace rflow {

namespace {

void check_r(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidR, "r must be positive");
}

void check_index(const PlanarCurve& c, std::size_t i) {
  if (i >= c.size()) throw Error(ErrorKind::IndexOutOfRange, "vertex index " + std::to_string(i));
}

}  // namespace

BallOracle::BallOracle(const CurveFamily& family)
    : family_(&family), index_(segments_of(family)) {
  kappa_.reserve(family.size());
  normal_.reserve(family.size());
  for (const auto& c : family.curves()) {
    kappa_.push_back(curvature(c));
    normal_.push_back(outward_normals(c));
  }
}

bool BallOracle::ext_fits(std::size_t curve, std::size_t i, double rho) const {
  Point2 center = (*family_)[curve][i] + rho * normal_[curve][i];
  return !index_.any_closer_than(center, rho, kBallRelTol);
}

bool BallOracle::int_fits(std::size_t curve, std::size_t i, double rho) const {
  Point2 center = (*family_)[curve][i] - rho * normal_[curve][i];
  return !index_.any_closer_than(center, rho, kBallRelTol);
}

RCurvatureSample BallOracle::sample(std::size_t curve, std::size_t i, double r) const {
  RCurvatureSample s;
  s.kappa = kappa_[curve][i];
  s.ext_fits = ext_fits(curve, i, r);
  s.int_fits = int_fits(curve, i, r);
  s.plus = s.ext_fits ? 0.5 * s.kappa + 0.5 / r : 0.0;
  s.minus = s.int_fits ? 0.5 * s.kappa - 0.5 / r : 0.0;
  s.value = s.plus + s.minus;
  return s;
}

std::vector<std::vector<RCurvatureSample>> kappa_r(const CurveFamily& f, double r) {
  check_r(r);
  BallOracle oracle(f);
  std::vector<std::vector<RCurvatureSample>> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[k].resize(f[k].size());
    for (std::size_t i = 0; i < f[k].size(); ++i) out[k][i] = oracle.sample(k, i, r);
  }
  return out;
}

std::vector<RCurvatureSample> kappa_r(const PlanarCurve& c, double r) {
  CurveFamily f(c);
  return kappa_r(f, r).front();
}

bool ext_ball_fits(const PlanarCurve& c, std::size_t i, double rho) {
  check_r(rho);
  check_index(c, i);
  CurveFamily f(c);
  return BallOracle(f).ext_fits(0, i, rho);
}

bool int_ball_fits(const PlanarCurve& c, std::size_t i, double rho) {
  check_r(rho);
  check_index(c, i);
  CurveFamily f(c);
  return BallOracle(f).int_fits(0, i, rho);
}

double smoothing_profile(const SmoothingSpec& s, double sigma) {
  double a = s.r - s.delta;
  if (sigma <= a) return 1.0;
  if (sigma >= s.r) return 0.0;
  double u = (sigma - a) / s.delta;
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothing_profile_derivative(const SmoothingSpec& s, double sigma) {
  double a = s.r - s.delta;
  if (sigma <= a || sigma >= s.r) return 0.0;
  double u = (sigma - a) / s.delta;
  return -30.0 * u * u * (1.0 - u) * (1.0 - u) / s.delta;
}

std::vector<std::pair<double, double>> sigma_nodes(double r, double delta, int nodes) {
  static const std::array<double, 4> gx{-0.8611363115940526, -0.3399810435848563,
                                        0.3399810435848563, 0.8611363115940526};
  static const std::array<double, 4> gw{0.3478548451374538, 0.6521451548625461,
                                        0.6521451548625461, 0.3478548451374538};
  int panels = nodes / 4;
  if (panels < 2) throw Error(ErrorKind::QuadratureUnderflow, "need at least 8 nodes");
  std::vector<std::pair<double, double>> bounds;  // panel intervals
  if (delta <= 0.0) {
    for (int p = 0; p < panels; ++p)
      bounds.push_back({r * p / panels, r * (p + 1) / panels});
  } else {
    double split = r - delta;
    int inner = 0;
    if (split > 0.0) inner = std::max(1, static_cast<int>(std::lround(panels * split / r)));
    int outer = panels - inner;
    if (outer < 1)
      throw Error(ErrorKind::QuadratureUnderflow,
                  "fewer than 4 nodes in the transition layer; raise quadrature_nodes");
    for (int p = 0; p < inner; ++p) bounds.push_back({split * p / inner, split * (p + 1) / inner});
    for (int p = 0; p < outer; ++p)
      bounds.push_back({split + delta * p / outer, split + delta * (p + 1) / outer});
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(bounds.size() * 4);
  for (auto [a, b] : bounds) {
    double m = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int k = 0; k < 4; ++k) out.push_back({m + hw * gx[k], hw * gw[k]});
  }
  return out;
}

namespace {

std::vector<SigmaSample> profile_at(const PlanarCurve& c, std::size_t i,
                                    const std::vector<std::pair<double, double>>& nodes) {
  check_index(c, i);
  CurveFamily f(c);
  BallOracle oracle(f);
  double kappa = oracle.kappa(0, i);
  std::vector<SigmaSample> out;
  out.reserve(nodes.size());
  for (auto [sigma, w] : nodes) {
    SigmaSample s;
    s.sigma = sigma;
    s.weight = w;
    s.ext_fits = oracle.ext_fits(0, i, sigma);
    s.int_fits = oracle.int_fits(0, i, sigma);
    s.plus = s.ext_fits ? 0.5 * kappa + 0.5 / sigma : 0.0;
    s.minus = s.int_fits ? 0.5 * kappa - 0.5 / sigma : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<SigmaSample> kappa_sigma_profile(const PlanarCurve& c, std::size_t i, double r,
                                             int n_sigma) {
  check_r(r);
  return profile_at(c, i, sigma_nodes(r, 0.0, n_sigma));
}

std::vector<SigmaSample> kappa_sigma_profile(const PlanarCurve& c, std::size_t i,
                                             const SmoothingSpec& spec) {
  check_r(spec.r);
  if (!(spec.delta > 0.0 && spec.delta <= spec.r))
    throw Error(ErrorKind::InvalidParams, "delta must lie in (0, r]");
  return profile_at(c, i, sigma_nodes(spec.r, spec.delta, spec.quadrature_nodes));
}

KappaF kappa_f(const PlanarCurve& c, std::size_t i, const SmoothingSpec& spec) {
  auto prof = kappa_sigma_profile(c, i, spec);
  KappaF k;
  for (const auto& s : prof) {
    double w = -s.weight * s.sigma * smoothing_profile_derivative(spec, s.sigma) / spec.r;
    k.plus += w * s.plus;
    k.minus += w * s.minus;
  }
  k.value = k.plus + k.minus;
  return k;
}

}  // namespace rflow
