#include "rflow/traveling_wave.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rflow/error.hpp"
#include "rflow/r_curvature.hpp"

namespace rflow {

double phi_rhs(double r, double phi) {
  double q = 1.0 + phi * phi;
  return 2.0 * q - q * std::sqrt(q) / r;
}

double wave_ell(double r) { return std::sqrt(4.0 * r * r - 1.0); }

double kappa0(double r, double slope) { return 2.0 / std::sqrt(1.0 + slope * slope) - 1.0 / r; }

namespace {

void require_r(double r) {
  if (!std::isfinite(r) || !(r > 1.0))
    throw Error(ErrorKind::InvalidR, "normalized radius must exceed 1, got " + std::to_string(r));
}

std::vector<double> rk4(double r, double h, std::size_t n) {
  std::vector<double> y(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double k1 = phi_rhs(r, y[i]);
    double k2 = phi_rhs(r, y[i] + 0.5 * h * k1);
    double k3 = phi_rhs(r, y[i] + 0.5 * h * k2);
    double k4 = phi_rhs(r, y[i] + h * k3);
    y[i + 1] = y[i] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

// cubic Hermite on [x0, x0 + h]
double hermite(double t, double h, double y0, double y1, double d0, double d1) {
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

std::size_t cell(const PhiSolution& s, double x, double& t) {
  double lo = s.x.front(), hi = s.x.back();
  double slack = 1e-12 * std::max(1.0, hi);
  if (!(x >= lo - slack && x <= hi + slack))
    throw Error(ErrorKind::OutOfWindow, "abscissa outside the phi grid");
  double u = (x - lo) / s.step;
  auto i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, double(s.x.size() - 2)));
  t = (x - s.x[i]) / s.step;
  return i;
}

double interp_phi(const PhiSolution& s, double x) {
  double t;
  std::size_t i = cell(s, x, t);
  return hermite(t, s.step, s.phi[i], s.phi[i + 1], phi_rhs(s.r, s.phi[i]),
                 phi_rhs(s.r, s.phi[i + 1]));
}

double interp_h0(const PhiSolution& s, const std::vector<double>& h0, double x) {
  double t;
  std::size_t i = cell(s, x, t);
  return hermite(t, s.step, h0[i], h0[i + 1], s.phi[i], s.phi[i + 1]);
}

double lift(double theta) { return std::asinh(std::tan(theta)); }  // integral of sec

}  // namespace

PhiSolution solve_phi(double r, double x_max, double h_step) {
  require_r(r);
  if (x_max <= 0.0) x_max = 10.0 + 5.0 / wave_ell(r);
  if (!(h_step > 0.0) || h_step > 1e-3 * std::min(1.0, 1.0 / r) * (1.0 + 1e-12))
    throw Error(ErrorKind::InvalidParams, "phi step must be positive and at most 1e-3 min(1, 1/r)");
  auto n = static_cast<std::size_t>(std::ceil(x_max / h_step - 1e-9));
  auto y = rk4(r, h_step, n);
  auto y2 = rk4(r, 0.5 * h_step, 2 * n);

  PhiSolution s;
  s.r = r;
  s.step = h_step;
  s.error_estimate = std::abs(y[n] - y2[2 * n]) * 16.0 / 15.0;
  s.x.resize(2 * n + 1);
  s.phi.resize(2 * n + 1);
  for (std::size_t i = 0; i <= 2 * n; ++i) {
    long k = static_cast<long>(i) - static_cast<long>(n);
    s.x[i] = static_cast<double>(k) * h_step;
    s.phi[i] = k >= 0 ? y[static_cast<std::size_t>(k)] : -y[static_cast<std::size_t>(-k)];
  }
  return s;
}

std::vector<double> build_h0(const PhiSolution& s) {
  // trapezoid with the endpoint-derivative correction, fourth order
  std::size_t n = s.origin(), m = s.x.size();
  double h = s.step;
  std::vector<double> h0(m, 0.0);
  for (std::size_t i = n; i + 1 < m; ++i) {
    double d0 = phi_rhs(s.r, s.phi[i]), d1 = phi_rhs(s.r, s.phi[i + 1]);
    h0[i + 1] = h0[i] + 0.5 * h * (s.phi[i] + s.phi[i + 1]) + h * h / 12.0 * (d0 - d1);
  }
  for (std::size_t k = 1; k <= n; ++k) h0[n - k] = h0[n + k];
  return h0;
}

BallDrop drop_ball(const PhiSolution& s, const std::vector<double>& h0) {
  double r = s.r;
  require_r(r);
  if (s.x_max() < r) throw Error(ErrorKind::InvalidParams, "phi grid narrower than the ball");
  auto F = [&](double x) { return interp_h0(s, h0, x) + std::sqrt(std::max(0.0, r * r - x * x)); };

  std::size_t o = s.origin(), best = o;
  double fbest = F(0.0);
  for (std::size_t i = o + 1; i < s.x.size() && s.x[i] < r; ++i) {
    double f = F(s.x[i]);
    if (f > fbest) {
      fbest = f;
      best = i;
    }
  }
  double a = best > o ? s.x[best - 1] : 0.0;
  double b = std::min(r, s.x[best + 1]);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = F(c), fd = F(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = F(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = F(d);
    }
  }
  BallDrop out;
  out.x_argmax = 0.5 * (a + b);
  out.center_height = F(out.x_argmax);

  double x = out.x_argmax;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    double p = interp_phi(s, x), q = 1.0 + p * p;
    double G = x - r * p / std::sqrt(q);
    double dG = 1.0 - r * phi_rhs(r, p) / (q * std::sqrt(q));
    if (!(std::abs(dG) > 0.0)) break;
    double step = G / dG;
    x -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(x) || std::abs(x - out.x_argmax) > 1e-6 || !(x > 0.0))
    throw Error(ErrorKind::AmbiguousTangency,
                "argmax and tangency root disagree: " + std::to_string(out.x_argmax) + " vs " +
                    std::to_string(x));
  out.x_r = x;
  return out;
}

int tangency_maxima(const PhiSolution& s, const std::vector<double>& h0) {
  (void)h0;  // the derivative of h0 is phi itself
  double r = s.r;
  int count = 0;
  double prev = 0.0;
  bool have = false;
  for (std::size_t i = s.origin() + 1; i < s.x.size() && s.x[i] < r; ++i) {
    double x = s.x[i];
    double d = s.phi[i] - x / std::sqrt(r * r - x * x);
    if (have && prev > 0.0 && d <= 0.0) ++count;
    prev = d;
    have = true;
  }
  return count;
}

WaveProfile::WaveProfile(PhiSolution p, std::vector<double> h, BallDrop drop)
    : phi(std::move(p)), h0(std::move(h)) {
  r = phi.r;
  ell = wave_ell(r);
  x_r = drop.x_r;
  center_height = drop.center_height;
  h0_prime_at_xr = phi_at(x_r);
  x_tilde_r = std::atan(h0_prime_at_xr);
  h0_xr_ = h0_at(x_r);

  std::size_t n = phi.origin(), m = phi.x.size();
  double hs = phi.step;
  s_table_.assign(m, 0.0);
  for (std::size_t i = n; i + 1 < m; ++i) {
    double p0 = phi.phi[i], p1 = phi.phi[i + 1];
    double g0 = std::sqrt(1 + p0 * p0), g1 = std::sqrt(1 + p1 * p1);
    double d0 = p0 * phi_rhs(r, p0) / g0, d1 = p1 * phi_rhs(r, p1) / g1;
    s_table_[i + 1] = s_table_[i] + 0.5 * hs * (g0 + g1) + hs * hs / 12.0 * (d0 - d1);
  }
  for (std::size_t k = 1; k <= n; ++k) s_table_[n - k] = -s_table_[n + k];
  s_xr_ = arclength(x_r);
}

double WaveProfile::phi_at(double x) const { return interp_phi(phi, x); }
double WaveProfile::h0_at(double x) const { return interp_h0(phi, h0, x); }

double WaveProfile::half_domain() const { return 0.5 * M_PI + x_r - x_tilde_r; }

double WaveProfile::h_star(double x) const {
  double a = std::abs(x);
  if (a <= x_r) return h0_at(a);
  if (!(a < half_domain())) throw Error(ErrorKind::OutOfWindow, "outside the wave domain");
  double th = a + x_tilde_r - x_r;
  return -std::log(std::cos(th)) + std::log(std::cos(x_tilde_r)) + h0_xr_;
}

double WaveProfile::h_star_d1(double x) const {
  double a = std::abs(x), sg = x < 0 ? -1.0 : 1.0;
  if (a <= x_r) return sg * phi_at(a);
  if (!(a < half_domain())) throw Error(ErrorKind::OutOfWindow, "outside the wave domain");
  return sg * std::tan(a + x_tilde_r - x_r);
}

double WaveProfile::h_star_d2(double x) const {
  double a = std::abs(x);
  if (a <= x_r) return phi_rhs(r, phi_at(a));
  if (!(a < half_domain())) throw Error(ErrorKind::OutOfWindow, "outside the wave domain");
  double c = std::cos(a + x_tilde_r - x_r);
  return 1.0 / (c * c);
}

double WaveProfile::curvature(double x) const {
  double d1 = h_star_d1(x);
  return h_star_d2(x) / std::pow(1.0 + d1 * d1, 1.5);
}

double WaveProfile::x_top(double y) const {
  if (!(y >= h0_xr_)) throw Error(ErrorKind::InvalidParams, "top below the junction height");
  double c = std::cos(x_tilde_r) * std::exp(-(y - h0_xr_));
  return std::acos(c) - x_tilde_r + x_r;
}

double WaveProfile::arclength(double x) const {
  double a = std::abs(x), sg = x < 0 ? -1.0 : 1.0;
  double s;
  if (a <= x_r) {
    double t;
    std::size_t i = cell(phi, a, t);
    double p0 = phi.phi[i], p1 = phi.phi[i + 1];
    s = hermite(t, phi.step, s_table_[i], s_table_[i + 1], std::sqrt(1 + p0 * p0),
                std::sqrt(1 + p1 * p1));
  } else {
    if (!(a < half_domain())) throw Error(ErrorKind::OutOfWindow, "outside the wave domain");
    s = s_xr_ + lift(a + x_tilde_r - x_r) - lift(x_tilde_r);
  }
  return sg * s;
}

double WaveProfile::abscissa_at(double s) const {
  double a = std::abs(s), sg = s < 0 ? -1.0 : 1.0;
  if (a > s_xr_) {
    double th = std::atan(std::sinh(a - s_xr_ + lift(x_tilde_r)));
    return sg * (th - x_tilde_r + x_r);
  }
  std::size_t o = phi.origin();
  auto it = std::upper_bound(s_table_.begin() + static_cast<std::ptrdiff_t>(o), s_table_.end(), a);
  std::size_t i = static_cast<std::size_t>(it - s_table_.begin());
  i = std::clamp<std::size_t>(i, o + 1, s_table_.size() - 1) - 1;
  double lo = phi.x[i], hi = phi.x[i + 1];
  double x = lo + (a - s_table_[i]) / (s_table_[i + 1] - s_table_[i]) * (hi - lo);
  for (int it2 = 0; it2 < 20; ++it2) {
    double p = phi_at(x);
    double step = (arclength(x) - a) / std::sqrt(1 + p * p);
    x = std::clamp(x - step, lo, hi);
    if (std::abs(step) < 1e-16 * std::max(1.0, x)) break;
  }
  return sg * x;
}

WaveProfile build_h_star(double r, double x_max, double h_step) {
  auto s = solve_phi(r, x_max, h_step);
  auto h0 = build_h0(s);
  auto drop = drop_ball(s, h0);
  return WaveProfile(std::move(s), std::move(h0), drop);
}

Supergraph wave_supergraph(const WaveProfile& w, double ds, double y_top) {
  if (!(ds > 0.0)) throw Error(ErrorKind::InvalidParams, "spacing must be positive");
  double xt = w.x_top(y_top);
  double S = w.arclength(xt);
  auto n = static_cast<std::size_t>(std::max(16.0, std::round(2 * S / ds)));
  Supergraph g;
  g.y_top = y_top;
  for (std::size_t k = 0; k <= n; ++k) {
    double x = w.abscissa_at(-S + 2 * S * static_cast<double>(k) / static_cast<double>(n));
    g.points.push_back({x, k == 0 || k == n ? y_top : w.h_star(x)});
  }
  g.graph_count = g.points.size();
  auto m = static_cast<std::size_t>(std::max(2.0, std::round(2 * xt / ds)));
  for (std::size_t k = 1; k < m; ++k)
    g.points.push_back({xt - 2 * xt * static_cast<double>(k) / static_cast<double>(m), y_top});
  return g;
}

WaveReport measure_wave(const WaveProfile& w, int n_check) {
  if (n_check < 16) throw Error(ErrorKind::InvalidParams, "n_check too small");
  WaveReport rep;
  double r = w.r, xr = w.x_r;

  // (a) one-sided second-order slopes at the joint
  double d = 1e-5;
  double left = (3 * w.h_star(xr) - 4 * w.h_star(xr - d) + w.h_star(xr - 2 * d)) / (2 * d);
  double right = (-3 * w.h_star(xr) + 4 * w.h_star(xr + d) - w.h_star(xr + 2 * d)) / (2 * d);
  rep.c11_jump = std::abs(right - left);
  rep.second_derivative_jump = w.h_star_d2(xr * (1 + 1e-13)) - w.h_star_d2(xr);

  double y_top = w.h_star(xr) + 4 * r;
  double xt = w.x_top(y_top);
  for (int k = 0; k <= n_check; ++k) {
    double x = -xt + 2 * xt * k / n_check;
    rep.max_second_derivative = std::max(rep.max_second_derivative, std::abs(w.h_star_d2(x)));
  }

  // (b) branch curvature
  for (int k = 0; k <= n_check; ++k) {
    double x = xr + (xt - xr) * k / n_check;
    if (k == 0) x = xr * (1 + 1e-13);
    rep.max_branch_curvature = std::max(rep.max_branch_curvature, w.curvature(x));
  }

  // (c), (d) ball flags and the velocity law on the discretized supergraph
  double ds = 2 * w.arclength(xt) / n_check;
  auto g = wave_supergraph(w, ds, y_top);
  PlanarCurve curve(g.points);
  auto kr = kappa_r(curve, r);
  rep.junction_band = 5 * ds;
  std::size_t agree = 0;
  for (std::size_t i = 1; i + 1 < g.graph_count; ++i) {
    Point2 p = curve[i];
    if (p.y > y_top - 2 * r) continue;
    if (std::abs(std::abs(p.x) - xr) < rep.junction_band) continue;
    bool on_branch = std::abs(p.x) > xr;
    ++rep.checked;
    if (kr[i].ext_fits && kr[i].int_fits == on_branch) ++agree;
    double s1 = w.h_star_d1(p.x);
    rep.vb1_residual =
        std::max(rep.vb1_residual, std::abs(kr[i].value * std::sqrt(1 + s1 * s1) - 1.0));
  }
  rep.kappa_r_agreement = rep.checked ? double(agree) / double(rep.checked) : 0.0;
  return rep;
}

WaveReport validate_wave(const WaveProfile& w, int n_check) {
  auto rep = measure_wave(w, n_check);
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ValidationFailed, what); };
  if (!(rep.c11_jump <= 1e-6)) fail("slope jump at the joint " + std::to_string(rep.c11_jump));
  if (!(rep.max_branch_curvature <= 1.0 / w.r + 1e-8))
    fail("branch curvature " + std::to_string(rep.max_branch_curvature) + " above 1/r");
  if (!(rep.kappa_r_agreement == 1.0))
    fail("ball flags disagree on " + std::to_string(1 - rep.kappa_r_agreement) + " of vertices");
  if (!(rep.vb1_residual <= 1e-3)) fail("velocity law residual " + std::to_string(rep.vb1_residual));
  return rep;
}

namespace {

double fit_slope(const std::vector<std::pair<double, double>>& pts) {
  double n = static_cast<double>(pts.size()), st = 0, sh = 0, stt = 0, sth = 0;
  for (auto [t, h] : pts) {
    st += t;
    sh += h;
    stt += t * t;
    sth += t * h;
  }
  return (n * sth - st * sh) / (n * stt - st * st);
}

// Explicit graph flow on a uniform grid of [-X, X] with Dirichlet ends.
// velocity(h, t) fills v[j] for 0 < j < N with the normal speed.
template <class Velocity, class Boundary>
TranslationResult graph_flow(double X, double t_max, double dx, double cfl, std::vector<double> h,
                             Velocity velocity, Boundary boundary) {
  std::size_t N = h.size() - 1;
  auto steps = static_cast<int>(std::ceil(t_max / (cfl * dx * dx)));
  double dt = t_max / steps;
  TranslationResult out;
  out.steps = steps;
  std::vector<double> v(N + 1, 0.0), hn(N + 1);
  int every = std::max(1, steps / 200);
  double t = 0.0;
  out.apex.push_back({t, h[N / 2]});
  for (int k = 0; k < steps; ++k) {
    velocity(h, t, v);
    for (std::size_t j = 1; j < N; ++j) {
      double hx = (h[j + 1] - h[j - 1]) / (2 * dx);
      hn[j] = h[j] + dt * v[j] * std::sqrt(1 + hx * hx);
      if (!std::isfinite(hn[j])) throw Error(ErrorKind::NumericalInstability, "graph flow diverged");
    }
    t = (k + 1) * dt;
    hn[0] = boundary(-X, t);
    hn[N] = boundary(X, t);
    h.swap(hn);
    if ((k + 1) % every == 0 || k + 1 == steps) out.apex.push_back({t, h[N / 2]});
  }
  (void)X;
  out.speed = fit_slope(out.apex);
  return out;
}

double graph_kappa(const std::vector<double>& h, std::size_t j, double dx) {
  double hx = (h[j + 1] - h[j - 1]) / (2 * dx);
  double hxx = (h[j + 1] - 2 * h[j] + h[j - 1]) / (dx * dx);
  return hxx / std::pow(1 + hx * hx, 1.5);
}

}  // namespace

double default_translation_window(const WaveProfile& w) {
  return w.x_r + 0.5 * (0.5 * M_PI - w.x_tilde_r);
}

TranslationResult graph_flow_translation_test(const WaveProfile& w, double half_window,
                                              double t_max, double dx, double cfl) {
  double X = half_window, r = w.r;
  if (!(X > 0.0 && X < w.half_domain()))
    throw Error(ErrorKind::InvalidParams, "window must lie inside the wave domain");
  if (!(t_max > 0.0 && dx > 0.0 && cfl > 0.0)) throw Error(ErrorKind::InvalidParams, "bad graph flow controls");
  auto half = static_cast<std::size_t>(std::max(8.0, std::round(X / dx)));
  dx = X / static_cast<double>(half);
  std::size_t N = 2 * half;
  std::vector<double> h(N + 1);
  for (std::size_t j = 0; j <= N; ++j) h[j] = w.h_star(-X + j * dx);

  // static part of the closed curve: analytic continuation past the window and a flat top
  double y_top = w.h_star(X) + 3 * r;
  double xt = w.x_top(y_top);
  double sX = w.arclength(X), sT = w.arclength(xt);
  double s1 = w.h_star_d1(X);
  double ds = dx * std::sqrt(1 + s1 * s1);
  auto ne = static_cast<std::size_t>(std::max(1.0, std::round((sT - sX) / ds)));
  std::vector<Point2> right, left, top;
  for (std::size_t k = 1; k <= ne; ++k) {
    double x = w.abscissa_at(sX + (sT - sX) * double(k) / double(ne));
    right.push_back({x, k == ne ? y_top : w.h_star(x)});
  }
  for (auto it = right.rbegin(); it != right.rend(); ++it) left.push_back({-it->x, it->y});
  auto nt = static_cast<std::size_t>(std::max(2.0, std::round(2 * xt / ds)));
  for (std::size_t k = 1; k < nt; ++k) top.push_back({xt - 2 * xt * double(k) / double(nt), y_top});

  auto velocity = [&](const std::vector<double>& hh, double t, std::vector<double>& v) {
    std::vector<Point2> pts;
    pts.reserve(left.size() + hh.size() + right.size() + top.size());
    for (auto p : left) pts.push_back({p.x, p.y + t});
    for (std::size_t j = 0; j <= N; ++j) pts.push_back({-X + j * dx, hh[j]});
    for (auto p : right) pts.push_back({p.x, p.y + t});
    for (auto p : top) pts.push_back({p.x, p.y + t});
    CurveFamily fam{PlanarCurve(std::move(pts))};
    BallOracle oracle(fam);
    for (std::size_t j = 1; j < N; ++j) {
      std::size_t id = left.size() + j;
      double k = graph_kappa(hh, j, dx);
      double val = 0.0;
      if (oracle.ext_fits(0, id, r)) val += 0.5 * k + 0.5 / r;
      if (oracle.int_fits(0, id, r)) val += 0.5 * k - 0.5 / r;
      v[j] = val;
    }
  };
  auto boundary = [&](double x, double t) { return w.h_star(x) + t; };
  return graph_flow(X, t_max, dx, cfl, std::move(h), velocity, boundary);
}

TranslationResult grim_reaper_translation_test(double half_window, double t_max, double dx,
                                               double cfl) {
  double X = half_window;
  if (!(X > 0.0 && X < 0.5 * M_PI))
    throw Error(ErrorKind::InvalidParams, "window must lie inside (-pi/2, pi/2)");
  if (!(t_max > 0.0 && dx > 0.0 && cfl > 0.0)) throw Error(ErrorKind::InvalidParams, "bad graph flow controls");
  auto half = static_cast<std::size_t>(std::max(8.0, std::round(X / dx)));
  dx = X / static_cast<double>(half);
  std::size_t N = 2 * half;
  auto g = [](double x) { return -std::log(std::cos(x)); };
  std::vector<double> h(N + 1);
  for (std::size_t j = 0; j <= N; ++j) h[j] = g(-X + j * dx);
  auto velocity = [&](const std::vector<double>& hh, double, std::vector<double>& v) {
    for (std::size_t j = 1; j < N; ++j) v[j] = graph_kappa(hh, j, dx);
  };
  auto boundary = [&](double x, double t) { return g(x) + t; };
  return graph_flow(X, t_max, dx, cfl, std::move(h), velocity, boundary);
}

WaveScaling make_scaling(double r_prime, double c) {
  if (!(r_prime > 0.0) || !(c > 0.0) || !(c < r_prime))
    throw Error(ErrorKind::InvalidParams, "speed must lie in (0, r')");
  return {r_prime, c};
}

}  // namespace rflow
