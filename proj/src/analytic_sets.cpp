#include "rflow/analytic_sets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rflow/error.hpp"
#include "rflow/r_curvature.hpp"

namespace rflow {

const char* to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Stadium: return "stadium";
    case ShapeKind::GEta: return "g_eta";
    case ShapeKind::FEps: return "f_eps";
    case ShapeKind::DumbbellThin: return "dumbbell_thin";
    case ShapeKind::DumbbellFat: return "dumbbell_fat";
    case ShapeKind::RoundedSquare: return "rounded_square";
  }
  return "?";
}

double GEtaParams::a() const { return amplitude > 0.0 ? amplitude : r / (32.0 * M_PI * M_PI); }
double GEtaParams::k() const { return wavenumber > 0.0 ? wavenumber : 4.0 * M_PI; }

double DumbbellParams::neck_half_length() const {
  double a = lobe_radius + fillet, b = neck_end + fillet;
  return lobe_center - std::sqrt(a * a - b * b);
}

AnalyticSet make_circle(double R, Point2 center) {
  AnalyticSet s{ShapeKind::Circle, CircleParams{R, center}};
  validate(s);
  return s;
}

AnalyticSet make_stadium(double half_width, double half_length) {
  AnalyticSet s{ShapeKind::Stadium, StadiumParams{half_width, half_length}};
  validate(s);
  return s;
}

AnalyticSet make_g_eta(double r, double eta, double amplitude, double wavenumber) {
  AnalyticSet s{ShapeKind::GEta, GEtaParams{r, eta, amplitude, wavenumber}};
  validate(s);
  return s;
}

AnalyticSet make_f_eps(double r, double M, double eps) {
  AnalyticSet s{ShapeKind::FEps, FEpsParams{r, M, eps}};
  validate(s);
  return s;
}

AnalyticSet make_rounded_square(double side, double corner, double blend) {
  AnalyticSet s{ShapeKind::RoundedSquare, RoundedSquareParams{side, corner, blend}};
  validate(s);
  return s;
}

AnalyticSet make_dumbbell(ShapeKind kind, const DumbbellParams& p) {
  if (kind != ShapeKind::DumbbellThin && kind != ShapeKind::DumbbellFat)
    throw Error(ErrorKind::InvalidParams, "not a dumbbell kind");
  AnalyticSet s{kind, p};
  validate(s);
  return s;
}

GEtaParams thin_dumbbell_barrier(double r) {
  // a k^2 = 0.3375 / r keeps kappa_r >= 1/(4r); lobes sit at the crests +-pi/k
  return GEtaParams{r, 0.009 * r, 0.15 * r, 1.5 / r};
}

AnalyticSet thin_dumbbell(double r) {
  GEtaParams b = thin_dumbbell_barrier(r);
  DumbbellParams p;
  p.r = r;
  p.lobe_radius = 0.25 * r;
  p.lobe_center = M_PI / b.k();
  p.neck_waist = 0.008 * r;
  p.neck_end = 0.01 * r;
  p.fillet = 0.0625 * r;
  return make_dumbbell(ShapeKind::DumbbellThin, p);
}

AnalyticSet fat_dumbbell(double r, double R, double gap) {
  if (gap <= 0.0) gap = 4.0 * r;
  DumbbellParams p;
  p.r = r;
  p.lobe_radius = R;
  p.lobe_center = R + gap;
  p.neck_waist = 0.008 * r;
  p.neck_end = 0.01 * r;
  p.fillet = 2.0 * r;
  return make_dumbbell(ShapeKind::DumbbellFat, p);
}

namespace {

[[noreturn]] void bad(const std::string& m) { throw Error(ErrorKind::InvalidParams, m); }

bool pos(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void validate(const AnalyticSet& s) {
  switch (s.kind) {
    case ShapeKind::Circle: {
      auto& p = std::get<CircleParams>(s.params);
      if (!pos(p.R)) bad("circle radius must be positive");
      break;
    }
    case ShapeKind::Stadium: {
      auto& p = std::get<StadiumParams>(s.params);
      if (!pos(p.half_width) || !(p.half_length >= 0.0)) bad("stadium sizes");
      break;
    }
    case ShapeKind::GEta: {
      auto& p = std::get<GEtaParams>(s.params);
      if (!pos(p.r) || !pos(p.eta)) bad("g_eta needs r > 0 and eta > 0");
      if (p.standard_shape()) {
        if (p.eta >= p.r / (64.0 * M_PI * M_PI)) bad("eta must lie in (0, r/(64 pi^2))");
      } else {
        // r-thin: the whole set fits in a strip of width below 2r
        if (!(p.eta + 2.0 * p.a() < p.r)) bad("barrier is not r-thin");
      }
      break;
    }
    case ShapeKind::FEps: {
      auto& p = std::get<FEpsParams>(s.params);
      if (!(p.M > 1.0)) bad("M must exceed 1");
      if (!pos(p.r) || !(p.r < 1.0 / p.M)) bad("r must lie in (0, 1/M)");
      if (!pos(p.eps) || !(p.eps < p.r / p.M)) bad("eps must lie in (0, r/M)");
      break;
    }
    case ShapeKind::DumbbellThin:
    case ShapeKind::DumbbellFat: {
      auto& p = std::get<DumbbellParams>(s.params);
      if (!pos(p.lobe_radius) || !pos(p.lobe_center) || !pos(p.neck_waist) || !pos(p.fillet))
        bad("dumbbell sizes must be positive");
      if (p.neck_end < p.neck_waist || p.neck_end >= p.lobe_radius) bad("neck widths");
      if (!(p.neck_half_length() > 0.0)) bad("lobes overlap the neck");
      break;
    }
    case ShapeKind::RoundedSquare: {
      auto& p = std::get<RoundedSquareParams>(s.params);
      double b = p.blend > 0.0 ? p.blend : 0.5 * p.corner;
      if (!pos(p.side) || !pos(p.corner)) bad("rounded square sizes");
      if (b >= 0.5 * M_PI * p.corner) bad("blend too long for the corner");
      if (4.0 * p.corner >= p.side) bad("corner too large for the side");
      break;
    }
  }
}

GraphValue g_eta_value(const GEtaParams& p, double x) {
  double a = p.a(), k = p.k();
  return {p.eta + a * (1.0 - std::cos(k * x)), a * k * std::sin(k * x),
          a * k * k * std::cos(k * x)};
}

GraphValue bump_value(double t) {
  double s = t < 0.0 ? -1.0 : 1.0;
  double u = std::abs(t);
  if (u <= 1.0) return {1.0, 0.0, 0.0};
  if (u >= 2.0) return {0.0, 0.0, 0.0};
  double v = u - 1.0;
  double S = v * v * v * (10.0 + v * (-15.0 + 6.0 * v));
  double S1 = 30.0 * v * v * (1.0 - v) * (1.0 - v);
  double S2 = 60.0 * v * (1.0 - v) * (1.0 - 2.0 * v);
  return {1.0 - S, -s * S1, -S2};
}

GraphValue f_eps_value(const FEpsParams& p, double x) {
  double M2 = p.M * p.M, rho = p.M * p.r;
  double ax = std::abs(x), sx = x < 0.0 ? -1.0 : 1.0;
  GraphValue phi = bump_value(x / rho);
  double P = phi.g, P1 = phi.d1 / rho, P2 = phi.d2 / (rho * rho);
  double A = x * x / (2.0 * M2 * rho), A1 = x / (M2 * rho), A2 = 1.0 / (M2 * rho);
  double B = ax / (M2 * (1.0 + ax));
  double B1 = sx / (M2 * (1.0 + ax) * (1.0 + ax));
  double B2 = -2.0 / (M2 * (1.0 + ax) * (1.0 + ax) * (1.0 + ax));
  GraphValue g;
  g.g = p.eps + A * P + (1.0 - P) * B;
  g.d1 = A1 * P + A * P1 - P1 * B + (1.0 - P) * B1;
  g.d2 = A2 * P + 2.0 * A1 * P1 + A * P2 - P2 * B - 2.0 * P1 * B1 + (1.0 - P) * B2;
  return g;
}

namespace {

void append_arc(std::vector<Point2>& out, Point2 c, double R, double t0, double t1, double ds) {
  int m = std::max(2, static_cast<int>(std::ceil(std::abs(t1 - t0) * R / ds)));
  for (int k = 0; k < m; ++k) {
    double t = t0 + (t1 - t0) * k / m;
    out.push_back({c.x + R * std::cos(t), c.y + R * std::sin(t)});
  }
}

void append_line(std::vector<Point2>& out, Point2 a, Point2 b, double ds) {
  int m = std::max(1, static_cast<int>(std::ceil(dist(a, b) / ds)));
  for (int k = 0; k < m; ++k) out.push_back(a + (double(k) / m) * (b - a));
}

std::vector<Point2> graph_boundary(const std::function<double(double)>& g, double W, double ds) {
  std::vector<Point2> out;
  double gw = g(W);
  append_arc(out, {W, 0.0}, gw, -0.5 * M_PI, 0.5 * M_PI, ds);
  int m = static_cast<int>(std::ceil(2.0 * W / ds));
  for (int k = 0; k < m; ++k) {
    double x = W - 2.0 * W * k / m;
    out.push_back({x, g(x)});
  }
  append_arc(out, {-W, 0.0}, g(-W), 0.5 * M_PI, 1.5 * M_PI, ds);
  for (int k = 0; k < m; ++k) {
    double x = -W + 2.0 * W * k / m;
    out.push_back({x, -g(x)});
  }
  return out;
}

// Upper-right quarter of the dumbbell, from (c + R, 0) to (0, w0), with the
// local step chosen by ds(p).
std::vector<Point2> dumbbell_quarter(const DumbbellParams& p,
                                     const std::function<double(Point2)>& ds) {
  double R = p.lobe_radius, c = p.lobe_center, w0 = p.neck_waist, w1 = p.neck_end;
  double rf = p.fillet, xf = p.neck_half_length();
  Point2 C{c, 0.0}, F{xf, w1 + rf};
  Point2 d = C - F;
  double dn = norm(d);
  Point2 T = F + (rf / dn) * d;
  double theta_T = std::atan2(T.y - C.y, T.x - C.x);
  double alpha = std::atan2(d.y, d.x);

  std::vector<Point2> out;
  for (double t = 0.0; t < theta_T;) {
    Point2 q{c + R * std::cos(t), R * std::sin(t)};
    out.push_back(q);
    t += ds(q) / R;
  }
  // concave fillet, clockwise from the tangency point down to (xf, w1)
  for (double t = alpha; t > -0.5 * M_PI;) {
    Point2 q{F.x + rf * std::cos(t), F.y + rf * std::sin(t)};
    out.push_back(q);
    t -= ds(q) / rf;
  }
  auto w = [&](double x) { return w0 + (w1 - w0) * 0.5 * (1.0 - std::cos(M_PI * x / xf)); };
  for (double x = xf; x > 0.0;) {
    Point2 q{x, w(x)};
    out.push_back(q);
    x -= ds(q);
  }
  out.push_back({0.0, w0});
  return out;
}

std::vector<Point2> dumbbell_boundary(const DumbbellParams& p,
                                      const std::function<double(Point2)>& ds) {
  auto q = dumbbell_quarter(p, ds);
  std::vector<Point2> top = q;  // (c+R, 0) ... (0, w0)
  for (std::size_t k = q.size() - 1; k-- > 0;) top.push_back({-q[k].x, q[k].y});
  // top ends at (-c-R, 0); bottom is the mirror image, traversed left to right
  std::vector<Point2> out = top;
  for (std::size_t k = top.size() - 1; k-- > 1;) out.push_back({top[k].x, -top[k].y});
  return out;
}

// Rounded square built by integrating a prescribed curvature.
class RoundedSquareGeom {
 public:
  explicit RoundedSquareGeom(const RoundedSquareParams& p)
      : s_(p.side), e_(p.corner), b_(p.blend > 0.0 ? p.blend : 0.5 * p.corner) {
    arc_ = (0.5 * M_PI - b_ / e_) * e_;
    lc_ = 2.0 * b_ + arc_;
    Point2 end = corner_point(lc_);
    X_ = end.x;
    ls_ = s_ - 2.0 * X_;
    total_ = 4.0 * (ls_ + lc_);
  }

  double perimeter() const { return total_; }
  double corner_extent() const { return X_; }
  double side() const { return s_; }

  // position at arclength u from the start of the bottom straight side
  Point2 at(double u) const {
    u = std::fmod(u, total_);
    if (u < 0.0) u += total_;
    int j = std::min(3, static_cast<int>(u / (ls_ + lc_)));
    double v = u - j * (ls_ + lc_);
    Point2 local;
    if (v < ls_) {
      local = Point2{-0.5 * s_ + X_ + v, -0.5 * s_};
    } else {
      local = Point2{0.5 * s_ - X_, -0.5 * s_} + corner_point(v - ls_);
    }
    return rotate(local, j);
  }

  double curvature_along_corner(double u) const {
    if (u <= b_) return S(u / b_) / e_;
    if (u <= b_ + arc_) return 1.0 / e_;
    return S(1.0 - (u - b_ - arc_) / b_) / e_;
  }

  // bottom-side curvature at abscissa x (left half mirrored)
  double curvature_at_x(double x) const {
    double ax = std::abs(x);
    if (ax <= 0.5 * s_ - X_) return 0.0;
    if (ax > 0.5 * s_) throw Error(ErrorKind::OutOfWindow, "abscissa beyond the square");
    double target = ax - (0.5 * s_ - X_);
    double lo = 0.0, hi = lc_;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (corner_point(mid).x < target) lo = mid; else hi = mid;
    }
    return curvature_along_corner(0.5 * (lo + hi));
  }

 private:
  static double S(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
  static double I(double t) { return t * t * t * t * (2.5 + t * (-3.0 + t)); }

  double heading(double u) const {
    if (u <= b_) return b_ * I(u / b_) / e_;
    double tb = 0.5 * b_ / e_;
    if (u <= b_ + arc_) return tb + (u - b_) / e_;
    double v = u - b_ - arc_;
    return tb + arc_ / e_ + b_ * (0.5 - I(1.0 - v / b_)) / e_;
  }

  Point2 integrate(double u0, double u1) const {
    static const std::array<double, 8> gx{-0.9602898564975363, -0.7966664774136267,
                                          -0.5255324099163290, -0.1834346424956498,
                                          0.1834346424956498,  0.5255324099163290,
                                          0.7966664774136267,  0.9602898564975363};
    static const std::array<double, 8> gw{0.1012285362903763, 0.2223810344533745,
                                          0.3137066458778873, 0.3626837833783620,
                                          0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};
    Point2 acc{};
    int panels = 16;
    for (int p = 0; p < panels; ++p) {
      double a = u0 + (u1 - u0) * p / panels, b = u0 + (u1 - u0) * (p + 1) / panels;
      double m = 0.5 * (a + b), h = 0.5 * (b - a);
      for (int k = 0; k < 8; ++k) {
        double th = heading(m + h * gx[k]);
        acc = acc + (h * gw[k]) * Point2{std::cos(th), std::sin(th)};
      }
    }
    return acc;
  }

  Point2 corner_point(double u) const {
    if (u <= b_) return integrate(0.0, u);
    Point2 pb = integrate(0.0, b_);
    double tb = heading(b_);
    if (u <= b_ + arc_) {
      double t = heading(u);
      return pb + e_ * Point2{std::sin(t) - std::sin(tb), std::cos(tb) - std::cos(t)};
    }
    double ta = heading(b_ + arc_);
    Point2 pa = pb + e_ * Point2{std::sin(ta) - std::sin(tb), std::cos(tb) - std::cos(ta)};
    return pa + integrate(b_ + arc_, u);
  }

  static Point2 rotate(Point2 p, int quarter) {
    for (int k = 0; k < quarter; ++k) p = Point2{-p.y, p.x};
    return p;
  }

  double s_, e_, b_;
  double arc_ = 0.0, lc_ = 0.0, X_ = 0.0, ls_ = 0.0, total_ = 0.0;
};

double approx_perimeter(const AnalyticSet& s, double window) {
  switch (s.kind) {
    case ShapeKind::Circle: return 2.0 * M_PI * std::get<CircleParams>(s.params).R;
    case ShapeKind::Stadium: {
      auto& p = std::get<StadiumParams>(s.params);
      return 4.0 * p.half_length + 2.0 * M_PI * p.half_width;
    }
    case ShapeKind::RoundedSquare: return 4.0 * std::get<RoundedSquareParams>(s.params).side;
    default: break;
  }
  std::vector<Point2> coarse;
  return perimeter(dense_boundary(s, 1e-3 * window, window));
}

}  // namespace

std::vector<Point2> dense_boundary(const AnalyticSet& s, double ds, double window) {
  validate(s);
  std::vector<Point2> out;
  switch (s.kind) {
    case ShapeKind::Circle: {
      auto& p = std::get<CircleParams>(s.params);
      append_arc(out, p.center, p.R, 0.0, 2.0 * M_PI, ds);
      break;
    }
    case ShapeKind::Stadium: {
      auto& p = std::get<StadiumParams>(s.params);
      double l = p.half_width, L = p.half_length;
      if (L > 0.0) append_line(out, {-L, -l}, {L, -l}, ds);
      append_arc(out, {L, 0.0}, l, -0.5 * M_PI, 0.5 * M_PI, ds);
      if (L > 0.0) append_line(out, {L, l}, {-L, l}, ds);
      append_arc(out, {-L, 0.0}, l, 0.5 * M_PI, 1.5 * M_PI, ds);
      break;
    }
    case ShapeKind::GEta: {
      auto p = std::get<GEtaParams>(s.params);
      out = graph_boundary([&](double x) { return g_eta_value(p, x).g; }, window, ds);
      break;
    }
    case ShapeKind::FEps: {
      auto p = std::get<FEpsParams>(s.params);
      out = graph_boundary([&](double x) { return f_eps_value(p, x).g; }, window, ds);
      break;
    }
    case ShapeKind::DumbbellThin:
    case ShapeKind::DumbbellFat: {
      auto& p = std::get<DumbbellParams>(s.params);
      out = dumbbell_boundary(p, [ds](Point2) { return ds; });
      break;
    }
    case ShapeKind::RoundedSquare: {
      RoundedSquareGeom g(std::get<RoundedSquareParams>(s.params));
      std::size_t m = static_cast<std::size_t>(std::ceil(g.perimeter() / ds));
      for (std::size_t k = 0; k < m; ++k) out.push_back(g.at(g.perimeter() * k / m));
      break;
    }
  }
  return out;
}

PlanarCurve discretize(const AnalyticSet& s, std::size_t n, double window) {
  if (n < 64) throw Error(ErrorKind::InvalidParams, "discretize needs n >= 64");
  validate(s);
  if (s.kind == ShapeKind::Circle) {
    auto& p = std::get<CircleParams>(s.params);
    std::vector<Point2> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      double t = 2.0 * M_PI * k / n;
      v[k] = {p.center.x + p.R * std::cos(t), p.center.y + p.R * std::sin(t)};
    }
    return PlanarCurve(std::move(v));
  }
  if (s.kind == ShapeKind::RoundedSquare) {
    // exact points, already uniform in arclength
    RoundedSquareGeom g(std::get<RoundedSquareParams>(s.params));
    std::vector<Point2> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = g.at(g.perimeter() * k / n);
    return PlanarCurve(std::move(v));
  }
  double ds = approx_perimeter(s, window) / (16.0 * static_cast<double>(n));
  auto dense = dense_boundary(s, ds, window);
  return PlanarCurve(resample_polyline_closed(dense, n));
}

PlanarCurve discretize_graded(const AnalyticSet& s, const std::function<double(Point2)>& h) {
  validate(s);
  std::vector<Point2> dense;
  auto fine = [&](Point2 p) { return h(p) / 16.0; };
  switch (s.kind) {
    case ShapeKind::DumbbellThin:
    case ShapeKind::DumbbellFat:
      dense = dumbbell_boundary(std::get<DumbbellParams>(s.params), fine);
      break;
    case ShapeKind::Circle:
    case ShapeKind::Stadium: {
      double hmin = std::numeric_limits<double>::infinity();
      for (auto p : dense_boundary(s, approx_perimeter(s, 1.0) / 4096.0)) hmin = std::min(hmin, h(p));
      dense = dense_boundary(s, hmin / 16.0);
      break;
    }
    default:
      throw Error(ErrorKind::InvalidParams, "graded discretization needs a bounded shape");
  }
  return resample_graded(PlanarCurve(std::move(dense)), h);
}

double exact_curvature(const AnalyticSet& s, double x, double window) {
  validate(s);
  auto graph = [](GraphValue v) { return -v.d2 / std::pow(1.0 + v.d1 * v.d1, 1.5); };
  switch (s.kind) {
    case ShapeKind::Circle: return 1.0 / std::get<CircleParams>(s.params).R;
    case ShapeKind::Stadium: {
      auto& p = std::get<StadiumParams>(s.params);
      double ax = std::abs(x);
      if (ax > p.half_length + p.half_width) throw Error(ErrorKind::OutOfWindow, "beyond stadium");
      return ax <= p.half_length ? 0.0 : 1.0 / p.half_width;
    }
    case ShapeKind::GEta:
      if (std::abs(x) > window) throw Error(ErrorKind::OutOfWindow, "outside the window");
      return graph(g_eta_value(std::get<GEtaParams>(s.params), x));
    case ShapeKind::FEps:
      if (std::abs(x) > window) throw Error(ErrorKind::OutOfWindow, "outside the window");
      return graph(f_eps_value(std::get<FEpsParams>(s.params), x));
    case ShapeKind::RoundedSquare:
      return RoundedSquareGeom(std::get<RoundedSquareParams>(s.params)).curvature_at_x(x);
    default:
      throw Error(ErrorKind::InvalidParams, "no closed-form curvature for dumbbells");
  }
}

namespace {

// kappa_r at the upper-boundary vertices nearest to the requested abscissae.
std::vector<std::pair<double, double>> sample_upper(const PlanarCurve& c, double r,
                                                    const std::vector<double>& xs) {
  std::vector<std::pair<double, std::size_t>> upper;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].y > 0.0) upper.push_back({c[i].x, i});
  std::sort(upper.begin(), upper.end());
  CurveFamily fam(c);
  BallOracle oracle(fam);
  std::vector<std::pair<double, double>> out;
  out.reserve(xs.size());
  for (double x : xs) {
    auto it = std::lower_bound(upper.begin(), upper.end(), std::make_pair(x, std::size_t(0)));
    if (it == upper.end()) --it;
    if (it != upper.begin() && std::abs(std::prev(it)->first - x) < std::abs(it->first - x)) --it;
    out.push_back({it->first, oracle.sample(0, it->second, r).value});
  }
  return out;
}

}  // namespace

BarrierCheck verify_barrier_G(const GEtaParams& p, int n_samples, double window) {
  AnalyticSet s{ShapeKind::GEta, p};
  validate(s);
  if (n_samples < 1) throw Error(ErrorKind::InvalidParams, "n_samples must be positive");
  if (window <= 2.0 * p.r) throw Error(ErrorKind::InvalidParams, "window too small");
  double h = p.r / 100.0;
  std::size_t n = static_cast<std::size_t>(std::ceil(4.0 * window / h));
  auto c = discretize(s, n, window);
  std::vector<double> xs(n_samples);
  double lim = window - p.r;
  for (int k = 0; k < n_samples; ++k)
    xs[k] = n_samples == 1 ? 0.0 : -lim + 2.0 * lim * k / (n_samples - 1);
  BarrierCheck out;
  out.bound = 1.0 / (4.0 * p.r);
  out.min_kappa_r = std::numeric_limits<double>::infinity();
  for (auto [x, k] : sample_upper(c, p.r, xs)) out.min_kappa_r = std::min(out.min_kappa_r, k);
  out.samples = xs.size();
  out.pass = out.min_kappa_r >= out.bound;
  return out;
}

BarrierCheck verify_barrier_G(double r, double eta, int n_samples) {
  return verify_barrier_G(GEtaParams{r, eta, 0.0, 0.0}, n_samples, 1.0);
}

FBarrierCheck calibrate_and_verify_barrier_F(double r, double M, int n_samples) {
  FEpsParams p{r, M, r / (2.0 * M)};
  AnalyticSet s{ShapeKind::FEps, p};
  validate(s);
  if (n_samples < 2) throw Error(ErrorKind::InvalidParams, "n_samples must be at least 2");
  double window = 10.0 + 2.0 * r;
  double h = r / 20.0;
  std::size_t n = static_cast<std::size_t>(std::ceil(4.0 * window / h));
  auto c = discretize(s, n, window);
  double rho = M * r;
  // half the samples spread over |p1| <= 10, the rest concentrated on |p1| <= 2 rho
  std::vector<double> xs;
  int far = n_samples / 2, near = n_samples - far;
  for (int k = 0; k < far; ++k) xs.push_back(-10.0 + 20.0 * k / (far - 1));
  for (int k = 0; k < near; ++k) xs.push_back(-2.0 * rho + 4.0 * rho * k / std::max(1, near - 1));
  FBarrierCheck out;
  out.c0_observed = out.min_near_origin = out.min_far = std::numeric_limits<double>::infinity();
  for (auto [x, k] : sample_upper(c, r, xs)) {
    out.c0_observed = std::min(out.c0_observed, k);
    if (std::abs(x) <= 2.0 * rho) out.min_near_origin = std::min(out.min_near_origin, k);
    else out.min_far = std::min(out.min_far, k);
  }
  // interior-ball exclusion near the origin
  CurveFamily fam(c);
  BallOracle oracle(fam);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::abs(c[i].x) <= 2.0 * rho && oracle.int_fits(0, i, r)) out.int_fits_near_origin = true;
  out.samples = xs.size();
  out.pass = out.c0_observed > 0.0;
  return out;
}

double calibrate_M(double r, const std::vector<double>& candidates, int n_samples) {
  for (double M : candidates) {
    if (!(r < 1.0 / M)) continue;
    if (calibrate_and_verify_barrier_F(r, M, n_samples).pass) return M;
  }
  throw Error(ErrorKind::ValidationFailed, "no candidate M passes");
}

FBoundChain f_bound_chain(const FEpsParams& p, int n) {
  FBoundChain b;
  double M = p.M, r = p.r, rho = M * r;
  b.min_kappa_far_scaled = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    double x = 10.0 * k / n;
    GraphValue g = f_eps_value(p, x);
    b.max_g2_scaled = std::max(b.max_g2_scaled, std::abs(g.d2) * M * M * M * r);
    if (x >= 2.0 * rho) {
      b.max_g1_far_scaled = std::max(b.max_g1_far_scaled, std::abs(g.d1) * M * M);
      double kappa = -g.d2 / std::pow(1.0 + g.d1 * g.d1, 1.5);
      b.min_kappa_far_scaled = std::min(b.min_kappa_far_scaled, kappa * M * M * 1331.0);
    } else {
      b.max_g_near_scaled = std::max(b.max_g_near_scaled, g.g * M / r);
      b.max_g1_near_scaled = std::max(b.max_g1_near_scaled, std::abs(g.d1) * M * M);
    }
  }
  return b;
}

BumpBounds bump_bounds(int n) {
  BumpBounds b;
  for (int k = 0; k <= n; ++k) {
    GraphValue v = bump_value(-2.5 + 5.0 * k / n);
    b.max_d1 = std::max(b.max_d1, std::abs(v.d1));
    b.max_d2 = std::max(b.max_d2, std::abs(v.d2));
  }
  return b;
}

std::vector<ProfilePoint> kappa_r_bottom_profile(const RoundedSquareParams& sq, double r,
                                                 std::size_t n) {
  AnalyticSet s{ShapeKind::RoundedSquare, sq};
  auto c = discretize(s, n);
  CurveFamily fam(c);
  BallOracle oracle(fam);
  std::vector<ProfilePoint> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    Point2 nu = oracle.normal(0, i);
    if (c[i].x > 0.0 || nu.y > -std::sqrt(0.5)) continue;
    auto smp = oracle.sample(0, i, r);
    out.push_back({c[i].x, smp.value, smp.kappa});
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.x < b.x; });
  return out;
}

ConvexityWitness midpoint_convexity_witness(const std::vector<ProfilePoint>& prof, double r) {
  ConvexityWitness w;
  double high = 0.5 / r;
  auto is = [](double v, double level) { return std::abs(v - level) <= 1e-9 * (1.0 + level); };
  bool has_high = false, has_low = false;
  for (auto& p : prof) {
    has_high = has_high || is(p.phi, high);
    has_low = has_low || is(p.phi, 0.0);
  }
  w.plateaus_found = has_high && has_low;
  w.plateau_high = high;
  w.plateau_low = 0.0;
  w.violation = -std::numeric_limits<double>::infinity();
  // triples symmetric in index; on the flat side indices are uniform in x
  std::size_t m = prof.size();
  for (std::size_t i2 = 1; i2 + 1 < m; ++i2) {
    for (std::size_t d = 1; d <= i2 && i2 + d < m; ++d) {
      const auto &a = prof[i2 - d], &b = prof[i2], &c = prof[i2 + d];
      if (std::abs((a.x + c.x) * 0.5 - b.x) > 1e-9) continue;
      double v = b.phi - 0.5 * (a.phi + c.phi);
      if (v > w.violation) w = {v, a.x, b.x, c.x, high, 0.0, w.plateaus_found};
    }
  }
  return w;
}

double BarrierSchedule::half_height(double t, double x) const {
  double q = param_at(t);
  if (base.kind == ShapeKind::GEta) {
    GEtaParams p = std::get<GEtaParams>(base.params);
    p.eta = q;
    return g_eta_value(p, x).g;
  }
  FEpsParams p = std::get<FEpsParams>(base.params);
  p.eps = q;
  return f_eps_value(p, x).g;
}

BarrierSchedule g_eta_schedule(const GEtaParams& p) {
  AnalyticSet s{ShapeKind::GEta, p};
  validate(s);
  return BarrierSchedule{s, p.eta, 1.0 / (4.0 * p.r)};
}

BarrierSchedule f_eps_schedule(double r, double M, double c0) {
  if (!(c0 > 0.0 && c0 < 1.0)) throw Error(ErrorKind::InvalidParams, "c0 must lie in (0, 1)");
  FEpsParams p{r, M, r / (2.0 * M)};
  AnalyticSet s{ShapeKind::FEps, p};
  validate(s);
  return BarrierSchedule{s, p.eps, 0.5 * c0};
}

double GradedSpacing::operator()(Point2 p) const {
  double d = norm(p);
  if (d <= fine_radius) return h_fine;
  return std::min(h_coarse, h_fine + growth * (d - fine_radius));
}

}  // namespace rflow
