#include "rflow/curve.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "rflow/error.hpp"
#include "rflow/segment_index.hpp"

namespace rflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::QuadratureUnderflow: return "QuadratureUnderflow";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::BlowupDetected: return "BlowupDetected";
    case ErrorKind::SurgeryFailed: return "SurgeryFailed";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::InvalidR: return "InvalidR";
    case ErrorKind::AmbiguousTangency: return "AmbiguousTangency";
    case ErrorKind::InsufficientSnapshots: return "InsufficientSnapshots";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BlowupDetected:
    case ErrorKind::SurgeryFailed:
    case ErrorKind::QuadratureUnderflow:
    case ErrorKind::DegenerateCurve:
    case ErrorKind::AmbiguousTangency:
    case ErrorKind::NumericalInstability:
    case ErrorKind::InsufficientSnapshots:
    case ErrorKind::ValidationFailed:
      return true;
    default:
      return false;
  }
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Sign of orient(a, b, c) with a floating filter and an exact fallback.
int orientation(Point2 a, Point2 b, Point2 c) {
  double l = (b.x - a.x) * (c.y - a.y);
  double r = (b.y - a.y) * (c.x - a.x);
  double det = l - r;
  double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  Rational e = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return e > 0 ? 1 : (e < 0 ? -1 : 0);
}

bool on_segment(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  int o1 = orientation(a, b, c);
  int o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a);
  int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(c, a, b)) return true;
  if (o2 == 0 && on_segment(d, a, b)) return true;
  if (o3 == 0 && on_segment(a, c, d)) return true;
  if (o4 == 0 && on_segment(b, c, d)) return true;
  return false;
}

std::vector<Segment> raw_segments(std::span<const Point2> v, std::uint32_t curve) {
  std::vector<Segment> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    s[i] = {v[i], v[(i + 1) % v.size()], curve, static_cast<std::uint32_t>(i), 0.0};
  return s;
}

}  // namespace

PlanarCurve::PlanarCurve(std::vector<Point2> vertices) : v_(std::move(vertices)) {
  if (v_.size() < kMinVertices)
    throw Error(ErrorKind::InvalidCurve, "fewer than 16 vertices");
  for (const auto& p : v_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorKind::InvalidCurve, "non-finite vertex");
  double per = perimeter(v_);
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (dist(v_[i], v_[(i + 1) % v_.size()]) <= 1e-14 * per)
      throw Error(ErrorKind::InvalidCurve, "repeated consecutive vertex at " + std::to_string(i));
  double a = signed_area(v_);
  if (!(std::abs(a) > 0.0)) throw Error(ErrorKind::InvalidCurve, "zero area");
  if (!is_simple(v_)) throw Error(ErrorKind::InvalidCurve, "self-intersecting polygon");
  if (a < 0.0) std::reverse(v_.begin(), v_.end());
}

Point2 PlanarCurve::at_wrapped(std::ptrdiff_t i) const {
  std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v_.size());
  return v_[static_cast<std::size_t>(((i % n) + n) % n)];
}

CurveFamily::CurveFamily(PlanarCurve curve) { curves_.push_back(std::move(curve)); }

CurveFamily::CurveFamily(std::vector<PlanarCurve> curves) : curves_(std::move(curves)) {
  for (std::size_t i = 0; i < curves_.size(); ++i)
    for (std::size_t j = i + 1; j < curves_.size(); ++j)
      if (curves_intersect(curves_[i].vertices(), curves_[j].vertices()))
        throw Error(ErrorKind::InvalidCurve, "curves of a family intersect");
}

std::size_t CurveFamily::total_vertices() const {
  std::size_t n = 0;
  for (const auto& c : curves_) n += c.size();
  return n;
}

double signed_area(std::span<const Point2> v) {
  // shoelace relative to the first vertex to limit cancellation
  double s = 0.0;
  Point2 o = v.empty() ? Point2{} : v[0];
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i] - o, v[(i + 1) % v.size()] - o);
  return 0.5 * s;
}

double area(const PlanarCurve& c) { return signed_area(c.vertices()); }

double area(const CurveFamily& f) {
  double a = 0.0;
  for (const auto& c : f.curves()) a += area(c);
  return a;
}

double perimeter(std::span<const Point2> v) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += dist(v[i], v[(i + 1) % v.size()]);
  return p;
}

double perimeter(const PlanarCurve& c) { return perimeter(c.vertices()); }

double perimeter(const CurveFamily& f) {
  double p = 0.0;
  for (const auto& c : f.curves()) p += perimeter(c);
  return p;
}

Point2 centroid(const PlanarCurve& c) {
  const auto& v = c.vertices();
  Point2 o = v[0];
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point2 p = v[i] - o, q = v[(i + 1) % v.size()] - o;
    double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)};
}

bool is_simple(std::span<const Point2> v) {
  std::size_t n = v.size();
  if (n < 3) return false;
  SegmentIndex index(raw_segments(v, 0));
  const auto& segs = index.segments();
  bool crossing = false;
  for (std::size_t k = 0; k < segs.size() && !crossing; ++k) {
    const Segment& s = segs[k];
    Box b;
    b.add(s.a);
    b.add(s.b);
    index.query_box(b, [&](std::size_t m) {
      if (crossing) return;
      const Segment& t = segs[m];
      if (t.index <= s.index) return;
      std::size_t gap = t.index - s.index;
      if (gap == 1 || gap == n - 1) {
        // adjacent edges share a vertex; they may only overlap if they fold back
        Point2 shared = gap == 1 ? s.b : s.a;
        Point2 p = gap == 1 ? s.a : s.b;
        Point2 q = gap == 1 ? t.b : t.a;
        if (orientation(p, shared, q) == 0 && dot(p - shared, q - shared) > 0.0) crossing = true;
        return;
      }
      if (segments_intersect(s.a, s.b, t.a, t.b)) crossing = true;
    });
  }
  return !crossing;
}

bool curves_intersect(std::span<const Point2> a, std::span<const Point2> b) {
  SegmentIndex index(raw_segments(b, 1));
  const auto& segs = index.segments();
  bool hit = false;
  for (std::size_t i = 0; i < a.size() && !hit; ++i) {
    Point2 p = a[i], q = a[(i + 1) % a.size()];
    Box box;
    box.add(p);
    box.add(q);
    index.query_box(box, [&](std::size_t m) {
      if (!hit && segments_intersect(p, q, segs[m].a, segs[m].b)) hit = true;
    });
  }
  return hit;
}

double curvature_at(const PlanarCurve& c, std::size_t i) {
  std::size_t n = c.size();
  Point2 prev = c[(i + n - 1) % n], cur = c[i], next = c[(i + 1) % n];
  Point2 e0 = cur - prev, e1 = next - cur;
  double dtheta = std::atan2(cross(e0, e1), dot(e0, e1));
  return 2.0 * std::sin(0.5 * dtheta) / (0.5 * (norm(e0) + norm(e1)));
}

std::vector<double> curvature(const PlanarCurve& c) {
  std::vector<double> k(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) k[i] = curvature_at(c, i);
  return k;
}

Point2 outward_normal(const PlanarCurve& c, std::size_t i) {
  std::size_t n = c.size();
  Point2 e0 = c[i] - c[(i + n - 1) % n], e1 = c[(i + 1) % n] - c[i];
  Point2 t = (1.0 / norm(e0)) * e0 + (1.0 / norm(e1)) * e1;
  double len = norm(t);
  if (len < 1e-300) t = e1;  // hairpin; fall back to the forward edge
  t = (1.0 / norm(t)) * t;
  return {t.y, -t.x};
}

std::vector<Point2> outward_normals(const PlanarCurve& c) {
  std::vector<Point2> nu(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) nu[i] = outward_normal(c, i);
  return nu;
}

std::vector<double> edge_lengths(const PlanarCurve& c) {
  std::vector<double> e(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) e[i] = dist(c[i], c[(i + 1) % c.size()]);
  return e;
}

double min_edge_length(const PlanarCurve& c) {
  auto e = edge_lengths(c);
  return *std::min_element(e.begin(), e.end());
}

double min_edge_length(const CurveFamily& f) {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& c : f.curves()) h = std::min(h, min_edge_length(c));
  return h;
}

double mean_edge_length(const CurveFamily& f) {
  return perimeter(f) / static_cast<double>(f.total_vertices());
}

std::vector<Point2> resample_polyline_closed(std::span<const Point2> v, std::size_t n) {
  std::size_t m = v.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + dist(v[i], v[(i + 1) % m]);
  double total = cum[m];
  std::vector<Point2> out(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
    double len = cum[seg + 1] - cum[seg];
    double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    Point2 a = v[seg], b = v[(seg + 1) % m];
    out[k] = t == 0.0 ? a : a + t * (b - a);
  }
  return out;
}

PlanarCurve resample_uniform(const PlanarCurve& c, std::size_t n) {
  if (n < PlanarCurve::kMinVertices) throw Error(ErrorKind::InvalidParams, "n < 16");
  return PlanarCurve(resample_polyline_closed(c.vertices(), n));
}

PlanarCurve resample_graded(const PlanarCurve& c, const std::function<double(Point2)>& h) {
  return PlanarCurve(resample_graded_polyline(c.vertices(), h));
}

std::vector<Point2> resample_graded_polyline(std::span<const Point2> v,
                                             const std::function<double(Point2)>& h) {
  std::size_t m = v.size();
  // weighted length of each edge by Simpson's rule on 1/h
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    Point2 a = v[i], b = v[(i + 1) % m];
    double len = dist(a, b);
    double w = (1.0 / h(a) + 4.0 / h(0.5 * (a + b)) + 1.0 / h(b)) / 6.0;
    cum[i + 1] = cum[i] + w * len;
  }
  double total = cum[m];
  std::size_t n = std::max<std::size_t>(PlanarCurve::kMinVertices,
                                        static_cast<std::size_t>(std::llround(total)));
  std::vector<Point2> out(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
    double len = cum[seg + 1] - cum[seg];
    double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    out[k] = v[seg] + t * (v[(seg + 1) % m] - v[seg]);
  }
  return out;
}

bool point_inside(std::span<const Point2> v, Point2 p) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double signed_distance(const PlanarCurve& c, Point2 p) {
  const auto& v = c.vertices();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::min(d, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  if (d == 0.0) return 0.0;
  return point_inside(v, p) ? -d : d;
}

namespace {

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i - 1] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

WidthResult min_width(const PlanarCurve& c) {
  auto h = convex_hull(c.vertices());
  std::size_t m = h.size();
  WidthResult best{std::numeric_limits<double>::infinity(), 0.0};
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    Point2 a = h[i], b = h[(i + 1) % m];
    Point2 e = b - a;
    double len = norm(e);
    auto height = [&](std::size_t k) { return cross(e, h[k] - a) / len; };
    while (height((j + 1) % m) > height(j)) j = (j + 1) % m;
    double w = height(j);
    if (w < best.width) {
      double ang = std::atan2(e.x, -e.y);  // direction of the edge normal
      ang = std::fmod(ang, M_PI);
      if (ang < 0.0) ang += M_PI;
      if (ang >= M_PI) ang -= M_PI;
      best = {w, ang};
    }
  }
  return best;
}

InradiusResult inradius(const PlanarCurve& c) {
  const auto& v = c.vertices();
  SegmentIndex index(raw_segments(v, 0));
  double h = perimeter(v) / 512.0;
  Box bb;
  for (auto p : v) bb.add(p);

  // scanline classification of a grid, O(n) per row
  std::vector<std::pair<double, Point2>> seeds;
  for (double y = bb.y0 + 0.5 * h; y < bb.y1; y += h) {
    std::vector<double> xs;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
      if ((v[i].y > y) != (v[j].y > y))
        xs.push_back(v[j].x + (y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y));
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      double x0 = xs[k], x1 = xs[k + 1];
      // always include the interval midpoint so thin rows are not skipped
      std::vector<double> cand{0.5 * (x0 + x1)};
      for (double x = x0 + 0.5 * h; x < x1; x += h) cand.push_back(x);
      for (double x : cand) {
        Point2 p{x, y};
        seeds.push_back({index.nearest(p).distance, p});
      }
    }
  }
  if (seeds.empty()) throw Error(ErrorKind::DegenerateCurve, "no interior grid point");
  std::sort(seeds.begin(), seeds.end(), [](auto& a, auto& b) { return a.first > b.first; });

  auto objective = [&](Point2 p) {
    if (!point_inside(v, p)) return 0.0;
    return index.nearest(p).distance;
  };

  InradiusResult best{seeds[0].first, seeds[0].second};
  std::size_t tries = std::min<std::size_t>(seeds.size(), 5);
  for (std::size_t s = 0; s < tries; ++s) {
    // Nelder-Mead ascent
    double step = std::max(seeds[s].first, h) * 0.5;
    std::array<Point2, 3> x{seeds[s].second, seeds[s].second + Point2{step, 0.0},
                            seeds[s].second + Point2{0.0, step}};
    std::array<double, 3> f{};
    for (int k = 0; k < 3; ++k) f[k] = objective(x[k]);
    for (int it = 0; it < 400; ++it) {
      std::array<int, 3> o{0, 1, 2};
      std::sort(o.begin(), o.end(), [&](int a, int b) { return f[a] > f[b]; });
      Point2 best_p = x[o[0]], mid_p = x[o[1]], worst = x[o[2]];
      if (dist(best_p, worst) < 1e-12 * (1.0 + norm(best_p)) ) break;
      Point2 cen = 0.5 * (best_p + mid_p);
      Point2 refl = cen + (cen - worst);
      double fr = objective(refl);
      if (fr > f[o[0]]) {
        Point2 exp = cen + 2.0 * (cen - worst);
        double fe = objective(exp);
        if (fe > fr) { x[o[2]] = exp; f[o[2]] = fe; } else { x[o[2]] = refl; f[o[2]] = fr; }
      } else if (fr > f[o[1]]) {
        x[o[2]] = refl;
        f[o[2]] = fr;
      } else {
        Point2 con = cen + 0.5 * (worst - cen);
        double fc = objective(con);
        if (fc > f[o[2]]) {
          x[o[2]] = con;
          f[o[2]] = fc;
        } else {
          for (int k : {o[1], o[2]}) {
            x[k] = best_p + 0.5 * (x[k] - best_p);
            f[k] = objective(x[k]);
          }
        }
      }
    }
    for (int k = 0; k < 3; ++k)
      if (f[k] > best.radius) best = {f[k], x[k]};
  }
  return best;
}

}  // namespace rflow
