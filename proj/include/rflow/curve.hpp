#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

// Closed simple polygon, counter-clockwise, at least 16 vertices.
class PlanarCurve {
 public:
  static constexpr std::size_t kMinVertices = 16;

  // Validates; a clockwise input is reversed to counter-clockwise.
  // Anything else that is wrong throws InvalidCurve.
  explicit PlanarCurve(std::vector<Point2> vertices);

  std::size_t size() const { return v_.size(); }
  const Point2& operator[](std::size_t i) const { return v_[i]; }
  const std::vector<Point2>& vertices() const { return v_; }
  Point2 at_wrapped(std::ptrdiff_t i) const;

 private:
  std::vector<Point2> v_;
};

// Pairwise disjoint collection of curves bounding one set.
class CurveFamily {
 public:
  CurveFamily() = default;
  explicit CurveFamily(std::vector<PlanarCurve> curves);
  explicit CurveFamily(PlanarCurve curve);

  std::size_t size() const { return curves_.size(); }
  bool empty() const { return curves_.empty(); }
  const PlanarCurve& operator[](std::size_t i) const { return curves_[i]; }
  const std::vector<PlanarCurve>& curves() const { return curves_; }
  std::size_t total_vertices() const;

 private:
  std::vector<PlanarCurve> curves_;
};

double signed_area(std::span<const Point2> v);
double area(const PlanarCurve& c);
double area(const CurveFamily& f);
double perimeter(std::span<const Point2> v);
double perimeter(const PlanarCurve& c);
double perimeter(const CurveFamily& f);
Point2 centroid(const PlanarCurve& c);

bool is_simple(std::span<const Point2> v);
bool curves_intersect(std::span<const Point2> a, std::span<const Point2> b);

// Turning-angle estimator: 2 sin(dtheta/2) / mean adjacent edge length.
// Exact for regular polygons inscribed in a circle.
std::vector<double> curvature(const PlanarCurve& c);
double curvature_at(const PlanarCurve& c, std::size_t i);

// Unit outward normal at vertex i (edge bisector rotated clockwise).
Point2 outward_normal(const PlanarCurve& c, std::size_t i);
std::vector<Point2> outward_normals(const PlanarCurve& c);

std::vector<double> edge_lengths(const PlanarCurve& c);
double min_edge_length(const PlanarCurve& c);
double min_edge_length(const CurveFamily& f);
double mean_edge_length(const CurveFamily& f);

// n points equally spaced in arclength starting at vertex 0.
PlanarCurve resample_uniform(const PlanarCurve& c, std::size_t n);
std::vector<Point2> resample_polyline_closed(std::span<const Point2> v, std::size_t n);

// Resample so that edge lengths follow the spacing field h(p). The vertex
// count is whatever integral of 1/h gives, at least 16.
PlanarCurve resample_graded(const PlanarCurve& c, const std::function<double(Point2)>& h);
std::vector<Point2> resample_graded_polyline(std::span<const Point2> v,
                                             const std::function<double(Point2)>& h);

// Negative inside, positive outside, zero on the curve.
double signed_distance(const PlanarCurve& c, Point2 p);
bool point_inside(std::span<const Point2> v, Point2 p);

struct WidthResult {
  double width = 0.0;
  double direction = 0.0;  // angle of the measuring direction, in [0, pi)
};
WidthResult min_width(const PlanarCurve& c);

struct InradiusResult {
  double radius = 0.0;
  Point2 center;
};
InradiusResult inradius(const PlanarCurve& c);

}  // namespace rflow
