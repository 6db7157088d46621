#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rflow/curve.hpp"

namespace rflow {

struct Segment {
  Point2 a;
  Point2 b;
  std::uint32_t curve = 0;
  std::uint32_t index = 0;  // segment index runs from vertex index to index+1
  double turn = 0.0;        // larger turning angle at the two endpoints
};

struct Box {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(Point2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  void add(const Box& b) {
    x0 = std::min(x0, b.x0);
    y0 = std::min(y0, b.y0);
    x1 = std::max(x1, b.x1);
    y1 = std::max(y1, b.y1);
  }
  bool overlaps(const Box& b) const {
    return x0 <= b.x1 && b.x0 <= x1 && y0 <= b.y1 && b.y0 <= y1;
  }
  double distance_to(Point2 p) const;
  double distance2_to(Point2 p) const;
};

double point_segment_distance(Point2 p, Point2 a, Point2 b, double* t_out = nullptr);

// Static bounding-volume hierarchy over segments.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  explicit SegmentIndex(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segs_; }
  bool empty() const { return segs_.empty(); }

  // Allowance for segment s against a ball of radius rho: a relative
  // tolerance plus the depth by which the chord can cut into a ball that
  // touches the underlying smooth curve.
  static double allowance(const Segment& s, double rho, double rel_tol);

  // True if some segment lies closer to c than radius - allowance.
  bool any_closer_than(Point2 c, double radius, double rel_tol) const;

  struct Nearest {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t segment = 0;
    double t = 0.0;
  };
  // Nearest segment among those accepted by `keep` (all if empty).
  Nearest nearest(Point2 p, const std::function<bool(const Segment&)>& keep = {}) const;

  // First segment hit by the ray o + t d (d unit, t > t_min) among those
  // accepted by `keep`. distance is the ray parameter t.
  Nearest first_hit(Point2 o, Point2 d, double t_min,
                    const std::function<bool(const Segment&)>& keep = {}) const;

  // Calls fn(segment_id) for every segment whose box overlaps `box`.
  void query_box(const Box& box, const std::function<void(std::size_t)>& fn) const;

  // Calls fn(segment_id, distance) for every segment within `radius` of p.
  void query_radius(Point2 p, double radius,
                    const std::function<void(std::size_t, double)>& fn) const;

 private:
  struct Node {
    Box box;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };
  int build(std::uint32_t begin, std::uint32_t end);

  std::vector<Segment> segs_;
  std::vector<Box> seg_box_;
  std::vector<Node> nodes_;
};

std::vector<Segment> segments_of(const PlanarCurve& c, std::uint32_t curve_id = 0);
std::vector<Segment> segments_of(const CurveFamily& f);

}  // namespace rflow
