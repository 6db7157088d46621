#include "rflow/segment_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rflow {

double Box::distance2_to(Point2 p) const {
  double dx = std::max({x0 - p.x, 0.0, p.x - x1});
  double dy = std::max({y0 - p.y, 0.0, p.y - y1});
  return dx * dx + dy * dy;
}

double Box::distance_to(Point2 p) const { return std::sqrt(distance2_to(p)); }

double point_segment_distance(Point2 p, Point2 a, Point2 b, double* t_out) {
  Point2 d = b - a;
  double len2 = dot(d, d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return dist(p, a + t * d);
}

double SegmentIndex::allowance(const Segment& s, double rho, double rel_tol) {
  double len = dist(s.a, s.b);
  double chord = std::min(len * len / (8.0 * rho), 0.25 * len * s.turn);
  return rel_tol * rho + chord;
}

SegmentIndex::SegmentIndex(std::vector<Segment> segments) : segs_(std::move(segments)) {
  if (segs_.empty()) return;
  nodes_.reserve(2 * segs_.size() / 4 + 2);
  build(0, static_cast<std::uint32_t>(segs_.size()));
  seg_box_.resize(segs_.size());
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    seg_box_[i].add(segs_[i].a);
    seg_box_[i].add(segs_[i].b);
  }
}

int SegmentIndex::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  Box centers;
  for (std::uint32_t i = begin; i < end; ++i) {
    node.box.add(segs_[i].a);
    node.box.add(segs_[i].b);
    centers.add(0.5 * (segs_[i].a + segs_[i].b));
  }
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 4) return id;

  bool split_x = (centers.x1 - centers.x0) >= (centers.y1 - centers.y0);
  std::uint32_t mid = begin + (end - begin) / 2;
  auto key = [split_x](const Segment& s) { return split_x ? s.a.x + s.b.x : s.a.y + s.b.y; };
  std::nth_element(segs_.begin() + begin, segs_.begin() + mid, segs_.begin() + end,
                   [&](const Segment& u, const Segment& v) { return key(u) < key(v); });
  int l = build(begin, mid);
  int r = build(mid, end);
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

bool SegmentIndex::any_closer_than(Point2 c, double radius, double rel_tol) const {
  if (nodes_.empty()) return false;
  double prune = radius * (1.0 - rel_tol);
  double prune2 = prune * prune;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.box.distance2_to(c) >= prune2) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const Segment& s = segs_[i];
        double d = point_segment_distance(c, s.a, s.b);
        if (d < radius - allowance(s, radius, rel_tol)) return true;
      }
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return false;
}

SegmentIndex::Nearest SegmentIndex::nearest(
    Point2 p, const std::function<bool(const Segment&)>& keep) const {
  Nearest best;
  if (nodes_.empty()) return best;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.box.distance_to(p) >= best.distance) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        if (keep && !keep(segs_[i])) continue;
        double t;
        double d = point_segment_distance(p, segs_[i].a, segs_[i].b, &t);
        if (d < best.distance) best = {d, i, t};
      }
    } else {
      // visit the nearer child first
      double dl = nodes_[n.left].box.distance_to(p);
      double dr = nodes_[n.right].box.distance_to(p);
      if (dl < dr) {
        stack[top++] = n.right;
        stack[top++] = n.left;
      } else {
        stack[top++] = n.left;
        stack[top++] = n.right;
      }
    }
  }
  return best;
}

namespace {

bool ray_box(const Box& b, Point2 o, Point2 d, double t_max) {
  double t0 = 0.0, t1 = t_max;
  double lo[2] = {b.x0, b.y0}, hi[2] = {b.x1, b.y1}, oo[2] = {o.x, o.y}, dd[2] = {d.x, d.y};
  for (int a = 0; a < 2; ++a) {
    if (dd[a] == 0.0) {
      if (oo[a] < lo[a] || oo[a] > hi[a]) return false;
      continue;
    }
    double ta = (lo[a] - oo[a]) / dd[a], tb = (hi[a] - oo[a]) / dd[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

SegmentIndex::Nearest SegmentIndex::first_hit(
    Point2 o, Point2 d, double t_min, const std::function<bool(const Segment&)>& keep) const {
  Nearest best;
  if (nodes_.empty()) return best;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!ray_box(n.box, o, d, best.distance)) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const Segment& s = segs_[i];
        if (keep && !keep(s)) continue;
        Point2 e = s.b - s.a;
        double den = cross(d, e);
        if (den == 0.0) continue;
        Point2 w = s.a - o;
        double t = cross(w, e) / den;
        double u = cross(w, d) / den;
        if (t > t_min && t < best.distance && u >= 0.0 && u <= 1.0) best = {t, i, u};
      }
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  return best;
}

void SegmentIndex::query_box(const Box& box, const std::function<void(std::size_t)>& fn) const {
  if (nodes_.empty()) return;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!n.box.overlaps(box)) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i)
        if (seg_box_[i].overlaps(box)) fn(i);
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
}

void SegmentIndex::query_radius(Point2 p, double radius,
                                const std::function<void(std::size_t, double)>& fn) const {
  if (nodes_.empty()) return;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (n.box.distance2_to(p) > radius * radius) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        double d = point_segment_distance(p, segs_[i].a, segs_[i].b);
        if (d <= radius) fn(i, d);
      }
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
}

namespace {

double turning_angle(Point2 prev, Point2 cur, Point2 next) {
  Point2 e0 = cur - prev;
  Point2 e1 = next - cur;
  return std::abs(std::atan2(cross(e0, e1), dot(e0, e1)));
}

}  // namespace

std::vector<Segment> segments_of(const PlanarCurve& c, std::uint32_t curve_id) {
  const auto& v = c.vertices();
  std::size_t n = v.size();
  std::vector<double> turn(n);
  for (std::size_t i = 0; i < n; ++i)
    turn[i] = turning_angle(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
  std::vector<Segment> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    out[i] = {v[i], v[j], curve_id, static_cast<std::uint32_t>(i), std::max(turn[i], turn[j])};
  }
  return out;
}

std::vector<Segment> segments_of(const CurveFamily& f) {
  std::vector<Segment> out;
  out.reserve(f.total_vertices());
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto s = segments_of(f[k], static_cast<std::uint32_t>(k));
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace rflow
