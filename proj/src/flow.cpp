#include "rflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "rflow/error.hpp"
#include "rflow/r_curvature.hpp"
#include "rflow/segment_index.hpp"

namespace rflow {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Pinch: return "Pinch";
    case EventKind::Extinction: return "Extinction";
    case EventKind::MaxTime: return "MaxTime";
    case EventKind::Blowup: return "Blowup";
  }
  return "?";
}

FlowState make_state(CurveFamily family, double r, const StepControls& c) {
  if (!(r > 0.0)) throw Error(ErrorKind::InvalidR, "r must be positive");
  if (family.empty()) throw Error(ErrorKind::InvalidCurve, "empty family");
  if (!(c.cfl > 0.0) || c.resample_every < 1) throw Error(ErrorKind::InvalidParams, "controls");
  FlowState s;
  s.r = r;
  if (c.spacing) {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& cu : family.curves())
      for (auto p : cu.vertices()) h = std::min(h, c.spacing(p));
    s.h_target = h;
  } else if (c.target_vertices > 0) {
    s.h_target = perimeter(family) / static_cast<double>(c.target_vertices);
  } else {
    s.h_target = mean_edge_length(family);
  }
  s.family = std::move(family);
  return s;
}

double pinch_threshold(const FlowState& s, const StepControls& c) {
  return c.pinch_threshold > 0.0 ? c.pinch_threshold : 2.0 * s.h_target;
}

double extinction_area(const FlowState& s, const StepControls& c) {
  if (c.extinction_area > 0.0) return c.extinction_area;
  double a = 10.0 * s.h_target;
  return a * a;
}

double cfl_dt(const FlowState& s, const StepControls& c) {
  double h = min_edge_length(s.family);
  return c.cfl * std::min(h * h, 2.0 * s.r * h);
}

namespace {

using Poly = std::vector<Point2>;

Poly remesh_piece(const Poly& v, const FlowState& s, const StepControls& c) {
  if (c.spacing) {
    auto out = resample_graded_polyline(v, c.spacing);
    return out;
  }
  double P = perimeter(v);
  std::size_t n = v.size();
  if (n < PlanarCurve::kMinVertices) {
    n = std::max<std::size_t>(PlanarCurve::kMinVertices,
                              static_cast<std::size_t>(std::llround(P / s.h_target)));
    return resample_polyline_closed(v, n);
  }
  // halve or double the count so that resampling a uniform polygon keeps
  // (a superset of) its vertices
  double h = P / static_cast<double>(n);
  while (h < 0.5 * s.h_target && n % 2 == 0 && n / 2 >= PlanarCurve::kMinVertices) {
    n /= 2;
    h *= 2.0;
  }
  while (h > 2.0 * s.h_target) {
    n *= 2;
    h *= 0.5;
  }
  return resample_polyline_closed(v, n);
}

Point2 mean_point(const Poly& v) {
  Point2 m{};
  for (auto p : v) m = m + p;
  return (1.0 / static_cast<double>(v.size())) * m;
}

struct PinchPair {
  bool found = false;
  std::size_t i = 0, j = 0;
  double d = 0.0;
};

PinchPair find_pinch(const Poly& v, double threshold) {
  std::size_t n = v.size();
  std::vector<double> cum(n + 1, 0.0);
  std::vector<Segment> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    cum[i + 1] = cum[i] + dist(v[i], v[(i + 1) % n]);
    segs[i] = {v[i], v[(i + 1) % n], 0, static_cast<std::uint32_t>(i), 0.0};
  }
  double P = cum[n];
  double sep_min = 3.0 * threshold;
  auto arcsep = [&](std::size_t a, std::size_t b) {
    double d = std::abs(cum[a] - cum[b]);
    return std::min(d, P - d);
  };
  SegmentIndex index(std::move(segs));
  PinchPair best;
  best.d = threshold;
  for (std::size_t i = 0; i < n; ++i) {
    index.query_radius(v[i], threshold, [&](std::size_t sid, double) {
      const Segment& sg = index.segments()[sid];
      for (std::size_t j : {static_cast<std::size_t>(sg.index), (sg.index + 1) % n}) {
        if (j == i || arcsep(i, j) < sep_min) continue;
        double d = dist(v[i], v[j]);
        if (d < best.d) best = {true, std::min(i, j), std::max(i, j), d};
      }
    });
  }
  return best;
}

std::vector<FlowEvent> cut_all(std::vector<Poly>& lists, double threshold, double ext_area,
                               double time, const std::function<Poly(const Poly&)>& remesh) {
  std::vector<FlowEvent> events;
  for (int guard = 0; guard < 1000; ++guard) {
    bool cut = false;
    for (std::size_t k = 0; k < lists.size() && !cut; ++k) {
      const Poly& v = lists[k];
      auto pp = find_pinch(v, threshold);
      if (!pp.found) continue;
      cut = true;
      std::size_t i = pp.i, j = pp.j;
      events.push_back({EventKind::Pinch, time, 0.5 * (v[i] + v[j])});
      Poly a(v.begin() + i + 1, v.begin() + j);
      Poly b(v.begin() + j + 1, v.end());
      b.insert(b.end(), v.begin(), v.begin() + i);
      std::vector<Poly> keep;
      for (Poly* piece : {&a, &b}) {
        double ar = piece->size() >= 3 ? signed_area(*piece) : 0.0;
        // pieces below the vertex floor are under resolution and count as extinct
        if (piece->size() < PlanarCurve::kMinVertices || ar < ext_area) {
          Point2 where = piece->empty() ? 0.5 * (v[i] + v[j]) : mean_point(*piece);
          events.push_back({EventKind::Extinction, time, where});
          continue;
        }
        Poly m = remesh ? remesh(*piece) : *piece;
        if (signed_area(m) <= 0.0) throw Error(ErrorKind::SurgeryFailed, "cut piece lost orientation");
        keep.push_back(std::move(m));
      }
      lists.erase(lists.begin() + static_cast<std::ptrdiff_t>(k));
      lists.insert(lists.end(), keep.begin(), keep.end());
    }
    if (!cut) return events;
  }
  throw Error(ErrorKind::SurgeryFailed, "surgery did not terminate");
}

CurveFamily build_family(std::vector<Poly>& lists, ErrorKind on_fail) {
  std::vector<PlanarCurve> curves;
  curves.reserve(lists.size());
  try {
    for (auto& v : lists) curves.emplace_back(std::move(v));
    return CurveFamily(std::move(curves));
  } catch (const Error& e) {
    throw Error(on_fail, e.what());
  }
}

}  // namespace

SurgeryResult detect_pinch_and_cut(const CurveFamily& f, double threshold, double ext_area,
                                   double time,
                                   const std::function<Poly(const Poly&)>& remesh) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidParams, "threshold must be positive");
  std::vector<Poly> lists;
  for (const auto& c : f.curves()) lists.push_back(c.vertices());
  auto events = cut_all(lists, threshold, ext_area, time, remesh);
  if (events.empty()) return {f, {}};
  return {build_family(lists, ErrorKind::SurgeryFailed), events};
}

StepResult step(const FlowState& s, const StepControls& c, double dt_cap) {
  BallOracle oracle(s.family);
  std::vector<std::vector<double>> v(s.family.size());
  double vmax = 0.0;
  for (std::size_t k = 0; k < s.family.size(); ++k) {
    v[k].resize(s.family[k].size());
    for (std::size_t i = 0; i < v[k].size(); ++i) {
      v[k][i] = oracle.sample(k, i, s.r).value;
      vmax = std::max(vmax, std::abs(v[k][i]));
    }
  }
  double h_min = min_edge_length(s.family);
  double dt = std::min(cfl_dt(s, c), dt_cap);
  int halvings = 0;
  while (dt * vmax > h_min) {
    if (++halvings > c.max_halvings)
      throw Error(ErrorKind::BlowupDetected, "displacement exceeds the minimal edge length");
    dt *= 0.5;
  }

  std::vector<Poly> lists(s.family.size());
  for (std::size_t k = 0; k < s.family.size(); ++k) {
    const auto& cu = s.family[k];
    lists[k].resize(cu.size());
    for (std::size_t i = 0; i < cu.size(); ++i)
      lists[k][i] = cu[i] - (dt * v[k][i]) * oracle.normal(k, i);
  }

  StepResult out;
  out.dt = dt;
  out.state.r = s.r;
  out.state.h_target = s.h_target;
  out.state.step = s.step + 1;
  out.state.time = s.time + dt;
  auto remesh = [&](const Poly& p) { return remesh_piece(p, s, c); };
  if (out.state.step % c.resample_every == 0)
    for (auto& l : lists) l = remesh(l);

  double ext = extinction_area(s, c);
  out.events = cut_all(lists, pinch_threshold(s, c), ext, out.state.time, remesh);
  std::vector<Poly> alive;
  for (auto& l : lists) {
    if (signed_area(l) < ext) {
      out.events.push_back({EventKind::Extinction, out.state.time, mean_point(l)});
      continue;
    }
    alive.push_back(std::move(l));
  }
  if (!alive.empty()) {
    out.state.family = build_family(alive, ErrorKind::NumericalInstability);
  }
  return out;
}

double neck_width(const CurveFamily& f) {
  SegmentIndex index(segments_of(f));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto& c = f[k];
    std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 d = -1.0 * outward_normal(c, i);
      auto hit = index.first_hit(c[i], d, 0.0, [&](const Segment& s) {
        return !(s.curve == k && (s.index == i || s.index == (i + n - 1) % n));
      });
      best = std::min(best, hit.distance);
    }
  }
  return best;
}

bool contains(const PlanarCurve& outer, const PlanarCurve& inner) {
  if (curves_intersect(outer.vertices(), inner.vertices())) return false;
  return point_inside(outer.vertices(), inner[0]);
}

SeriesRow diagnostics(const FlowState& s) {
  SeriesRow row;
  row.time = s.time;
  if (s.family.empty()) return row;
  row.area = area(s.family);
  row.perimeter = perimeter(s.family);
  row.min_kappa = std::numeric_limits<double>::infinity();
  row.min_kappa_r = std::numeric_limits<double>::infinity();
  row.max_kappa_r = -std::numeric_limits<double>::infinity();
  auto kr = kappa_r(s.family, s.r);
  for (const auto& curve : kr)
    for (const auto& x : curve) {
      row.min_kappa = std::min(row.min_kappa, x.kappa);
      row.min_kappa_r = std::min(row.min_kappa_r, x.value);
      row.max_kappa_r = std::max(row.max_kappa_r, x.value);
    }
  row.neck_width = neck_width(s.family);
  return row;
}

Trajectory run(const FlowState& initial, double t_max, const StepControls& c,
               const RunOptions& opt) {
  if (!(t_max >= initial.time)) throw Error(ErrorKind::InvalidParams, "t_max before start");
  Trajectory tr;
  FlowState s = initial;
  auto snapshot = [&](const FlowState& st) {
    tr.snapshots.push_back({st.time, st.step, st.family});
    if (opt.record_series) tr.series.push_back(diagnostics(st));
    if (opt.on_snapshot) opt.on_snapshot(st);
  };
  snapshot(s);
  int stride = std::max(1, opt.snapshot_stride);
  bool last_was_snapshot = true;
  while (true) {
    if (s.time >= t_max * (1.0 - 1e-15)) {
      tr.events.push_back({EventKind::MaxTime, s.time, {}});
      break;
    }
    if (opt.stop && opt.stop(s)) break;
    StepResult res = step(s, c, t_max - s.time);
    s = std::move(res.state);
    if (opt.on_step && !s.family.empty()) opt.on_step(s);
    bool pinched = false;
    for (auto& e : res.events) {
      tr.events.push_back(e);
      pinched = pinched || e.kind == EventKind::Pinch;
    }
    if (s.family.empty()) {
      last_was_snapshot = false;
      break;
    }
    last_was_snapshot = false;
    if (s.step % stride == 0 || pinched) {
      snapshot(s);
      last_was_snapshot = true;
    }
    if (pinched && opt.stop_at_pinch) break;
  }
  if (!last_was_snapshot && !s.family.empty()) snapshot(s);
  tr.final_state = s;
  return tr;
}

double barrier_clearance(const BarrierSchedule& b, double t, const CurveFamily& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : f.curves())
    for (auto p : c.vertices()) m = std::min(m, b.half_height(t, p.x) - std::abs(p.y));
  return m;
}

ComparisonReport comparison_experiment(const CurveFamily& inner, double r,
                                       const BarrierSchedule& barrier, double t_max,
                                       const StepControls& c, RunOptions opt, double tol) {
  ComparisonReport rep;
  rep.closing_time = barrier.closing_time();
  auto user_cb = opt.on_snapshot;
  opt.on_snapshot = [&](const FlowState& s) {
    if (user_cb) user_cb(s);
    if (s.time >= rep.closing_time) return;
    double cl = barrier_clearance(barrier, s.time, s.family);
    rep.clearance.push_back({s.time, cl});
    rep.min_clearance = std::min(rep.min_clearance, cl);
    if (cl < -tol && !rep.first_violation) rep.first_violation = s.time;
  };
  FlowState s0 = make_state(inner, r, c);
  rep.trajectory = run(s0, t_max, c, opt);
  return rep;
}

namespace {

// curvature interpolated at the crossing of the normal line through p
bool kappa_along_normal(const PlanarCurve& c, const std::vector<double>& kappa,
                        const SegmentIndex& index, Point2 p, Point2 nu, double* out) {
  auto hit_pos = index.first_hit(p, nu, 0.0);
  auto hit_neg = index.first_hit(p, -1.0 * nu, 0.0);
  const SegmentIndex::Nearest* h = nullptr;
  if (hit_pos.distance < hit_neg.distance) h = &hit_pos; else h = &hit_neg;
  if (!std::isfinite(h->distance)) return false;
  const Segment& s = index.segments()[h->segment];
  std::size_t a = s.index, b = (s.index + 1) % c.size();
  *out = (1.0 - h->t) * kappa[a] + h->t * kappa[b];
  return true;
}

}  // namespace

ResidualReport curvature_evolution_residual(const Trajectory& tr, double r, int stride,
                                            double t_begin, double t_end) {
  if (stride < 1) throw Error(ErrorKind::InvalidParams, "stride must be positive");
  ResidualReport rep;
  const auto& snaps = tr.snapshots;
  std::size_t st = static_cast<std::size_t>(stride);
  for (std::size_t k = st; k + st < snaps.size(); ++k) {
    const auto& mid = snaps[k];
    if (mid.time < t_begin || mid.time > t_end) continue;
    const auto& lo = snaps[k - st];
    const auto& hi = snaps[k + st];
    if (mid.family.size() != 1 || lo.family.size() != 1 || hi.family.size() != 1) continue;
    const PlanarCurve& c = mid.family[0];
    auto kr = kappa_r(c, r);
    std::vector<double> kmid(c.size()), v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      kmid[i] = kr[i].kappa;
      v[i] = kr[i].value;
    }
    auto klo = curvature(lo.family[0]);
    auto khi = curvature(hi.family[0]);
    SegmentIndex ilo(segments_of(lo.family[0])), ihi(segments_of(hi.family[0]));
    double hm = mid.time - lo.time, hp = hi.time - mid.time;
    std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 nu = outward_normal(c, i);
      double km, kp;
      if (!kappa_along_normal(lo.family[0], klo, ilo, c[i], nu, &km)) continue;
      if (!kappa_along_normal(hi.family[0], khi, ihi, c[i], nu, &kp)) continue;
      double dtk = -hp / (hm * (hm + hp)) * km + (hp - hm) / (hm * hp) * kmid[i] +
                   hm / (hp * (hm + hp)) * kp;
      std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
      double a = dist(c[i], c[im]), b = dist(c[ip], c[i]);
      double vss = 2.0 * ((v[ip] - v[i]) / b - (v[i] - v[im]) / a) / (a + b);
      double res = std::abs(dtk - (vss + kmid[i] * kmid[i] * v[i]));
      rep.max_residual = std::max(rep.max_residual, res);
      rep.max_dt_kappa = std::max(rep.max_dt_kappa, std::abs(dtk));
      ++rep.points;
    }
    ++rep.snapshots_used;
  }
  if (rep.snapshots_used == 0)
    throw Error(ErrorKind::InsufficientSnapshots, "no snapshot triple inside the window");
  return rep;
}

}  // namespace rflow
