#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rflow/analytic_sets.hpp"
#include "rflow/curve.hpp"

namespace rflow {

struct StepControls {
  double cfl = 0.2;
  int resample_every = 5;
  std::size_t target_vertices = 0;  // 0 keeps the initial spacing
  double pinch_threshold = 0.0;     // 0 selects 2 x target spacing
  double extinction_area = 0.0;     // 0 selects (10 x target spacing)^2
  int max_halvings = 20;
  // Optional graded target spacing; replaces uniform resampling.
  std::function<double(Point2)> spacing;
};

struct FlowState {
  double time = 0.0;
  CurveFamily family;
  double r = 0.0;
  long step = 0;
  double h_target = 0.0;  // target edge length (finest value when graded)
};

enum class EventKind { Pinch, Extinction, MaxTime, Blowup };
const char* to_string(EventKind k);

struct FlowEvent {
  EventKind kind = EventKind::MaxTime;
  double time = 0.0;
  Point2 location{};
};

FlowState make_state(CurveFamily family, double r, const StepControls& controls);
double pinch_threshold(const FlowState& s, const StepControls& c);
double extinction_area(const FlowState& s, const StepControls& c);

// cfl * min(h_min^2, 2 r h_min)
double cfl_dt(const FlowState& s, const StepControls& c);

struct StepResult {
  FlowState state;
  std::vector<FlowEvent> events;
  double dt = 0.0;
};
// One explicit step; dt is additionally capped by dt_cap.
StepResult step(const FlowState& s, const StepControls& c,
                double dt_cap = std::numeric_limits<double>::infinity());

struct SurgeryResult {
  CurveFamily family;
  std::vector<FlowEvent> events;
};
// Cuts every curve whose non-adjacent arcs come closer than threshold.
// `remesh` maps a raw piece to its final vertex list (identity if empty).
SurgeryResult detect_pinch_and_cut(
    const CurveFamily& f, double threshold, double extinction_area = 0.0, double time = 0.0,
    const std::function<std::vector<Point2>(const std::vector<Point2>&)>& remesh = {});

// Thickness along inward normals: min over vertices of the distance to the
// first boundary crossing of the inward normal ray.
double neck_width(const CurveFamily& f);

bool contains(const PlanarCurve& outer, const PlanarCurve& inner);

struct SeriesRow {
  double time = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double min_kappa = 0.0;
  double min_kappa_r = 0.0;
  double max_kappa_r = 0.0;
  double neck_width = 0.0;
};
SeriesRow diagnostics(const FlowState& s);

struct Snapshot {
  double time = 0.0;
  long step = 0;
  CurveFamily family;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<FlowEvent> events;
  std::vector<SeriesRow> series;
  FlowState final_state;
};

struct RunOptions {
  int snapshot_stride = 100;    // steps between snapshots (and series rows)
  bool record_series = true;
  bool stop_at_pinch = false;
  std::function<bool(const FlowState&)> stop;            // optional early stop
  std::function<void(const FlowState&)> on_snapshot;     // called at each snapshot
  std::function<void(const FlowState&)> on_step;         // called after every step
};

Trajectory run(const FlowState& initial, double t_max, const StepControls& c,
               const RunOptions& opt = {});

struct ComparisonReport {
  double closing_time = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  std::optional<double> first_violation;
  std::vector<std::pair<double, double>> clearance;  // (time, clearance)
  Trajectory trajectory;
};

// min over vertices of (barrier half-height at x) - |y|; negative means a
// vertex lies outside the barrier.
double barrier_clearance(const BarrierSchedule& b, double t, const CurveFamily& f);

// Evolves `inner` and checks E_t inside the shrinking barrier at every
// snapshot until the barrier closes (or t_max).
ComparisonReport comparison_experiment(const CurveFamily& inner, double r,
                                       const BarrierSchedule& barrier, double t_max,
                                       const StepControls& c, RunOptions opt, double tol);

struct ResidualReport {
  double max_residual = 0.0;
  double max_dt_kappa = 0.0;  // scale of the time derivative, for reference
  std::size_t points = 0;
  std::size_t snapshots_used = 0;
};
// Checks d/dt kappa = d_ss v + kappa^2 v with v = kappa_r along the
// trajectory, using snapshots in [t_begin, t_end] and neighbours `stride`
// snapshots apart.
ResidualReport curvature_evolution_residual(const Trajectory& tr, double r, int stride,
                                            double t_begin, double t_end);

}  // namespace rflow
