#include "rflow/scenario.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

#include "rflow/constants.hpp"
#include "rflow/error.hpp"
#include "rflow/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rflow {

namespace {

[[noreturn]] void schema_fail(const std::string& msg) { throw Error(ErrorKind::SchemaError, msg); }

// Reads keys of one JSON object and rejects whatever it did not ask about.
class Keys {
 public:
  Keys(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
    if (!j_.is_object()) schema_fail(ctx_ + ": expected an object");
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }

  const json& at(const std::string& k) {
    if (!has(k)) schema_fail(ctx_ + ": missing key '" + k + "'");
    return j_.at(k);
  }

  double number(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number()) schema_fail(ctx_ + "." + k + ": expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) schema_fail(ctx_ + "." + k + ": not finite");
    return d;
  }
  double number(const std::string& k, double fallback) { return has(k) ? number(k) : fallback; }

  double positive(const std::string& k) {
    double d = number(k);
    if (!(d > 0.0)) schema_fail(ctx_ + "." + k + ": must be positive");
    return d;
  }
  double positive(const std::string& k, double fallback) { return has(k) ? positive(k) : fallback; }

  std::int64_t integer(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number_integer()) schema_fail(ctx_ + "." + k + ": expected an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& k, std::int64_t fallback, std::int64_t lo) {
    if (!has(k)) return fallback;
    auto v = integer(k);
    if (v < lo) schema_fail(ctx_ + "." + k + ": must be at least " + std::to_string(lo));
    return v;
  }

  std::string string(const std::string& k) {
    const json& v = at(k);
    if (!v.is_string()) schema_fail(ctx_ + "." + k + ": expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) schema_fail(ctx_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string ctx_;
  std::set<std::string> seen_;
};

}  // namespace

ShapeSpec parse_shape(const json& j, double r, const fs::path& base) {
  Keys k(j, "shape");
  std::string kind = k.string("kind");
  ShapeSpec s;
  auto count = [&] {
    s.n = static_cast<std::size_t>(k.integer("n", 0, 0));
    s.spacing = k.positive("spacing", 0.0);
    if (s.n == 0 && s.spacing == 0.0) schema_fail("shape: give 'n' or 'spacing'");
  };
  if (kind == "circle") {
    Point2 c{};
    if (k.has("center")) {
      const json& v = k.at("center");
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        schema_fail("shape.center: expected [x, y]");
      c = {v[0].get<double>(), v[1].get<double>()};
    }
    s.set = make_circle(k.positive("R"), c);
    count();
  } else if (kind == "stadium") {
    s.set = make_stadium(k.positive("half_width"), k.positive("half_length"));
    count();
  } else if (kind == "g_eta") {
    s.set = make_g_eta(r, k.positive("eta"), k.number("amplitude", 0.0), k.number("wavenumber", 0.0));
    s.window = k.positive("window", 1.0);
    count();
  } else if (kind == "f_eps") {
    s.set = make_f_eps(r, k.positive("M"), k.positive("eps"));
    s.window = k.positive("window", 1.0);
    count();
  } else if (kind == "rounded_square") {
    s.set = make_rounded_square(k.positive("side"), k.positive("corner"), k.number("blend", 0.0));
    count();
  } else if (kind == "dumbbell_thin") {
    s.set = thin_dumbbell(r);
    s.n = static_cast<std::size_t>(k.integer("n", 0, 0));
    s.spacing = k.positive("spacing", kThinDumbbellSpacing);
  } else if (kind == "dumbbell_fat") {
    s.set = fat_dumbbell(r, k.positive("lobe_radius", 3.0), k.positive("gap", 4 * r));
    GradedSpacing g;
    g.h_fine = k.positive("h_fine", g.h_fine);
    g.h_coarse = k.positive("h_coarse", g.h_coarse);
    g.fine_radius = k.positive("fine_radius", g.fine_radius);
    g.growth = k.positive("growth", g.growth);
    s.graded = g;
  } else if (kind == "file") {
    fs::path p = k.string("path");
    s.file = p.is_absolute() ? p : base / p;
  } else {
    schema_fail("shape.kind: unknown kind '" + kind + "'");
  }
  k.finish();
  if (s.set) validate(*s.set);
  return s;
}

namespace {

std::optional<BarrierSpec> parse_barrier(const json& j, double r) {
  Keys k(j, "barrier");
  std::string kind = k.string("kind");
  BarrierSpec b;
  b.tolerance = k.number("tolerance", 1e-3 * r);
  if (kind == "g_eta") {
    GEtaParams p{r, k.positive("eta0"), k.number("amplitude", 0.0), k.number("wavenumber", 0.0)};
    validate(AnalyticSet{ShapeKind::GEta, p});
    b.schedule = g_eta_schedule(p);
  } else if (kind == "f_eps") {
    double M = k.positive("M", kCalibratedM);
    double c0 = k.positive("c0", kC0Cap);
    if (!(c0 < 1.0)) schema_fail("barrier.c0: must lie in (0, 1)");
    b.schedule = f_eps_schedule(r, M, c0);
  } else {
    schema_fail("barrier.kind: unknown kind '" + kind + "'");
  }
  k.finish();
  return b;
}

}  // namespace

Scenario parse_scenario(const json& j, const fs::path& base_dir) {
  Keys k(j, "scenario");
  Scenario s;
  s.r = k.positive("r");
  s.t_max = k.positive("t_max");
  s.seed = k.integer("seed");
  s.shape = parse_shape(k.at("shape"), s.r, base_dir);

  Keys c(k.at("controls"), "controls");
  s.controls.cfl = c.positive("cfl", s.controls.cfl);
  s.controls.target_vertices = static_cast<std::size_t>(c.integer("target_vertices", 0, 0));
  s.controls.resample_every = static_cast<int>(c.integer("resample_every", 5, 1));
  if (c.has("pinch_threshold")) {
    const json& v = c.at("pinch_threshold");
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") schema_fail("controls.pinch_threshold: expected a number or \"auto\"");
    } else {
      s.controls.pinch_threshold = c.positive("pinch_threshold");
    }
  }
  s.snapshot_stride = static_cast<int>(c.integer("snapshot_stride", 100, 1));
  c.finish();

  if (k.has("barrier")) s.barrier = parse_barrier(k.at("barrier"), s.r);
  k.finish();
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    schema_fail(path.string() + ": " + e.what());
  }
  auto s = parse_scenario(j, path.parent_path());
  s.name = path.stem().string();
  return s;
}

CurveFamily initial_family(Scenario& s) {
  const ShapeSpec& sh = s.shape;
  if (!sh.set) return CurveFamily(PlanarCurve(read_curve_csv(sh.file)));
  if (sh.graded) {
    GradedSpacing g = *sh.graded;
    s.controls.spacing = g;
    if (s.controls.pinch_threshold <= 0.0) s.controls.pinch_threshold = 2.0 * g.h_fine;
    return CurveFamily(discretize_graded(*sh.set, g));
  }
  std::size_t n = sh.n;
  if (n == 0) {
    double P = perimeter(dense_boundary(*sh.set, sh.spacing / 16.0, sh.window));
    n = static_cast<std::size_t>(std::llround(P / sh.spacing));
  }
  return CurveFamily(discretize(*sh.set, n, sh.window));
}

bool RunReport::has(EventKind k) const {
  for (const auto& e : events)
    if (e.kind == k) return true;
  return false;
}

json to_json(const RunReport& r) {
  json ev = json::array();
  for (const auto& e : r.events)
    ev.push_back({{"time", e.time}, {"kind", to_string(e.kind)}, {"x", e.location.x}, {"y", e.location.y}});
  json out = {{"events", ev},
              {"final", {{"time", r.final_time}, {"steps", r.steps}, {"components", r.components}, {"area", r.final_area}}},
              {"files", r.files},
              {"wall_clock_s", r.wall_clock}};
  if (r.min_clearance) {
    out["barrier"] = {{"min_clearance", *r.min_clearance}};
    out["barrier"]["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
  }
  return out;
}

RunReport run_scenario(Scenario s, const fs::path& out_dir, const ScenarioOutput& o) {
  auto t0 = std::chrono::steady_clock::now();
  CurveFamily fam = initial_family(s);
  StagedDir dir(out_dir);
  RunReport rep;
  ViewBox box = bounding_box(fam);

  RunOptions opt;
  opt.snapshot_stride = s.snapshot_stride;
  opt.on_snapshot = [&](const FlowState& st) {
    std::string stem = snapshot_stem(st.time, st.step);
    for (std::size_t k = 0; k < st.family.size(); ++k) {
      std::string name = "curve_" + stem + "_c" + std::to_string(k) + ".csv";
      write_curve_csv(dir.path() / name, st.family[k].vertices());
      rep.files.push_back(name);
    }
    if (o.svg) {
      std::string name = "snapshot_" + stem + ".svg";
      write_svg(dir.path() / name, st.family, box);
      rep.files.push_back(name);
    }
    if (!o.quiet)
      std::cerr << "t=" << st.time << " step=" << st.step << " components=" << st.family.size() << "\n";
  };

  Trajectory tr;
  if (s.barrier) {
    auto cmp = comparison_experiment(fam, s.r, s.barrier->schedule, s.t_max, s.controls, opt,
                                     s.barrier->tolerance);
    rep.min_clearance = cmp.min_clearance;
    rep.first_violation = cmp.first_violation;
    tr = std::move(cmp.trajectory);
  } else {
    tr = run(make_state(fam, s.r, s.controls), s.t_max, s.controls, opt);
  }

  rep.events = tr.events;
  rep.final_time = tr.final_state.time;
  rep.steps = tr.final_state.step;
  rep.components = tr.final_state.family.size();
  rep.final_area = tr.final_state.family.empty() ? 0.0 : area(tr.final_state.family);
  write_events_csv(dir.path() / "events.csv", tr.events);
  write_series_csv(dir.path() / "series.csv", tr.series);
  rep.files.insert(rep.files.begin(), {"events.csv", "series.csv"});
  rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ofstream f(dir.path() / "report.json");
    if (!f) throw Error(ErrorKind::IoError, "cannot write report.json");
    json j = to_json(rep);
    j["scenario"] = s.name;
    j["seed"] = s.seed;
    f << j.dump(2) << "\n";
  }
  dir.commit();
  return rep;
}

RunReport run_scenario(const fs::path& path, const fs::path& out_dir, const ScenarioOutput& o) {
  return run_scenario(load_scenario(path), out_dir, o);
}

}  // namespace rflow
