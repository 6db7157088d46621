#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rflow/analytic_sets.hpp"
#include "rflow/flow.hpp"

namespace rflow {

struct ShapeSpec {
  std::optional<AnalyticSet> set;  // empty when the shape comes from a curve file
  std::filesystem::path file;
  std::size_t n = 0;              // 0 derives the count from `spacing`
  double spacing = 0.0;
  double window = 1.0;
  std::optional<GradedSpacing> graded;
};

struct BarrierSpec {
  BarrierSchedule schedule;
  double tolerance = 0.0;  // clearance below -tolerance is a violation
};

struct Scenario {
  ShapeSpec shape;
  double r = 0.0;
  double t_max = 0.0;
  StepControls controls;
  int snapshot_stride = 100;
  std::optional<BarrierSpec> barrier;
  std::int64_t seed = 0;
  std::string name;
};

// One `shape` object of the scenario schema; r feeds the r-dependent kinds.
ShapeSpec parse_shape(const nlohmann::json& j, double r, const std::filesystem::path& base = {});

// Throws SchemaError on unknown keys, missing keys and wrong types.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

// Initial curve family; also installs graded spacing into the controls.
CurveFamily initial_family(Scenario& s);

struct ScenarioOutput {
  bool svg = false;
  bool quiet = true;
};

struct RunReport {
  std::vector<FlowEvent> events;
  double final_time = 0.0;
  long steps = 0;
  std::size_t components = 0;
  double final_area = 0.0;
  std::optional<double> min_clearance;
  std::optional<double> first_violation;
  std::vector<std::string> files;  // relative to the output directory
  double wall_clock = 0.0;

  bool has(EventKind k) const;
};

nlohmann::json to_json(const RunReport& r);

// Runs the flow and writes events.csv, series.csv, curve_*.csv (and svg) plus
// report.json into out_dir, which appears only once everything is written.
RunReport run_scenario(Scenario s, const std::filesystem::path& out_dir,
                       const ScenarioOutput& o = {});
RunReport run_scenario(const std::filesystem::path& path, const std::filesystem::path& out_dir,
                       const ScenarioOutput& o = {});

}  // namespace rflow
