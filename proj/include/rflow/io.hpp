#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rflow/curve.hpp"
#include "rflow/flow.hpp"
#include "rflow/r_curvature.hpp"

namespace rflow {

// 17 significant digits, round-trips every double.
std::string format_double(double v);

// Header `x,y`, one vertex per row, closed implicitly.
void write_curve_csv(const std::filesystem::path& p, const std::vector<Point2>& v);
std::vector<Point2> read_curve_csv(const std::filesystem::path& p);

// kappa_f is optional; when given it becomes a trailing column.
void write_kappa_csv(const std::filesystem::path& p, const PlanarCurve& c,
                     const std::vector<RCurvatureSample>& s,
                     const std::vector<double>& kappa_f = {});
void write_kappa_csv(std::ostream& f, const PlanarCurve& c, const std::vector<RCurvatureSample>& s,
                     const std::vector<double>& kappa_f = {});
void write_events_csv(const std::filesystem::path& p, const std::vector<FlowEvent>& e);
void write_series_csv(const std::filesystem::path& p, const std::vector<SeriesRow>& rows);

struct ViewBox {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};
ViewBox bounding_box(const CurveFamily& f, double margin = 0.05);
void write_svg(const std::filesystem::path& p, const CurveFamily& f, const ViewBox& box);

// time and step tag used in snapshot file names: curve_<stem>_c<k>.csv
std::string snapshot_stem(double time, long step);

// Collects outputs in a sibling temporary directory and renames it into place
// on commit(); the temporary is removed if commit() never happens.
class StagedDir {
 public:
  explicit StagedDir(std::filesystem::path final_dir);
  ~StagedDir();
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;

  const std::filesystem::path& path() const { return tmp_; }
  const std::filesystem::path& final_path() const { return final_; }
  void commit();

 private:
  std::filesystem::path final_;
  std::filesystem::path tmp_;
  bool done_ = false;
};

}  // namespace rflow
