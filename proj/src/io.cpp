#include "rflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "rflow/error.hpp"

namespace fs = std::filesystem;

namespace rflow {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + p.string());
  return f;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_number(const std::string& tok, const fs::path& p, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size())
    throw Error(ErrorKind::IoError,
                p.string() + ":" + std::to_string(line) + ": not a number '" + tok + "'");
  return v;
}

}  // namespace

void write_curve_csv(const fs::path& p, const std::vector<Point2>& v) {
  auto f = open_out(p);
  f << "x,y\n";
  for (auto q : v) f << format_double(q.x) << ',' << format_double(q.y) << '\n';
}

std::vector<Point2> read_curve_csv(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw Error(ErrorKind::IoError, "cannot read " + p.string());
  std::string line;
  if (!std::getline(f, line) || trim(line) != "x,y")
    throw Error(ErrorKind::IoError, p.string() + ": expected header x,y");
  std::vector<Point2> v;
  std::size_t no = 1;
  while (std::getline(f, line)) {
    ++no;
    line = trim(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw Error(ErrorKind::IoError, p.string() + ":" + std::to_string(no) + ": expected two columns");
    v.push_back({parse_number(trim(line.substr(0, comma)), p, no),
                 parse_number(trim(line.substr(comma + 1)), p, no)});
  }
  return v;
}

void write_kappa_csv(const fs::path& p, const PlanarCurve& c, const std::vector<RCurvatureSample>& s,
                     const std::vector<double>& kappa_f) {
  auto f = open_out(p);
  write_kappa_csv(f, c, s, kappa_f);
}

void write_kappa_csv(std::ostream& f, const PlanarCurve& c, const std::vector<RCurvatureSample>& s,
                     const std::vector<double>& kappa_f) {
  f << "index,x,y,kappa,ext_fits,int_fits,kappa_r_plus,kappa_r_minus,kappa_r";
  if (!kappa_f.empty()) f << ",kappa_f";
  f << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    f << i << ',' << format_double(c[i].x) << ',' << format_double(c[i].y) << ','
      << format_double(s[i].kappa) << ',' << int(s[i].ext_fits) << ',' << int(s[i].int_fits) << ','
      << format_double(s[i].plus) << ',' << format_double(s[i].minus) << ','
      << format_double(s[i].value);
    if (!kappa_f.empty()) f << ',' << format_double(kappa_f[i]);
    f << '\n';
  }
}

void write_events_csv(const fs::path& p, const std::vector<FlowEvent>& e) {
  auto f = open_out(p);
  f << "time,kind,x,y\n";
  for (const auto& ev : e)
    f << format_double(ev.time) << ',' << to_string(ev.kind) << ',' << format_double(ev.location.x)
      << ',' << format_double(ev.location.y) << '\n';
}

void write_series_csv(const fs::path& p, const std::vector<SeriesRow>& rows) {
  auto f = open_out(p);
  f << "time,area,perimeter,min_kappa,min_kappa_r,max_kappa_r,neck_width\n";
  for (const auto& r : rows)
    f << format_double(r.time) << ',' << format_double(r.area) << ','
      << format_double(r.perimeter) << ',' << format_double(r.min_kappa) << ','
      << format_double(r.min_kappa_r) << ',' << format_double(r.max_kappa_r) << ','
      << format_double(r.neck_width) << '\n';
}

ViewBox bounding_box(const CurveFamily& f, double margin) {
  ViewBox b{1e300, 1e300, -1e300, -1e300};
  for (const auto& c : f.curves())
    for (auto p : c.vertices()) {
      b.x0 = std::min(b.x0, p.x);
      b.y0 = std::min(b.y0, p.y);
      b.x1 = std::max(b.x1, p.x);
      b.y1 = std::max(b.y1, p.y);
    }
  if (b.x0 > b.x1) return {};
  double m = margin * std::max(b.x1 - b.x0, b.y1 - b.y0);
  return {b.x0 - m, b.y0 - m, b.x1 + m, b.y1 + m};
}

void write_svg(const fs::path& p, const CurveFamily& f, const ViewBox& b) {
  auto out = open_out(p);
  double w = b.x1 - b.x0, h = b.y1 - b.y0;
  // y is flipped so the picture has the usual orientation
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(b.x0) << ' '
      << format_double(-b.y1) << ' ' << format_double(w) << ' ' << format_double(h)
      << "\" width=\"800\" height=\"" << static_cast<int>(800 * h / std::max(w, 1e-300)) << "\">\n";
  for (const auto& c : f.curves()) {
    out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << format_double(2e-3 * w)
        << "\" d=\"";
    for (std::size_t i = 0; i < c.size(); ++i)
      out << (i ? 'L' : 'M') << format_double(c[i].x) << ',' << format_double(-c[i].y) << ' ';
    out << "Z\"/>\n";
  }
  out << "</svg>\n";
}

std::string snapshot_stem(double time, long step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t%.9e_s%ld", time, step);
  return buf;
}

StagedDir::StagedDir(fs::path final_dir) : final_(std::move(final_dir)) {
  if (final_.empty()) throw Error(ErrorKind::IoError, "empty output directory");
  final_ = fs::absolute(final_).lexically_normal();
  if (final_.filename().empty()) final_ = final_.parent_path();
  fs::path parent = final_.parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  std::string base = final_.filename().string();
  for (int k = 0; k < 1000; ++k) {
    fs::path cand = parent / ("." + base + ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(k));
    if (fs::create_directory(cand, ec)) {
      tmp_ = cand;
      return;
    }
  }
  throw Error(ErrorKind::IoError, "cannot create a staging directory next to " + final_.string());
}

StagedDir::~StagedDir() {
  if (!done_) {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }
}

void StagedDir::commit() {
  std::error_code ec;
  if (fs::exists(final_)) fs::remove_all(final_, ec);
  fs::rename(tmp_, final_, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot move outputs into " + final_.string() + ": " + ec.message());
  done_ = true;
}

}  // namespace rflow
