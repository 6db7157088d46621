#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rflow/error.hpp"
#include "rflow/io.hpp"
#include "rflow/scenario.hpp"

using namespace rflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = RFLOW_SCENARIO_DIR;
const std::string kCli = RFLOW_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    static int k = 0;
    path = fs::temp_directory_path() / ("rflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(k++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json circle_json() {
  return json::parse(R"({
    "shape": {"kind": "circle", "R": 0.3, "n": 64},
    "r": 0.2, "t_max": 0.01,
    "controls": {"cfl": 0.2, "target_vertices": 0, "resample_every": 5,
                 "pinch_threshold": "auto", "snapshot_stride": 50},
    "seed": 3})");
}

void expect_schema_error(const json& j) {
  try {
    parse_scenario(j);
    FAIL("accepted: " << j.dump());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int sh(const std::string& cmd) {
  int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen((cmd + " 2>/dev/null").c_str(), "r");
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  ::pclose(p);
  return out;
}

// siblings left behind by an aborted StagedDir
int staging_leftovers(const fs::path& parent) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(parent))
    if (e.path().filename().string().find(".tmp-") != std::string::npos) ++n;
  return n;
}

}  // namespace

TEST_CASE("scenario schema rejects unknown, missing and mistyped keys") {
  CHECK_NOTHROW(parse_scenario(circle_json()));

  auto j = circle_json();
  j["colour"] = "red";
  expect_schema_error(j);

  j = circle_json();
  j["controls"]["dt"] = 1e-3;
  expect_schema_error(j);

  j = circle_json();
  j["shape"]["radius"] = 0.3;
  expect_schema_error(j);

  j = circle_json();
  j.erase("seed");
  expect_schema_error(j);

  j = circle_json();
  j["r"] = "0.2";
  expect_schema_error(j);

  j = circle_json();
  j["controls"]["pinch_threshold"] = "manual";
  expect_schema_error(j);

  j = circle_json();
  j["shape"]["kind"] = "torus";
  expect_schema_error(j);

  j = circle_json();
  j["barrier"] = {{"kind", "f_eps"}, {"c0", 1.5}};
  expect_schema_error(j);
}

TEST_CASE("schema values reach the controls") {
  auto j = circle_json();
  j["controls"]["pinch_threshold"] = 0.05;
  j["controls"]["cfl"] = 0.1;
  auto s = parse_scenario(j);
  CHECK(s.controls.pinch_threshold == 0.05);
  CHECK(s.controls.cfl == 0.1);
  CHECK(s.snapshot_stride == 50);
  CHECK(s.seed == 3);
  CHECK(s.shape.n == 64);
  CHECK_FALSE(s.barrier);
}

TEST_CASE("bundled circle scenario goes extinct on the scalar law") {
  TempDir tmp;
  auto s = load_scenario(kScenarios / "circle_shrink.json");
  auto rep = run_scenario(s, tmp.path / "out");
  CHECK(rep.has(EventKind::Extinction));
  CHECK_FALSE(rep.has(EventKind::Pinch));
  CHECK(rep.components == 0);

  // pudgy phase dR/dt = -1/R down to R = r, then slim dR/dt = -(R + r)/(2 R r)
  // down to the radius whose area is the default extinction area (10 h)^2.
  double R0 = 0.3, r = 0.2, n = 128;
  double h = 2 * R0 * std::sin(M_PI / n);
  double Re = std::sqrt(100 * h * h / M_PI);
  double t_pudgy = (R0 * R0 - r * r) / 2;
  auto slim = [&](double R) { return 2 * r * (R - r * std::log(R + r)); };
  double t_ext = t_pudgy + slim(r) - slim(Re);
  double t_seen = -1;
  for (const auto& e : rep.events)
    if (e.kind == EventKind::Extinction) t_seen = e.time;
  CHECK(t_seen == doctest::Approx(t_ext).epsilon(1e-2));

  for (const auto& f : rep.files) CHECK(fs::exists(tmp.path / "out" / f));
  CHECK(fs::exists(tmp.path / "out" / "report.json"));
  auto j = json::parse(slurp(tmp.path / "out" / "report.json"));
  CHECK(j["scenario"] == "circle_shrink");
  CHECK(j["events"].size() == rep.events.size());
  CHECK(staging_leftovers(tmp.path) == 0);
}

TEST_CASE("identical scenario and seed give byte-identical csv") {
  TempDir tmp;
  auto s = parse_scenario(circle_json());
  auto a = run_scenario(s, tmp.path / "a");
  auto b = run_scenario(s, tmp.path / "b");
  REQUIRE(a.files == b.files);
  for (const auto& f : a.files) {
    if (fs::path(f).extension() != ".csv") continue;
    CHECK(slurp(tmp.path / "a" / f) == slurp(tmp.path / "b" / f));
  }
}

TEST_CASE("a run overwrites its output directory as a whole") {
  TempDir tmp;
  fs::create_directories(tmp.path / "out");
  std::ofstream(tmp.path / "out" / "stale.txt") << "old";
  run_scenario(parse_scenario(circle_json()), tmp.path / "out");
  CHECK_FALSE(fs::exists(tmp.path / "out" / "stale.txt"));
  CHECK(fs::exists(tmp.path / "out" / "events.csv"));
}

TEST_CASE("staged directory is discarded without commit") {
  TempDir tmp;
  fs::path staged;
  {
    StagedDir d(tmp.path / "x/");
    staged = d.path();
    CHECK(fs::is_directory(staged));
    CHECK(d.final_path() == tmp.path / "x");
    std::ofstream(staged / "a.csv") << "1";
  }
  CHECK_FALSE(fs::exists(staged));
  CHECK_FALSE(fs::exists(tmp.path / "x"));
}

TEST_CASE("a numerical failure mid-run leaves no partial output") {
  TempDir tmp;
  auto s = parse_scenario(circle_json());
  s.controls.cfl = 1e6;
  s.controls.max_halvings = 0;
  CHECK_THROWS_AS(run_scenario(s, tmp.path / "out"), Error);
  CHECK_FALSE(fs::exists(tmp.path / "out"));
  CHECK(staging_leftovers(tmp.path) == 0);
}

TEST_CASE("cli: malformed scenario exits 2 and writes nothing") {
  TempDir tmp;
  auto j = circle_json();
  j["controls"]["cfll"] = 0.2;
  std::ofstream(tmp.path / "bad.json") << j.dump();
  CHECK(sh(kCli + " --out " + (tmp.path / "out").string() + " run " + (tmp.path / "bad.json").string()) == 2);
  CHECK_FALSE(fs::exists(tmp.path / "out"));
  CHECK(staging_leftovers(tmp.path) == 0);

  CHECK(sh(kCli + " run --no-such-flag x.json") == 2);
  CHECK(sh(kCli + " kappa --curve " + (tmp.path / "missing.csv").string() + " --r 0.2") == 2);
}

TEST_CASE("cli: several scenarios with --jobs land in separate directories") {
  TempDir tmp;
  auto a = circle_json(), b = circle_json();
  b["shape"]["R"] = 0.25;
  std::ofstream(tmp.path / "a.json") << a.dump();
  std::ofstream(tmp.path / "b.json") << b.dump();
  fs::path out = tmp.path / "out";
  REQUIRE(sh(kCli + " --quiet --jobs 2 --out " + out.string() + " run " + (tmp.path / "a.json").string() +
             " " + (tmp.path / "b.json").string()) == 0);
  CHECK(fs::exists(out / "a" / "report.json"));
  CHECK(fs::exists(out / "b" / "report.json"));

  // matches a sequential library run
  auto rep = run_scenario(parse_scenario(a), tmp.path / "seq");
  for (const auto& f : rep.files)
    if (fs::path(f).extension() == ".csv") CHECK(slurp(out / "a" / f) == slurp(tmp.path / "seq" / f));
}

TEST_CASE("cli: make-shape, kappa and verify-barrier") {
  TempDir tmp;
  fs::path c = tmp.path / "c.csv";
  REQUIRE(sh(kCli + " --quiet make-shape --kind circle --params R=0.5 --n 200 --out " + c.string()) == 0);
  auto v = read_curve_csv(c);
  REQUIRE(v.size() == 200);
  CHECK(std::hypot(v[37].x, v[37].y) == doctest::Approx(0.5).epsilon(1e-14));

  // both balls fit on a pudgy circle: kappa_r = kappa = 1/R
  std::istringstream k(capture(kCli + " kappa --curve " + c.string() + " --r 0.2"));
  std::string line;
  std::getline(k, line);
  CHECK(line == "index,x,y,kappa,ext_fits,int_fits,kappa_r_plus,kappa_r_minus,kappa_r");
  int rows = 0;
  while (std::getline(k, line)) {
    ++rows;
    double kr = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(kr == doctest::Approx(2.0).epsilon(1e-9));
  }
  CHECK(rows == 200);

  REQUIRE(sh(kCli + " --out " + (tmp.path / "k").string() + " kappa --curve " + c.string() +
             " --r 0.2 --f-delta 0.1") == 0);
  std::ifstream kf(tmp.path / "k" / "kappa.csv");
  std::getline(kf, line);
  CHECK(line.substr(line.rfind(',') + 1) == "kappa_f");

  auto g = capture(kCli + " verify-barrier g --r 0.01");
  CHECK(std::count(g.begin(), g.end(), '\n') == 1);
  CHECK(g.substr(g.rfind(',') + 1) == "true\n");
  double min_k = std::stod(g.substr(0, g.find(',')));
  CHECK(min_k >= 0.25 / 0.01);

  CHECK(sh(kCli + " verify-barrier h --r 0.01") == 2);
  CHECK(sh(kCli + " make-shape --kind circle --params R=-1 --n 20 --out " + c.string()) == 2);
}

TEST_CASE("cli: wave writes its report") {
  TempDir tmp;
  fs::path out = tmp.path / "w";
  REQUIRE(sh(kCli + " --quiet --out " + out.string() + " wave --r 2") == 0);
  auto j = json::parse(slurp(out / "wave_report.json"));
  for (const char* key : {"r", "ell", "x_r", "x_tilde_r", "slope_at_xr", "c11_jump", "max_branch_curvature",
                          "vb1_residual", "translation_speed"})
    CHECK(j.contains(key));
  CHECK(j["ell"].get<double>() == doctest::Approx(std::sqrt(15.0)).epsilon(1e-12));
  CHECK(fs::exists(out / "phi.csv"));
  CHECK(fs::exists(out / "hstar.csv"));

  CHECK(sh(kCli + " --out " + (tmp.path / "w2").string() + " wave --r 0.5") == 2);
  CHECK_FALSE(fs::exists(tmp.path / "w2"));
}

TEST_CASE("cli: reproduce runs one group and honours injected faults") {
  auto ok = capture(kCli + " --quiet reproduce --only curvature");
  CHECK(ok.find("PASS  3") != std::string::npos);
  CHECK(ok.find("PASS 12") != std::string::npos);
  CHECK(ok.find("2/2 criteria passed") != std::string::npos);

  CHECK(sh(kCli + " --quiet reproduce --only curvature --inject-fault kappa-f-delta") == 1);
  auto bad = capture(kCli + " --quiet reproduce --only curvature --inject-fault kappa-f-delta");
  CHECK(bad.find("FAIL 12") != std::string::npos);
  CHECK(bad.find("PASS  3") != std::string::npos);

  CHECK(sh(kCli + " reproduce --only nothing") == 2);
}

TEST_CASE("bundled thin dumbbell scenario pinches") {
  TempDir tmp;
  auto rep = run_scenario(kScenarios / "th1_thin_dumbbell.json", tmp.path / "out");
  CHECK(rep.has(EventKind::Pinch));
  // the neck unzips into slivers that vanish; both lobes survive
  CHECK(rep.components == 2);
  REQUIRE(rep.min_clearance);
  CHECK_FALSE(rep.first_violation);
}
