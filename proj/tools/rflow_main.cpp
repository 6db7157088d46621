#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "rflow/acceptance.hpp"
#include "rflow/error.hpp"
#include "rflow/io.hpp"
#include "rflow/r_curvature.hpp"
#include "rflow/scenario.hpp"
#include "rflow/traveling_wave.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rflow;

namespace {

struct Globals {
  std::string out;
  int jobs = 1;
  bool quiet = false;
};

void bad_input(const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); }

int cmd_run(const Globals& g, const std::vector<std::string>& files, bool svg) {
  fs::path root = g.out.empty() ? fs::path("out") : fs::path(g.out);
  std::vector<std::pair<Scenario, fs::path>> jobs;
  std::map<std::string, std::string> stems;
  for (const auto& f : files) {
    Scenario s = load_scenario(f);  // validate everything before running anything
    fs::path dir = root;
    if (files.size() > 1) {
      auto [it, fresh] = stems.emplace(s.name, f);
      if (!fresh) bad_input("scenarios " + it->second + " and " + f + " share an output name");
      dir = root / s.name;
    }
    jobs.emplace_back(std::move(s), dir);
  }

  ScenarioOutput o{svg, g.quiet || g.jobs > 1};
  std::vector<std::exception_ptr> errs(jobs.size());
  std::vector<RunReport> reps(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      try {
        reps[k] = run_scenario(jobs[k].first, jobs[k].second, o);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min<int>(g.jobs, static_cast<int>(jobs.size())); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (errs[k]) std::rethrow_exception(errs[k]);
    if (!g.quiet) {
      std::cout << jobs[k].first.name << ": " << reps[k].events.size() << " events, t=" << reps[k].final_time
                << ", " << reps[k].components << " components -> " << jobs[k].second.string() << "\n";
    }
  }
  return 0;
}

int cmd_kappa(const Globals& g, const std::string& curve_file, double r, long sigma_idx, double f_delta) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidR, "r must be positive");
  PlanarCurve c(read_curve_csv(curve_file));
  std::ostringstream s;
  if (sigma_idx >= 0) {
    if (static_cast<std::size_t>(sigma_idx) >= c.size())
      throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(sigma_idx));
    auto prof = f_delta > 0 ? kappa_sigma_profile(c, sigma_idx, SmoothingSpec{r, f_delta, 64})
                            : kappa_sigma_profile(c, sigma_idx, r, 64);
    s << "sigma,weight,ext_fits,int_fits,kappa_sigma_plus,kappa_sigma_minus\n";
    for (const auto& p : prof)
      s << format_double(p.sigma) << ',' << format_double(p.weight) << ',' << p.ext_fits << ','
        << p.int_fits << ',' << format_double(p.plus) << ',' << format_double(p.minus) << '\n';
  }

  auto k = kappa_r(c, r);
  std::vector<double> kf;
  if (f_delta > 0)
    for (std::size_t i = 0; i < c.size(); ++i) kf.push_back(kappa_f(c, i, SmoothingSpec{r, f_delta, 64}).value);

  if (g.out.empty()) {
    if (sigma_idx >= 0)
      std::cout << s.str();
    else
      write_kappa_csv(std::cout, c, k, kf);
    return 0;
  }
  StagedDir dir(g.out);
  write_kappa_csv(dir.path() / "kappa.csv", c, k, kf);
  if (sigma_idx >= 0) {
    std::ofstream f(dir.path() / ("sigma_profile_" + std::to_string(sigma_idx) + ".csv"));
    f << s.str();
  }
  dir.commit();
  return 0;
}

// values are numbers, except `path` for file shapes
json parse_params(const std::vector<std::string>& kv) {
  json j = json::object();
  for (const auto& item : kv) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) bad_input("--params expects key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "path") {
      j[key] = val;
      continue;
    }
    if (key == "center") {
      auto comma = val.find(',');
      if (comma == std::string::npos) bad_input("center expects x,y");
      j[key] = {std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1))};
      continue;
    }
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size()) bad_input("--params " + key + ": not a number '" + val + "'");
    if (d == std::floor(d) && std::abs(d) < 1e15 && val.find_first_of(".eE") == std::string::npos)
      j[key] = static_cast<std::int64_t>(d);
    else
      j[key] = d;
  }
  return j;
}

int cmd_make_shape(const Globals& g, const std::string& kind, const std::vector<std::string>& params,
                   long n, double r) {
  if (g.out.empty()) bad_input("make-shape needs --out FILE.csv");
  json j = parse_params(params);
  j["kind"] = kind;
  if (n > 0) j["n"] = n;
  Scenario s;
  s.r = r;
  s.shape = parse_shape(j, r);
  auto fam = initial_family(s);
  fs::path out = g.out;
  fs::path tmp = out;
  tmp += ".tmp";
  write_curve_csv(tmp, fam[0].vertices());
  fs::rename(tmp, out);
  if (!g.quiet) std::cerr << fam[0].size() << " vertices -> " << out.string() << "\n";
  return 0;
}

int cmd_verify_barrier(const std::string& which, double r, double eta, int samples, double M,
                       bool calibrate) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidR, "r must be positive");
  double min_k, bound;
  bool pass;
  if (which == "g") {
    auto c = verify_barrier_G(r, eta > 0 ? eta : r / (128 * M_PI * M_PI), samples);
    min_k = c.min_kappa_r;
    bound = c.bound;
    pass = c.pass;
  } else {
    if (calibrate || !(M > 0)) M = calibrate_M(r, {50.0, 100.0, 200.0}, samples);
    auto c = calibrate_and_verify_barrier_F(r, M, samples);
    min_k = c.c0_observed;
    bound = 0.0;
    pass = c.pass;
  }
  std::cout << format_double(min_k) << ',' << format_double(bound) << ',' << (pass ? "true" : "false") << "\n";
  return pass ? 0 : 1;
}

int cmd_wave(const Globals& g, double r, double x_max) {
  if (g.out.empty()) bad_input("wave needs --out DIR");
  auto w = build_h_star(r, x_max);
  auto rep = measure_wave(w);
  auto tr = graph_flow_translation_test(w, default_translation_window(w), 0.2);

  StagedDir dir(g.out);
  {
    std::ofstream f(dir.path() / "phi.csv");
    f << "x,phi\n";
    const auto& s = w.phi;
    std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
    for (std::size_t i = 0; i < s.x.size(); i += stride)
      f << format_double(s.x[i]) << ',' << format_double(s.phi[i]) << '\n';
  }
  {
    std::ofstream f(dir.path() / "hstar.csv");
    f << "x,h\n";
    double a = w.half_domain();
    const int n = 4000;
    for (int k = 0; k < n; ++k) {
      double x = -a + 2 * a * (k + 0.5) / n;
      f << format_double(x) << ',' << format_double(w.h_star(x)) << '\n';
    }
  }
  json j = {{"r", w.r},
            {"ell", w.ell},
            {"x_r", w.x_r},
            {"x_tilde_r", w.x_tilde_r},
            {"slope_at_xr", w.h0_prime_at_xr},
            {"c11_jump", rep.c11_jump},
            {"max_branch_curvature", rep.max_branch_curvature},
            {"vb1_residual", rep.vb1_residual},
            {"translation_speed", tr.speed}};
  std::ofstream(dir.path() / "wave_report.json") << j.dump(2) << "\n";
  dir.commit();
  if (!g.quiet) std::cout << j.dump() << "\n";
  return 0;
}

int cmd_reproduce(const Globals& g, const std::string& only, const std::string& fault) {
  AcceptanceOptions o;
  o.only = only;
  o.inject_fault = fault;
  o.jobs = g.jobs;
  o.progress = !g.quiet;
  auto rs = run_acceptance(o);
  std::cout << format_table(rs);
  for (const auto& r : rs)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar nonlocal r-curvature flow"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "output directory (file for make-shape)");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  auto* run = app.add_subcommand("run", "run scenario files")->fallthrough();
  std::vector<std::string> scenario_files;
  bool svg = false;
  run->add_option("scenarios", scenario_files)->required();
  run->add_flag("--svg", svg, "also write svg snapshots");

  auto* kappa = app.add_subcommand("kappa", "r-curvature of a curve file")->fallthrough();
  std::string curve_file;
  double kr = 0, f_delta = 0;
  long sigma_idx = -1;
  kappa->add_option("--curve", curve_file)->required();
  kappa->add_option("--r", kr)->required();
  kappa->add_option("--sigma-profile", sigma_idx, "vertex whose sigma profile is printed");
  kappa->add_option("--f-delta", f_delta, "adds a smoothed kappa_f column");

  auto* shape = app.add_subcommand("make-shape", "discretize an analytic set")->fallthrough();
  std::string kind;
  std::vector<std::string> params;
  long n = 0;
  double sr = 0.01;
  shape->add_option("--kind", kind)->required();
  shape->add_option("--params", params, "key=value ...");
  shape->add_option("--n", n);
  shape->add_option("--r", sr, "r for the r-dependent kinds");

  auto* barrier = app.add_subcommand("verify-barrier", "check a barrier lower bound")->fallthrough();
  std::string which;
  double br = 0, eta = 0, M = 0;
  int samples = 2000;
  bool calibrate = false;
  barrier->add_option("which", which)->required()->check(CLI::IsMember({"g", "f"}));
  barrier->add_option("--r", br)->required();
  barrier->add_option("--eta", eta);
  barrier->add_option("--samples", samples)->check(CLI::PositiveNumber);
  barrier->add_option("--M", M);
  barrier->add_flag("--calibrate", calibrate);

  auto* wave = app.add_subcommand("wave", "traveling wave pipeline")->fallthrough();
  double wr = 0, x_max = 0;
  wave->add_option("--r", wr)->required();
  wave->add_option("--x-max", x_max);

  auto* repro = app.add_subcommand("reproduce", "run the acceptance criteria")->fallthrough();
  std::string only, fault;
  repro->add_option("--only", only)->check(CLI::IsMember(acceptance_groups()));
  repro->add_option("--inject-fault", fault)->check(CLI::IsMember(acceptance_faults()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(g, scenario_files, svg);
    if (*kappa) return cmd_kappa(g, curve_file, kr, sigma_idx, f_delta);
    if (*shape) return cmd_make_shape(g, kind, params, n, sr);
    if (*barrier) return cmd_verify_barrier(which, br, eta, samples, M, calibrate);
    if (*wave) return cmd_wave(g, wr, x_max);
    if (*repro) return cmd_reproduce(g, only, fault);
  } catch (const Error& e) {
    std::cerr << "rflow: " << e.what() << "\n";
    return is_numerical(e.kind()) ? 3 : 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "rflow: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rflow: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
