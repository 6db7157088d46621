#pragma once

#include <string>
#include <vector>

namespace rflow {

struct CriterionResult {
  int id = 0;
  std::string group;  // flow, curvature, barrier, neckpinch, convexity, wave
  std::string title;
  bool pass = false;
  std::string measured;
  std::string expected;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string only;          // empty runs every group
  std::string inject_fault;  // negative control, see acceptance_faults()
  int jobs = 1;
  bool progress = false;     // one stderr line per finished criterion
};

std::vector<std::string> acceptance_groups();
std::vector<std::string> acceptance_faults();

// Results come back ordered by criterion id.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o);

std::string format_result(const CriterionResult& r);
std::string format_table(const std::vector<CriterionResult>& rs);

}  // namespace rflow
