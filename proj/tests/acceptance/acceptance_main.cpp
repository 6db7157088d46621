#include <iostream>
#include <thread>

#include "rflow/acceptance.hpp"

// Runs every acceptance criterion, or one group when named on the command line.
int main(int argc, char** argv) {
  rflow::AcceptanceOptions o;
  if (argc > 1) o.only = argv[1];
  unsigned hw = std::thread::hardware_concurrency();
  o.jobs = static_cast<int>(hw ? std::min(hw, 4u) : 1u);
  auto rs = rflow::run_acceptance(o);
  std::cout << rflow::format_table(rs);
  for (const auto& r : rs)
    if (!r.pass) return 1;
  return 0;
}
