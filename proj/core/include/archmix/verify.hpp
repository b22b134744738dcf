#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "archmix/innovation.hpp"

namespace archmix {

struct VerifyCheck {
  std::string check;
  long instances = 0;
  double max_rel_err = 0.0;
  bool pass = false;
};

// Identity suites behind `archmix verify`: each row is one named identity,
// the worst relative error seen over its instances, and a pass flag.
std::vector<VerifyCheck> verify_volterra(std::uint64_t seed);
std::vector<VerifyCheck> verify_minimize_eta(std::uint64_t seed);
std::vector<VerifyCheck> verify_density(const std::string& innovation_filter /* empty = all */);

struct DensityGridRow {
  std::string innovation;
  double A = 0.0, B = 0.0, tv = 0.0, bound = 0.0, ratio = 0.0;
};

// The Lemma-A.4 grid {0.5,1,2} x {0,0.1,1,10} evaluated for one innovation.
std::vector<DensityGridRow> density_tv_grid(const InnovationModel& innovation);

}  // namespace archmix
