#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "archmix/innovation.hpp"
#include "archmix/process.hpp"
#include "archmix/rng.hpp"

namespace archmix::testutil {

inline double rel_err(double got, double want) {
  const double scale = std::max({std::abs(got), std::abs(want), 1e-300});
  return std::abs(got - want) / scale;
}

// The innovation draws of replicate r in simulation order, replayed from the
// public seeding contract; lets tests pair simulated paths with their z's.
inline std::vector<double> replay_innovations(const InnovationModel& innovation,
                                              std::uint64_t master_seed, int replicate,
                                              long count) {
  SplitMix64 rng = replicate_stream(master_seed, static_cast<std::uint64_t>(replicate));
  std::vector<double> z(static_cast<std::size_t>(count));
  for (auto& v : z) v = innovation.sample(rng);
  return z;
}

inline TvArchSpec arch1_tvarch(double a0 = 0.1, double a1 = 0.5, double delta = 0.5) {
  TvArchSpec spec;
  spec.p = 1;
  spec.intercept = Schedule::constant(a0);
  spec.coeffs.push_back(Schedule::constant(a1));
  spec.delta = delta;
  return spec;
}

inline ArchInfSpec arch1_archinf(double a0 = 0.1, double a1 = 0.5, double delta = 0.4) {
  ArchInfSpec spec;
  spec.a0 = a0;
  spec.coeffs = ArchInfCoeffs::finite({a1});
  spec.delta = delta;
  spec.nu = 1.0;
  return spec;
}

// iid ensemble of unit exponentials, for independence baselines
inline PathEnsemble iid_exponential_ensemble(long n_per_rep, int replicates,
                                             std::uint64_t seed) {
  const InnovationModel inn = InnovationModel::exponential_unit_mean();
  PathEnsemble ens;
  ens.spec_id = "iid";
  ens.master_seed = seed;
  ens.replicate_count = replicates;
  ens.t_lo = 0;
  for (int r = 0; r < replicates; ++r) {
    SplitMix64 rng = replicate_stream(seed, static_cast<std::uint64_t>(r));
    std::vector<double> path(static_cast<std::size_t>(n_per_rep));
    for (auto& v : path) v = inn.sample(rng);
    ens.paths.push_back(std::move(path));
  }
  return ens;
}

}  // namespace archmix::testutil
