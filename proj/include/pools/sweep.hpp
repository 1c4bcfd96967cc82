#pragma once

// Parameterized sweeps over pool sizes and process menus. Rates follow a
// geometric profile lambda_j = k^(j-1) + offset, so k < 1 yields a strictly
// ordered menu of favorites and longshots and the offset tunes how lopsided
// the menu is.

#include <cstdint>
#include <ostream>
#include <vector>

#include "pools/exec.hpp"
#include "pools/game.hpp"
#include "pools/solver.hpp"

namespace pools::sweep {

struct SweepConfig {
  std::vector<int> n_list;
  std::vector<int> m_list;
  double k = 0.95;
  double offset = 0.0;
  int t = 100;                 // dynamics runs per grid point
  std::uint64_t seed = 1;
  long long samples = 0;       // 0: exact tensors; otherwise Monte Carlo
  std::size_t max_entries = game::kDefaultMaxEntries;
};

struct SweepRow {
  int n = 0;
  int m = 0;
  int process = 0;  // 1-based in outputs
  double avg_prob = 0.0;
  double stddev = 0.0;
};

// Geometric-profile rates for a menu of m processes; throws when a rate
// would not be positive.
std::vector<double> sweep_rates(double k, double offset, int m);

std::vector<SweepRow> run_sweep(const SweepConfig& config, Exec exec = Exec::Parallel);

void write_sweep_csv(std::ostream& os, const SweepConfig& config,
                     const std::vector<SweepRow>& rows);

}  // namespace pools::sweep
