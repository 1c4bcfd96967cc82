#pragma once

// Numerical equilibrium search on payoff tensors: multiplicative-weights
// descent for symmetric equilibria and smoothed best-response dynamics for
// ensembles of asymmetric starting points. Every converged result is
// certified by an independently coded regret evaluator.

#include <cstdint>
#include <vector>

#include "pools/exec.hpp"
#include "pools/game.hpp"

namespace pools::solver {

using game::MixedStrategy;

inline constexpr long long kDefaultMaxIters = 100000;

// Best-response dynamics anneal the softmax temperature as 1/k down to a
// floor of 1e-6, which the schedule reaches at k = 1e6; the cap must allow
// that so interior-equilibrium runs can settle below their residual regret.
inline constexpr long long kDefaultDynamicsIters = 1000000;

struct EquilibriumResult {
  std::vector<MixedStrategy> profile;  // one strategy per agent
  double regret = 0.0;                 // certified max unilateral gain
  bool converged = false;
  bool symmetric = false;  // all strategies equal within 1e-9
  long long iterations = 0;
  std::uint64_t seed = 0;
};

// Expected payoff of each unilateral pure move against n-1 opponents who all
// play s.
std::vector<double> symmetric_deviation_payoffs(const MixedStrategy& s,
                                                const game::PayoffTensor& tensor);

// Max over processes of (deviation payoff - profile value) at the symmetric
// profile. The profile value itself is computed and required to vanish, as
// it must in a zero-sum pool.
double symmetric_regret(const MixedStrategy& s, const game::PayoffTensor& tensor);

// Joint regret of a mixed profile: max over agents of the best unilateral
// improvement. The _direct variant enumerates opponent pure tuples and
// exists to cross-check the dynamic-programming path.
double profile_regret(const std::vector<MixedStrategy>& profile,
                      const game::PayoffTensor& tensor);
double profile_regret_direct(const std::vector<MixedStrategy>& profile,
                             const game::PayoffTensor& tensor);

struct SymmetricSearchResult {
  std::vector<EquilibriumResult> equilibria;  // deduplicated converged results
  int starts = 0;
  int converged = 0;
  long long total_iterations = 0;
};

// Multiplicative-weights search for symmetric equilibria from `starts`
// Dirichlet-random starting strategies. Step sizes are normalized by the
// tensor's payoff scale, so rescaling payoffs does not change the iterates.
SymmetricSearchResult find_symmetric_equilibrium(const game::PayoffTensor& tensor, int starts,
                                                 std::uint64_t seed, double tol = 1e-8,
                                                 long long max_iters = kDefaultMaxIters,
                                                 Exec exec = Exec::Parallel);

// Smoothed best-response dynamics from a random asymmetric profile: each
// agent plays the softmax response to the running average of its past
// deviation payoffs, so the effective temperature decreases as 1/k down to
// a floor of 1e-6. A non-converged result is returned with converged =
// false rather than thrown; ensembles exclude such runs.
EquilibriumResult best_response_dynamics(const game::PayoffTensor& tensor, std::uint64_t seed,
                                         double tol = 1e-5,
                                         long long max_iters = kDefaultDynamicsIters);

struct DiversificationMetric {
  std::vector<double> avg_probs;  // average over converged runs and agents
  int t = 0;                      // requested runs
  int converged_runs = 0;
  std::vector<std::vector<double>> per_run;  // converged runs only, run order
  std::vector<double> dispersion;            // per-process std dev across runs
};

// Ensemble of best_response_dynamics runs with derived per-run seeds.
// Throws NonConvergenceError when more than 20% of runs fail.
DiversificationMetric diversification_metric(const game::PayoffTensor& tensor, int t,
                                             std::uint64_t seed, Exec exec = Exec::Parallel,
                                             double tol = 1e-5,
                                             long long max_iters = kDefaultDynamicsIters);

}  // namespace pools::solver
