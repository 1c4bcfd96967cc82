#pragma once

// The winners-take-all pool: n agents each stake one unit on a process, a
// random ordered ranking of the processes is drawn, and the pot is split
// among the agents whose pick lands in the best-ranked block that any agent
// picked. Payoff tensors exploit anonymity: agents are interchangeable, so
// expected payoffs are keyed by the count vector of picks rather than by the
// full profile.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pools/dist.hpp"
#include "pools/exec.hpp"
#include "pools/strategy.hpp"

namespace pools::game {

// An outcome ranking: disjoint non-empty blocks covering {0..m-1}, best
// block first. Processes in the same block are tied.
struct OrderedPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<std::uint32_t> block_masks;  // derived from blocks
  int m = 0;

  OrderedPartition(std::vector<std::vector<int>> blocks_in, int m_in);

  // Winners among `chosen`: the chosen processes in the first block that
  // intersects `chosen`. Zero when `chosen` is empty.
  std::uint32_t winning_set(std::uint32_t chosen) const;
};

struct OutcomeDistribution {
  int m = 0;
  std::vector<std::pair<OrderedPartition, double>> support;

  OutcomeDistribution(int m_in, std::vector<std::pair<OrderedPartition, double>> support_in);
};

struct PureProfile {
  std::vector<int> choices;  // one 0-based process per agent

  explicit PureProfile(std::vector<int> c);
  int agents() const { return static_cast<int>(choices.size()); }
};

// Stake-one payoffs under a realized ranking: each winner receives
// n / #winners - 1, every other agent loses the stake. When every agent
// wins, all payoffs are 0.
std::vector<double> realized_payoffs(const PureProfile& profile,
                                     const OrderedPartition& partition);

// Count vectors (k_1..k_m) summing to `total`, in lexicographic order.
std::vector<std::vector<int>> enumerate_count_vectors(int total, int m);

// Position of `counts` within enumerate_count_vectors(sum(counts), size(counts)).
std::size_t count_vector_rank(std::span<const int> counts);

inline constexpr std::size_t kDefaultMaxEntries = 100000;

// Expected payoffs for every anonymous pure profile of n agents over m
// processes. entries is lexicographic in counts; payoffs[j] is the expected
// payoff of an agent picking j (NaN when counts[j] == 0). stderrs is empty
// for exact tensors and holds per-choice standard errors for Monte Carlo.
struct PayoffTensor {
  struct Entry {
    std::vector<int> counts;
    std::vector<double> payoffs;
    std::vector<double> stderrs;
  };

  int n = 0;
  int m = 0;
  std::vector<Entry> entries;

  std::size_t index_of(std::span<const int> counts) const;
  double payoff(std::span<const int> counts, int j) const;
  double max_abs_payoff() const;
  bool has_stderr() const { return !entries.empty() && !entries.front().stderrs.empty(); }
};

// Distribution of the ranking induced by independent Poisson counts: level
// sets of the counts, ordered by descending count. Exact enumeration is
// limited to m <= 6 (ordered-partition growth); use mc_payoff_tensor beyond.
OutcomeDistribution induced_outcome_distribution(const dist::Rates& rates,
                                                 double tol = dist::kDefaultTol);

PayoffTensor exact_payoff_tensor(int n, const OutcomeDistribution& outcome,
                                 Exec exec = Exec::Parallel,
                                 std::size_t max_entries = kDefaultMaxEntries);

// Monte Carlo tensor with common random numbers: one shared pool of count
// draws is applied to every entry, so sampling noise cancels in comparisons
// across entries. Bit-reproducible for a given seed under either Exec.
PayoffTensor mc_payoff_tensor(int n, const dist::Rates& rates, long long samples,
                              std::uint64_t seed, Exec exec = Exec::Parallel,
                              std::size_t max_entries = kDefaultMaxEntries);

// Probability of each opponent count vector (aligned with
// enumerate_count_vectors(strategies.size(), m)) when the given agents mix
// independently.
std::vector<double> count_vector_distribution(const std::vector<MixedStrategy>& strategies,
                                              int m);

// Expected payoff of `agent` when everyone mixes independently.
double expected_payoff(const std::vector<MixedStrategy>& profile,
                       const PayoffTensor& tensor, int agent);

}  // namespace pools::game
