#include "pools/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pools/errors.hpp"
#include "pools/rng.hpp"

namespace pools::game {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-8)
    throw std::invalid_argument("tolerance must lie in (0, 1e-8]");
}

// Exact small binomial coefficient; every intermediate division is exact.
unsigned long long binom(unsigned long long a, unsigned long long b) {
  if (b > a) return 0;
  if (b > a - b) b = a - b;
  unsigned long long r = 1;
  for (unsigned long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Number of count vectors with p parts summing to r.
unsigned long long compositions(unsigned long long r, unsigned long long p) {
  return binom(r + p - 1, p - 1);
}

}  // namespace

std::size_t count_vector_rank(std::span<const int> counts) {
  const int m = static_cast<int>(counts.size());
  int rem = 0;
  for (int v : counts) rem += v;
  std::size_t rank = 0;
  for (int j = 0; j + 1 < m; ++j) {
    for (int v = 0; v < counts[static_cast<std::size_t>(j)]; ++v)
      rank += compositions(static_cast<unsigned long long>(rem - v),
                           static_cast<unsigned long long>(m - 1 - j));
    rem -= counts[static_cast<std::size_t>(j)];
  }
  return rank;
}

namespace {

std::uint32_t chosen_mask(std::span<const int> counts) {
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (counts[j] > 0) mask |= 1u << j;
  return mask;
}

void check_counts(std::span<const int> counts, int n, int m) {
  if (static_cast<int>(counts.size()) != m)
    throw std::invalid_argument("count vector has wrong length");
  int total = 0;
  for (int v : counts) {
    if (v < 0) throw std::invalid_argument("count vector has a negative entry");
    total += v;
  }
  if (total != n) throw std::invalid_argument("count vector does not sum to the agent count");
}

}  // namespace

OrderedPartition::OrderedPartition(std::vector<std::vector<int>> blocks_in, int m_in)
    : blocks(std::move(blocks_in)), m(m_in) {
  if (m < 1) throw std::invalid_argument("OrderedPartition: m must be at least 1");
  if (m > 31) throw std::invalid_argument("OrderedPartition: m must be at most 31");
  if (blocks.empty()) throw std::invalid_argument("OrderedPartition: no blocks");
  std::uint32_t seen = 0;
  block_masks.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("OrderedPartition: empty block");
    std::uint32_t mask = 0;
    for (int i : b) {
      if (i < 0 || i >= m) throw std::invalid_argument("OrderedPartition: process out of range");
      const std::uint32_t bit = 1u << i;
      if ((seen | mask) & bit)
        throw std::invalid_argument("OrderedPartition: process appears twice");
      mask |= bit;
    }
    seen |= mask;
    block_masks.push_back(mask);
  }
  if (seen != (1u << m) - 1u)
    throw std::invalid_argument("OrderedPartition: blocks do not cover every process");
}

std::uint32_t OrderedPartition::winning_set(std::uint32_t chosen) const {
  for (std::uint32_t bm : block_masks) {
    const std::uint32_t hit = bm & chosen;
    if (hit) return hit;
  }
  return 0;
}

OutcomeDistribution::OutcomeDistribution(
    int m_in, std::vector<std::pair<OrderedPartition, double>> support_in)
    : m(m_in), support(std::move(support_in)) {
  if (m < 2) throw std::invalid_argument("OutcomeDistribution: need at least 2 processes");
  if (support.empty()) throw std::invalid_argument("OutcomeDistribution: empty support");
  double total = 0.0;
  for (const auto& [part, w] : support) {
    if (part.m != m) throw std::invalid_argument("OutcomeDistribution: partition over wrong m");
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("OutcomeDistribution: weights must be positive");
    total += w;
  }
  // Truncated exact constructions may leave a sub-tolerance deficit; a
  // surplus beyond rounding noise is always an error.
  if (total > 1.0 + 1e-12 || total < 1.0 - 1e-7)
    throw std::invalid_argument("OutcomeDistribution: weights sum to " + std::to_string(total));
}

PureProfile::PureProfile(std::vector<int> c) : choices(std::move(c)) {
  if (choices.size() < 2) throw std::invalid_argument("PureProfile: need at least 2 agents");
  for (int x : choices)
    if (x < 0) throw std::invalid_argument("PureProfile: negative choice");
}

std::vector<double> realized_payoffs(const PureProfile& profile,
                                     const OrderedPartition& partition) {
  const int n = profile.agents();
  std::uint32_t chosen = 0;
  for (int x : profile.choices) {
    if (x >= partition.m) throw std::invalid_argument("realized_payoffs: choice out of range");
    chosen |= 1u << x;
  }
  const std::uint32_t w = partition.winning_set(chosen);
  int winners = 0;
  for (int x : profile.choices)
    if (w & (1u << x)) ++winners;
  const double share = static_cast<double>(n) / winners - 1.0;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        (w & (1u << profile.choices[static_cast<std::size_t>(i)])) ? share : -1.0;
  return out;
}

std::vector<std::vector<int>> enumerate_count_vectors(int total, int m) {
  if (total < 0 || m < 1) throw std::invalid_argument("enumerate_count_vectors: bad arguments");
  std::vector<std::vector<int>> out;
  out.reserve(compositions(static_cast<unsigned long long>(total),
                           static_cast<unsigned long long>(m)));
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  // Odometer over the first m-1 coordinates; the last absorbs the remainder.
  auto rec = [&](auto&& self, int j, int rem) -> void {
    if (j == m - 1) {
      cur[static_cast<std::size_t>(j)] = rem;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= rem; ++v) {
      cur[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, rem - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

std::size_t PayoffTensor::index_of(std::span<const int> counts) const {
  check_counts(counts, n, m);
  return count_vector_rank(counts);
}

double PayoffTensor::payoff(std::span<const int> counts, int j) const {
  if (j < 0 || j >= m) throw std::invalid_argument("PayoffTensor: process out of range");
  return entries[index_of(counts)].payoffs[static_cast<std::size_t>(j)];
}

double PayoffTensor::max_abs_payoff() const {
  double best = 0.0;
  for (const auto& e : entries)
    for (double v : e.payoffs)
      if (!std::isnan(v)) best = std::max(best, std::abs(v));
  return best;
}

OutcomeDistribution induced_outcome_distribution(const dist::Rates& rates, double tol) {
  check_tol(tol);
  const int m = rates.size();
  if (m > 6)
    throw CapacityError(
        "induced_outcome_distribution: exact enumeration of ordered partitions "
        "is limited to 6 processes; use mc_payoff_tensor for larger games");

  // Truncation point: the joint CDF of all m counts must cover 1 - tol/2.
  const double half_tol = 0.5 * tol;
  const int hard_cap =
      static_cast<int>(rates.max_rate() + 60.0 * std::sqrt(rates.max_rate()) + 1000.0);
  std::vector<std::vector<double>> pmf(static_cast<std::size_t>(m));
  std::vector<double> cdf(static_cast<std::size_t>(m), 0.0);
  int y_top = 0;
  for (int y = 0; y <= hard_cap; ++y) {
    double joint = 1.0;
    for (int i = 0; i < m; ++i) {
      const double lam = rates[i];
      const double p =
          std::exp(-lam + y * std::log(lam) - std::lgamma(static_cast<double>(y) + 1.0));
      pmf[static_cast<std::size_t>(i)].push_back(p);
      cdf[static_cast<std::size_t>(i)] += p;
      joint *= cdf[static_cast<std::size_t>(i)];
    }
    y_top = y;
    if (1.0 - joint < half_tol) break;
  }
  const int Y = y_top;

  std::vector<std::pair<OrderedPartition, double>> support;
  std::vector<double> g(static_cast<std::size_t>(Y) + 1);
  std::vector<double> cume(static_cast<std::size_t>(Y) + 1);
  std::vector<int> assign(static_cast<std::size_t>(m), 0);

  // Every ordered partition into k blocks is a surjection of processes onto
  // block slots 0..k-1; the weight is the probability that the per-block
  // count levels come out strictly decreasing along the block order.
  for (int k = 1; k <= m; ++k) {
    std::fill(assign.begin(), assign.end(), 0);
    while (true) {
      std::uint32_t used = 0;
      for (int i = 0; i < m; ++i) used |= 1u << assign[static_cast<std::size_t>(i)];
      if (used == (1u << k) - 1u) {
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
        for (int i = 0; i < m; ++i)
          blocks[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(i);

        // Sweep blocks from worst to best. cume[y] carries the probability
        // that the already-processed suffix realizes its ranking with top
        // level at most y; multiplying by the next block's level pmf at y+1
        // or more enforces strict descent.
        for (int l = k - 1; l >= 0; --l) {
          for (int y = 0; y <= Y; ++y) {
            double w = 1.0;
            for (int i : blocks[static_cast<std::size_t>(l)])
              w *= pmf[static_cast<std::size_t>(i)][static_cast<std::size_t>(y)];
            const double below =
                (l == k - 1) ? 1.0 : (y >= 1 ? cume[static_cast<std::size_t>(y) - 1] : 0.0);
            g[static_cast<std::size_t>(y)] = w * below;
          }
          double run = 0.0;
          for (int y = 0; y <= Y; ++y) {
            run += g[static_cast<std::size_t>(y)];
            cume[static_cast<std::size_t>(y)] = run;
          }
        }
        const double weight = cume[static_cast<std::size_t>(Y)];
        if (weight > 0.0) support.emplace_back(OrderedPartition(std::move(blocks), m), weight);
      }
      // Next assignment in odometer order.
      int pos = m - 1;
      while (pos >= 0 && assign[static_cast<std::size_t>(pos)] == k - 1) {
        assign[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++assign[static_cast<std::size_t>(pos)];
    }
  }
  return OutcomeDistribution(m, std::move(support));
}

PayoffTensor exact_payoff_tensor(int n, const OutcomeDistribution& outcome, Exec exec,
                                 std::size_t max_entries) {
  if (n < 2) throw std::invalid_argument("exact_payoff_tensor: need at least 2 agents");
  const int m = outcome.m;
  const unsigned long long entry_count = compositions(static_cast<unsigned long long>(n),
                                                      static_cast<unsigned long long>(m));
  if (entry_count > max_entries)
    throw CapacityError("exact_payoff_tensor: " + std::to_string(entry_count) +
                        " entries exceed the budget of " + std::to_string(max_entries));

  PayoffTensor tensor;
  tensor.n = n;
  tensor.m = m;
  auto vectors = enumerate_count_vectors(n, m);
  tensor.entries.resize(vectors.size());

  // Winner lookup per (chosen mask, support index), built once up front so
  // the entry loop stays read-only. Skipped when 2^m would dwarf the tensor.
  const std::size_t support_size = outcome.support.size();
  const bool cache_winners = m <= 12;
  std::vector<std::uint32_t> winners;
  if (cache_winners) {
    winners.assign(static_cast<std::size_t>(1u << m) * support_size, 0);
    for (std::uint32_t c = 1; c < (1u << m); ++c)
      for (std::size_t p = 0; p < support_size; ++p)
        winners[static_cast<std::size_t>(c) * support_size + p] =
            outcome.support[p].first.winning_set(c);
  }

  const auto num_entries = static_cast<std::int64_t>(vectors.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (std::int64_t e = 0; e < num_entries; ++e) {
    const auto& counts = vectors[static_cast<std::size_t>(e)];
    const std::uint32_t chosen = chosen_mask(counts);
    auto& entry = tensor.entries[static_cast<std::size_t>(e)];
    entry.counts = counts;
    entry.payoffs.assign(static_cast<std::size_t>(m), kNaN);
    for (int j = 0; j < m; ++j)
      if (chosen & (1u << j)) entry.payoffs[static_cast<std::size_t>(j)] = 0.0;
    for (std::size_t p = 0; p < support_size; ++p) {
      const double weight = outcome.support[p].second;
      const std::uint32_t w =
          cache_winners ? winners[static_cast<std::size_t>(chosen) * support_size + p]
                        : outcome.support[p].first.winning_set(chosen);
      int shares = 0;
      for (int j = 0; j < m; ++j)
        if (w & (1u << j)) shares += counts[static_cast<std::size_t>(j)];
      const double win_payoff = static_cast<double>(n) / shares - 1.0;
      for (int j = 0; j < m; ++j) {
        if (!(chosen & (1u << j))) continue;
        entry.payoffs[static_cast<std::size_t>(j)] +=
            weight * ((w & (1u << j)) ? win_payoff : -1.0);
      }
    }
  }
  (void)exec;
  return tensor;
}

PayoffTensor mc_payoff_tensor(int n, const dist::Rates& rates, long long samples,
                              std::uint64_t seed, Exec exec, std::size_t max_entries) {
  if (n < 2) throw std::invalid_argument("mc_payoff_tensor: need at least 2 agents");
  if (samples < 10000)
    throw std::invalid_argument("mc_payoff_tensor: need at least 10000 samples");
  const int m = rates.size();
  const unsigned long long entry_count = compositions(static_cast<unsigned long long>(n),
                                                      static_cast<unsigned long long>(m));
  if (entry_count > max_entries)
    throw CapacityError("mc_payoff_tensor: " + std::to_string(entry_count) +
                        " entries exceed the budget of " + std::to_string(max_entries));

  PayoffTensor tensor;
  tensor.n = n;
  tensor.m = m;
  auto vectors = enumerate_count_vectors(n, m);
  const std::size_t E = vectors.size();
  tensor.entries.resize(E);

  std::vector<std::vector<int>> chosen_of(E);
  for (std::size_t e = 0; e < E; ++e) {
    tensor.entries[e].counts = vectors[e];
    for (int j = 0; j < m; ++j)
      if (vectors[e][static_cast<std::size_t>(j)] > 0) chosen_of[e].push_back(j);
  }

  std::vector<double> sum(E * static_cast<std::size_t>(m), 0.0);
  std::vector<double> sumsq(E * static_cast<std::size_t>(m), 0.0);

  // Common random numbers: one pool of count draws shared by every entry.
  // Draws are regenerated per chunk from per-sample streams, and each entry
  // consumes the chunks in sample order, so results do not depend on the
  // thread count.
  constexpr long long kChunk = 1 << 18;
  std::vector<int> draws(static_cast<std::size_t>(std::min(kChunk, samples)) *
                         static_cast<std::size_t>(m));
  const bool parallel = exec == Exec::Parallel;

  for (long long base = 0; base < samples; base += kChunk) {
    const long long len = std::min(kChunk, samples - base);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (long long s = 0; s < len; ++s) {
      rng::Stream stream(seed, static_cast<std::uint64_t>(base + s));
      for (int j = 0; j < m; ++j)
        draws[static_cast<std::size_t>(s) * static_cast<std::size_t>(m) +
              static_cast<std::size_t>(j)] = stream.poisson(rates[j]);
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t e = 0; e < static_cast<std::int64_t>(E); ++e) {
      const auto& counts = vectors[static_cast<std::size_t>(e)];
      const auto& chosen = chosen_of[static_cast<std::size_t>(e)];
      double* sume = sum.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(m);
      double* sqe = sumsq.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(m);
      for (long long s = 0; s < len; ++s) {
        const int* row = draws.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(m);
        int ymax = -1;
        for (int j : chosen) ymax = std::max(ymax, row[j]);
        int shares = 0;
        for (int j : chosen)
          if (row[j] == ymax) shares += counts[static_cast<std::size_t>(j)];
        const double win_payoff = static_cast<double>(n) / shares - 1.0;
        for (int j : chosen) {
          const double v = (row[j] == ymax) ? win_payoff : -1.0;
          sume[j] += v;
          sqe[j] += v * v;
        }
      }
    }
  }

  const double N = static_cast<double>(samples);
  for (std::size_t e = 0; e < E; ++e) {
    auto& entry = tensor.entries[e];
    entry.payoffs.assign(static_cast<std::size_t>(m), kNaN);
    entry.stderrs.assign(static_cast<std::size_t>(m), kNaN);
    for (int j : chosen_of[e]) {
      const double s1 = sum[e * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)];
      const double s2 = sumsq[e * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)];
      const double mean = s1 / N;
      const double var = std::max(0.0, (s2 - N * mean * mean) / (N - 1.0));
      entry.payoffs[static_cast<std::size_t>(j)] = mean;
      entry.stderrs[static_cast<std::size_t>(j)] = std::sqrt(var / N);
    }
  }
  return tensor;
}

std::vector<double> count_vector_distribution(const std::vector<MixedStrategy>& strategies,
                                              int m) {
  if (m < 1) throw std::invalid_argument("count_vector_distribution: m must be at least 1");
  for (const auto& s : strategies) {
    if (s.size() != m)
      throw std::invalid_argument("count_vector_distribution: strategy over wrong m");
    s.validate();
  }
  std::vector<double> dp{1.0};
  std::vector<std::vector<int>> level{std::vector<int>(static_cast<std::size_t>(m), 0)};
  for (std::size_t a = 0; a < strategies.size(); ++a) {
    auto next_level = enumerate_count_vectors(static_cast<int>(a) + 1, m);
    std::vector<double> next(next_level.size(), 0.0);
    for (std::size_t s = 0; s < level.size(); ++s) {
      if (dp[s] == 0.0) continue;
      auto counts = level[s];
      for (int j = 0; j < m; ++j) {
        const double pj = strategies[a].probs[static_cast<std::size_t>(j)];
        if (pj == 0.0) continue;
        counts[static_cast<std::size_t>(j)] += 1;
        next[count_vector_rank(counts)] += dp[s] * pj;
        counts[static_cast<std::size_t>(j)] -= 1;
      }
    }
    dp = std::move(next);
    level = std::move(next_level);
  }
  return dp;
}

double expected_payoff(const std::vector<MixedStrategy>& profile, const PayoffTensor& tensor,
                       int agent) {
  const int n = tensor.n;
  const int m = tensor.m;
  if (static_cast<int>(profile.size()) != n)
    throw std::invalid_argument("expected_payoff: profile size does not match the tensor");
  if (agent < 0 || agent >= n) throw std::invalid_argument("expected_payoff: agent out of range");

  std::vector<MixedStrategy> others;
  others.reserve(profile.size() - 1);
  for (int i = 0; i < n; ++i)
    if (i != agent) others.push_back(profile[static_cast<std::size_t>(i)]);
  const auto& focal = profile[static_cast<std::size_t>(agent)];
  if (focal.size() != m) throw std::invalid_argument("expected_payoff: strategy over wrong m");
  focal.validate();

  const auto dp = count_vector_distribution(others, m);
  const auto states = enumerate_count_vectors(n - 1, m);
  double total = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (dp[s] == 0.0) continue;
    auto counts = states[s];
    for (int j = 0; j < m; ++j) {
      const double pj = focal.probs[static_cast<std::size_t>(j)];
      if (pj == 0.0) continue;
      counts[static_cast<std::size_t>(j)] += 1;
      total += dp[s] * pj *
               tensor.entries[count_vector_rank(counts)].payoffs[static_cast<std::size_t>(j)];
      counts[static_cast<std::size_t>(j)] -= 1;
    }
  }
  return total;
}

}  // namespace pools::game
