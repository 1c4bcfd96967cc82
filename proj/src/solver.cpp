#include "pools/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pools/errors.hpp"
#include "pools/rng.hpp"

namespace pools::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-tensor lookup tables: count-vector levels for 0..n-1 opponents and the
// index maps for adding one more pick. Built once per solve; the per-agent
// deviation payoffs then reduce to dense sweeps.
struct Workspace {
  int n = 0;
  int m = 0;
  std::vector<std::vector<std::vector<int>>> levels;  // levels[t]: t picks
  std::vector<std::vector<std::size_t>> step;         // step[t][s*m+j]: index in level t+1
  const game::PayoffTensor* tensor = nullptr;

  explicit Workspace(const game::PayoffTensor& tensor_in) : tensor(&tensor_in) {
    n = tensor_in.n;
    m = tensor_in.m;
    levels.resize(static_cast<std::size_t>(n) + 1);
    step.resize(static_cast<std::size_t>(n));
    for (int t = 0; t <= n; ++t) levels[static_cast<std::size_t>(t)] = game::enumerate_count_vectors(t, m);
    for (int t = 0; t < n; ++t) {
      const auto& lvl = levels[static_cast<std::size_t>(t)];
      auto& tbl = step[static_cast<std::size_t>(t)];
      tbl.resize(lvl.size() * static_cast<std::size_t>(m));
      for (std::size_t s = 0; s < lvl.size(); ++s) {
        auto counts = lvl[s];
        for (int j = 0; j < m; ++j) {
          counts[static_cast<std::size_t>(j)] += 1;
          tbl[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] =
              game::count_vector_rank(counts);
          counts[static_cast<std::size_t>(j)] -= 1;
        }
      }
    }
  }

  // Deviation payoffs of a focal agent against the given opponents.
  std::vector<double> deviation_payoffs(const std::vector<const MixedStrategy*>& opponents) const {
    std::vector<double> dp{1.0};
    std::vector<double> next;
    for (std::size_t t = 0; t < opponents.size(); ++t) {
      const auto& tbl = step[t];
      next.assign(levels[t + 1].size(), 0.0);
      const auto& probs = opponents[t]->probs;
      for (std::size_t s = 0; s < dp.size(); ++s) {
        const double ps = dp[s];
        if (ps == 0.0) continue;
        for (int j = 0; j < m; ++j) {
          const double pj = probs[static_cast<std::size_t>(j)];
          if (pj != 0.0)
            next[tbl[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)]] += ps * pj;
        }
      }
      dp.swap(next);
    }
    const auto& tbl = step[static_cast<std::size_t>(n - 1)];
    std::vector<double> dev(static_cast<std::size_t>(m), 0.0);
    for (std::size_t s = 0; s < dp.size(); ++s) {
      const double ps = dp[s];
      if (ps == 0.0) continue;
      for (int j = 0; j < m; ++j) {
        const std::size_t e = tbl[s * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)];
        dev[static_cast<std::size_t>(j)] +=
            ps * tensor->entries[e].payoffs[static_cast<std::size_t>(j)];
      }
    }
    return dev;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void check_strategy(const MixedStrategy& s, int m) {
  if (s.size() != m) throw std::invalid_argument("strategy is over the wrong number of processes");
  s.validate();
}

bool tuple_budget_ok(int n, int m) {
  double tuples = 1.0;
  for (int i = 0; i < n - 1; ++i) tuples *= m;
  return tuples <= 2e7;
}

// Certifies a converged result against the tuple-enumeration evaluator.
// Returns the certified regret.
double certify_regret(const std::vector<MixedStrategy>& profile,
                      const game::PayoffTensor& tensor, double claimed) {
  if (!tuple_budget_ok(tensor.n, tensor.m)) return claimed;
  const double direct = profile_regret_direct(profile, tensor);
  if (std::abs(direct - claimed) > 1e-9)
    throw std::logic_error("regret mismatch between solver paths: " + std::to_string(claimed) +
                           " vs " + std::to_string(direct));
  return std::max(direct, claimed);
}

bool profile_is_symmetric(const std::vector<MixedStrategy>& profile) {
  for (std::size_t i = 1; i < profile.size(); ++i)
    for (std::size_t j = 0; j < profile[i].probs.size(); ++j)
      if (std::abs(profile[i].probs[j] - profile[0].probs[j]) > 1e-9) return false;
  return true;
}

EquilibriumResult mw_single_start(const Workspace& ws, double scale, std::uint64_t run_seed,
                                  double tol, long long max_iters) {
  const int m = ws.m;
  const int n = ws.n;
  rng::Stream stream(run_seed, 0x6D77);  // multiplicative-weights stream
  MixedStrategy s(stream.dirichlet_uniform(m));
  std::vector<const MixedStrategy*> opponents(static_cast<std::size_t>(n - 1), &s);

  const double inv_scale = scale > 0.0 ? 1.0 / scale : 1.0;
  double eta = 2.0;
  double prev_regret = kInf;
  double regret = kInf;
  long long used = 0;
  bool converged = false;

  for (long long it = 1; it <= max_iters; ++it) {
    used = it;
    const auto dev = ws.deviation_payoffs(opponents);
    const double u = dot(s.probs, dev);
    regret = *std::max_element(dev.begin(), dev.end()) - u;
    if (regret < 0.9 * tol) {
      converged = true;
      break;
    }
    // Back off the step size whenever progress stalls; the descent is then
    // monotone in practice and insensitive to the payoff scale.
    if (regret > prev_regret) eta = std::max(eta * 0.7, 1e-3);
    prev_regret = regret;
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      auto& pj = s.probs[static_cast<std::size_t>(j)];
      pj *= std::exp(eta * (dev[static_cast<std::size_t>(j)] - u) * inv_scale);
      total += pj;
    }
    for (auto& pj : s.probs) pj /= total;
  }

  EquilibriumResult result;
  result.profile.assign(static_cast<std::size_t>(n), s);
  result.regret = regret;
  result.converged = converged;
  result.symmetric = true;
  result.iterations = used;
  result.seed = run_seed;
  return result;
}

}  // namespace

std::vector<double> symmetric_deviation_payoffs(const MixedStrategy& s,
                                                const game::PayoffTensor& tensor) {
  check_strategy(s, tensor.m);
  Workspace ws(tensor);
  std::vector<const MixedStrategy*> opponents(static_cast<std::size_t>(tensor.n - 1), &s);
  return ws.deviation_payoffs(opponents);
}

double symmetric_regret(const MixedStrategy& s, const game::PayoffTensor& tensor) {
  check_strategy(s, tensor.m);
  Workspace ws(tensor);
  std::vector<const MixedStrategy*> opponents(static_cast<std::size_t>(tensor.n - 1), &s);
  const auto dev = ws.deviation_payoffs(opponents);
  const double u = dot(s.probs, dev);
  if (std::abs(u) > 1e-9)
    throw std::logic_error("symmetric profile value " + std::to_string(u) +
                           " is not zero; the tensor is not a stake-one pool");
  return *std::max_element(dev.begin(), dev.end()) - u;
}

double profile_regret(const std::vector<MixedStrategy>& profile,
                      const game::PayoffTensor& tensor) {
  if (static_cast<int>(profile.size()) != tensor.n)
    throw std::invalid_argument("profile size does not match the tensor");
  for (const auto& s : profile) check_strategy(s, tensor.m);
  Workspace ws(tensor);
  double joint = -kInf;
  std::vector<const MixedStrategy*> opponents;
  for (int i = 0; i < tensor.n; ++i) {
    opponents.clear();
    for (int k = 0; k < tensor.n; ++k)
      if (k != i) opponents.push_back(&profile[static_cast<std::size_t>(k)]);
    const auto dev = ws.deviation_payoffs(opponents);
    const double u = dot(profile[static_cast<std::size_t>(i)].probs, dev);
    joint = std::max(joint, *std::max_element(dev.begin(), dev.end()) - u);
  }
  return joint;
}

double profile_regret_direct(const std::vector<MixedStrategy>& profile,
                             const game::PayoffTensor& tensor) {
  const int n = tensor.n;
  const int m = tensor.m;
  if (static_cast<int>(profile.size()) != n)
    throw std::invalid_argument("profile size does not match the tensor");
  for (const auto& s : profile) check_strategy(s, tensor.m);
  if (!tuple_budget_ok(n, m))
    throw CapacityError("profile_regret_direct: opponent tuple enumeration exceeds the budget");

  double joint = -kInf;
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  std::vector<double> dev(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < n; ++i) {
    std::fill(dev.begin(), dev.end(), 0.0);
    std::vector<int> others;
    for (int k = 0; k < n; ++k)
      if (k != i) others.push_back(k);

    auto rec = [&](auto&& self, std::size_t pos, double prob) -> void {
      if (prob == 0.0) return;
      if (pos == others.size()) {
        for (int j = 0; j < m; ++j) {
          counts[static_cast<std::size_t>(j)] += 1;
          const auto e = game::count_vector_rank(counts);
          dev[static_cast<std::size_t>(j)] +=
              prob * tensor.entries[e].payoffs[static_cast<std::size_t>(j)];
          counts[static_cast<std::size_t>(j)] -= 1;
        }
        return;
      }
      const auto& probs = profile[static_cast<std::size_t>(others[pos])].probs;
      for (int j = 0; j < m; ++j) {
        if (probs[static_cast<std::size_t>(j)] == 0.0) continue;
        counts[static_cast<std::size_t>(j)] += 1;
        self(self, pos + 1, prob * probs[static_cast<std::size_t>(j)]);
        counts[static_cast<std::size_t>(j)] -= 1;
      }
    };
    rec(rec, 0, 1.0);

    const double u = dot(profile[static_cast<std::size_t>(i)].probs, dev);
    joint = std::max(joint, *std::max_element(dev.begin(), dev.end()) - u);
  }
  return joint;
}

SymmetricSearchResult find_symmetric_equilibrium(const game::PayoffTensor& tensor, int starts,
                                                 std::uint64_t seed, double tol,
                                                 long long max_iters, Exec exec) {
  if (starts < 1) throw std::invalid_argument("find_symmetric_equilibrium: need at least 1 start");
  if (!(tol > 0.0)) throw std::invalid_argument("find_symmetric_equilibrium: bad tolerance");
  if (max_iters < 1) throw std::invalid_argument("find_symmetric_equilibrium: bad iteration cap");

  Workspace ws(tensor);
  const double scale = tensor.max_abs_payoff();
  std::vector<EquilibriumResult> runs(static_cast<std::size_t>(starts));
  std::exception_ptr failure = nullptr;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (int start = 0; start < starts; ++start) {
    try {
      const std::uint64_t run_seed = rng::derive_seed(seed, static_cast<std::uint64_t>(start));
      auto result = mw_single_start(ws, scale, run_seed, tol, max_iters);
      if (result.converged) {
        result.regret = certify_regret(result.profile, tensor, result.regret);
        result.converged = result.regret < tol;
      }
      runs[static_cast<std::size_t>(start)] = std::move(result);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)exec;

  SymmetricSearchResult out;
  out.starts = starts;
  for (auto& r : runs) {
    out.total_iterations += r.iterations;
    if (r.converged) ++out.converged;
  }

  // Deduplicate converged strategies up to an L-infinity distance of 1e-6,
  // keeping the first representative in start order.
  for (auto& r : runs) {
    if (!r.converged) continue;
    bool fresh = true;
    for (const auto& kept : out.equilibria) {
      double dist = 0.0;
      for (int j = 0; j < tensor.m; ++j)
        dist = std::max(dist, std::abs(kept.profile[0].probs[static_cast<std::size_t>(j)] -
                                       r.profile[0].probs[static_cast<std::size_t>(j)]));
      if (dist <= 1e-6) {
        fresh = false;
        break;
      }
    }
    if (fresh) out.equilibria.push_back(std::move(r));
  }
  return out;
}

EquilibriumResult best_response_dynamics(const game::PayoffTensor& tensor, std::uint64_t seed,
                                         double tol, long long max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("best_response_dynamics: bad tolerance");
  if (max_iters < 1) throw std::invalid_argument("best_response_dynamics: bad iteration cap");
  const int n = tensor.n;
  const int m = tensor.m;
  Workspace ws(tensor);
  const double scale = tensor.max_abs_payoff();
  const double inv_scale = scale > 0.0 ? 1.0 / scale : 1.0;

  std::vector<MixedStrategy> profile;
  profile.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rng::Stream stream(seed, 0xB2D, static_cast<std::uint64_t>(i));
    profile.emplace_back(stream.dirichlet_uniform(m));
  }

  constexpr double kTemperatureFloor = 1e-6;
  double joint = kInf;
  long long used = 0;
  bool converged = false;

  // Each agent plays the softmax best response to the running average of its
  // past deviation payoffs. The averaging multiplier grows linearly, so the
  // effective softmax temperature is 1/k at iteration k, floored at 1e-6.
  // Seeding the averages with the log of the random start makes iteration 1
  // reproduce the start exactly and decay its influence as 1/k.
  std::vector<std::vector<double>> avg_dev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& avg = avg_dev[static_cast<std::size_t>(i)];
    avg.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
      avg[static_cast<std::size_t>(j)] =
          scale * std::log(profile[static_cast<std::size_t>(i)].probs[static_cast<std::size_t>(j)]);
  }

  std::vector<std::vector<double>> devs(static_cast<std::size_t>(n));
  std::vector<const MixedStrategy*> opponents;

  for (long long it = 1; it <= max_iters; ++it) {
    used = it;
    joint = -kInf;
    for (int i = 0; i < n; ++i) {
      opponents.clear();
      for (int k = 0; k < n; ++k)
        if (k != i) opponents.push_back(&profile[static_cast<std::size_t>(k)]);
      devs[static_cast<std::size_t>(i)] = ws.deviation_payoffs(opponents);
      const auto& dev = devs[static_cast<std::size_t>(i)];
      const double u = dot(profile[static_cast<std::size_t>(i)].probs, dev);
      joint = std::max(joint, *std::max_element(dev.begin(), dev.end()) - u);
    }
    if (joint < 0.9 * tol) {
      converged = true;
      break;
    }
    // The log-prior counts as one pseudo-observation, so the mean runs over
    // it + 1 entries and the start's influence decays as 1/k.
    const double sharpness =
        std::min(static_cast<double>(it + 1), 1.0 / kTemperatureFloor) * inv_scale;
    for (int i = 0; i < n; ++i) {
      const auto& dev = devs[static_cast<std::size_t>(i)];
      auto& avg = avg_dev[static_cast<std::size_t>(i)];
      double top = -kInf;
      for (int j = 0; j < m; ++j) {
        auto& aj = avg[static_cast<std::size_t>(j)];
        aj += (dev[static_cast<std::size_t>(j)] - aj) / static_cast<double>(it + 1);
        top = std::max(top, aj);
      }
      auto& probs = profile[static_cast<std::size_t>(i)].probs;
      double total = 0.0;
      for (int j = 0; j < m; ++j) {
        auto& pj = probs[static_cast<std::size_t>(j)];
        pj = std::exp((avg[static_cast<std::size_t>(j)] - top) * sharpness);
        total += pj;
      }
      for (auto& pj : probs) pj /= total;
    }
  }

  EquilibriumResult result;
  result.profile = std::move(profile);
  result.regret = joint;
  result.converged = converged;
  if (converged) {
    result.regret = certify_regret(result.profile, tensor, joint);
    result.converged = result.regret < tol;
  }
  result.symmetric = profile_is_symmetric(result.profile);
  result.iterations = used;
  result.seed = seed;
  return result;
}

DiversificationMetric diversification_metric(const game::PayoffTensor& tensor, int t,
                                             std::uint64_t seed, Exec exec, double tol,
                                             long long max_iters) {
  if (t < 1) throw std::invalid_argument("diversification_metric: need at least 1 run");
  const int m = tensor.m;
  const int n = tensor.n;

  std::vector<EquilibriumResult> runs(static_cast<std::size_t>(t));
  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (int run = 0; run < t; ++run) {
    try {
      runs[static_cast<std::size_t>(run)] = best_response_dynamics(
          tensor, rng::derive_seed(seed, static_cast<std::uint64_t>(run)), tol, max_iters);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)exec;

  int failed = 0;
  for (const auto& r : runs)
    if (!r.converged) ++failed;
  if (failed * 5 > t)
    throw NonConvergenceError("diversification_metric: " + std::to_string(failed) + " of " +
                              std::to_string(t) + " dynamics runs failed to reach regret " +
                              std::to_string(tol));

  DiversificationMetric out;
  out.t = t;
  out.converged_runs = t - failed;
  out.avg_probs.assign(static_cast<std::size_t>(m), 0.0);
  out.dispersion.assign(static_cast<std::size_t>(m), 0.0);
  for (const auto& r : runs) {
    if (!r.converged) continue;
    std::vector<double> row(static_cast<std::size_t>(m), 0.0);
    for (const auto& s : r.profile)
      for (int j = 0; j < m; ++j) row[static_cast<std::size_t>(j)] += s.probs[static_cast<std::size_t>(j)];
    for (auto& x : row) x /= n;
    out.per_run.push_back(std::move(row));
  }
  const auto rows = static_cast<double>(out.per_run.size());
  for (const auto& row : out.per_run)
    for (int j = 0; j < m; ++j) out.avg_probs[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
  for (auto& x : out.avg_probs) x /= rows;
  if (out.per_run.size() > 1) {
    for (const auto& row : out.per_run)
      for (int j = 0; j < m; ++j) {
        const double d = row[static_cast<std::size_t>(j)] - out.avg_probs[static_cast<std::size_t>(j)];
        out.dispersion[static_cast<std::size_t>(j)] += d * d;
      }
    for (auto& x : out.dispersion) x = std::sqrt(x / (rows - 1.0));
  }
  return out;
}

}  // namespace pools::solver
