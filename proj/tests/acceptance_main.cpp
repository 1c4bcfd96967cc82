// Acceptance gate: one line per criterion, [PASS]/[FAIL] with timing and a
// measured detail. Exits nonzero when any gated criterion fails. Soft
// targets report their measurements but gate only the stated inequality.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pools/analytic.hpp"
#include "pools/dist.hpp"
#include "pools/errors.hpp"
#include "pools/game.hpp"
#include "pools/rng.hpp"
#include "pools/solver.hpp"
#include "pools/sweep.hpp"

using namespace pools;

namespace {

constexpr std::uint64_t kMasterSeed = 20260817;

double g_symmetric_s1 = 0.0;  // criterion 4 hands its value to criterion 5

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

game::OutcomeDistribution intro_game() {
  std::vector<std::pair<game::OrderedPartition, double>> support;
  support.emplace_back(game::OrderedPartition({{0}, {1}}, 2), 0.6);
  support.emplace_back(game::OrderedPartition({{1}, {0}}, 2), 0.4);
  return game::OutcomeDistribution(2, std::move(support));
}

game::PayoffTensor poisson_tensor(int n, const std::vector<double>& rates) {
  return game::exact_payoff_tensor(n, game::induced_outcome_distribution(dist::Rates(rates)));
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

std::string set_to_string(const std::vector<int>& xs) {  // 1-based for display
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i] + 1);
  }
  return out + "}";
}

// ---- criteria ----

bool intro_game_payoff(std::string& detail) {
  auto tensor = game::exact_payoff_tensor(3, intro_game());
  const double payoff = tensor.payoff(std::vector<int>{2, 1}, 1);
  const double err = std::abs(payoff - 0.2);
  detail = "underdog payoff " + fmt(payoff, 17) + ", err " + fmt(err, 3);
  return err < 1e-12;
}

bool n3_closed_form(std::string& detail) {
  double max_err = 0.0;
  bool unique = true;
  for (int i = 0; i < 50; ++i) {
    const double c = 0.5 + 1.5 * (i + 0.5) / 50.0;
    const auto eqs = analytic::symmetric_equilibria_two_process(3, c);
    if (eqs.size() != 1) unique = false;
    for (const auto& eq : eqs)
      max_err = std::max(max_err, std::abs(eq.s1 - (2.0 * c - 1.0) / (c + 1.0)));
  }
  detail = "max |root - (2c-1)/(c+1)| = " + fmt(max_err, 3) +
           (unique ? ", one root per c" : ", MULTIPLE ROOTS at some c");
  return unique && max_err < 1e-9;
}

bool n4_closed_form(std::string& detail) {
  double max_err = 0.0;
  bool unique = true;
  for (int i = 0; i < 50; ++i) {
    const double c = 1.0 / 3.0 + (3.0 - 1.0 / 3.0) * (i + 0.5) / 50.0;
    // Rationalized form of the quadratic root, stable through c = 1.
    const double disc = (3.0 * c + 1.0) * (3.0 * c + 1.0) - 4.0 * (c - 1.0) * (3.0 * c - 1.0);
    const double want = 2.0 * (3.0 * c - 1.0) / ((3.0 * c + 1.0) + std::sqrt(disc));
    const auto eqs = analytic::symmetric_equilibria_two_process(4, c);
    if (eqs.size() != 1) unique = false;
    for (const auto& eq : eqs) max_err = std::max(max_err, std::abs(eq.s1 - want));
  }
  const auto at_one = analytic::symmetric_equilibria_two_process(4, 1.0);
  const double err_at_one = std::abs(at_one.front().s1 - 0.5);
  detail = "max grid err " + fmt(max_err, 3) + ", |root(c=1) - 1/2| = " + fmt(err_at_one, 3) +
           (unique ? "" : ", MULTIPLE ROOTS at some c");
  return unique && max_err < 1e-9 && err_at_one < 1e-12;
}

bool symmetric_value(std::string& detail) {
  auto tensor = poisson_tensor(3, {1.25, 1.0});
  const auto search = solver::find_symmetric_equilibrium(tensor, 8, 11);
  if (search.equilibria.empty()) {
    detail = "no converged symmetric equilibrium";
    return false;
  }
  g_symmetric_s1 = search.equilibria.front().profile[0].probs[0];
  detail = "s1 = " + fmt(g_symmetric_s1, 10) + ", |s1 - 0.76| = " +
           fmt(std::abs(g_symmetric_s1 - 0.76), 3);
  return std::abs(g_symmetric_s1 - 0.76) < 0.01;
}

bool ensemble_value(std::string& detail) {
  auto tensor = poisson_tensor(3, {1.25, 1.0});
  const auto metric = solver::diversification_metric(tensor, 100, 2026);
  const double avg = metric.avg_probs[0];
  detail = "ensemble process-1 avg " + fmt(avg, 6) + " vs symmetric s1 " +
           fmt(g_symmetric_s1, 6) + "; |avg - 0.70| = " + fmt(std::abs(avg - 0.70), 3) +
           " (reported, not gated)";
  return avg < g_symmetric_s1;
}

bool two_agent_max_rate(std::string& detail) {
  rng::Stream stream(kMasterSeed, 0xACC, 6);
  int checked = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int m = 2 + static_cast<int>(stream.next_u64() % 4);
    std::vector<double> rates(static_cast<std::size_t>(m));
    for (auto& r : rates) r = 0.2 + 4.8 * stream.next_double();

    const double top = *std::max_element(rates.begin(), rates.end());
    std::vector<int> max_set;
    for (int j = 0; j < m; ++j)
      if (rates[static_cast<std::size_t>(j)] == top) max_set.push_back(j);

    const auto br = analytic::two_agent_best_response(poisson_tensor(2, rates));
    if (br.universal != max_set) {
      detail = "instance " + std::to_string(inst) + ": universal " +
               set_to_string(br.universal) + " != max-rate " + set_to_string(max_set);
      return false;
    }
    for (int k = 0; k < m; ++k)
      if (br.best_per_opponent[static_cast<std::size_t>(k)] != max_set) {
        detail = "instance " + std::to_string(inst) + ": best response to pick " +
                 std::to_string(k + 1) + " is " +
                 set_to_string(br.best_per_opponent[static_cast<std::size_t>(k)]) +
                 " != max-rate " + set_to_string(max_set);
        return false;
      }
    ++checked;
  }
  detail = std::to_string(checked) + "/200 instances: best response = max-rate set";
  return checked == 200;
}

bool counterexample_game(std::string& detail) {
  std::vector<std::pair<game::OrderedPartition, double>> support;
  support.emplace_back(game::OrderedPartition({{4}, {0}, {1}, {3}, {2}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{4}, {3}, {2}, {0}, {1}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{0}, {1}, {3}, {2}, {4}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{3}, {2}, {0}, {1}, {4}}, 5), 0.25);
  auto tensor = game::exact_payoff_tensor(2, game::OutcomeDistribution(5, std::move(support)));
  const auto br = analytic::two_agent_best_response(tensor);
  const bool br3_is_4 = br.best_per_opponent[2] == std::vector<int>{3};
  const bool br2_is_1 = br.best_per_opponent[1] == std::vector<int>{0};
  detail = "best response to 3 is " + set_to_string(br.best_per_opponent[2]) +
           ", to 2 is " + set_to_string(br.best_per_opponent[1]);
  return br3_is_4 && br2_is_1;
}

bool greedy_threshold(std::string& detail) {
  rng::Stream stream(kMasterSeed, 0xACC, 8);
  int accepted = 0;
  int attempts = 0;
  double max_err = 0.0;
  while (accepted < 100 && attempts < 400) {
    ++attempts;
    const int n = 2 + static_cast<int>(stream.next_u64() % 5);
    std::vector<double> rates(2);
    for (auto& r : rates) r = 0.2 + 4.8 * stream.next_double();
    const int favorite = rates[0] >= rates[1] ? 0 : 1;
    const int other = 1 - favorite;

    const auto verdict = analytic::greedy_best_response(n, dist::Rates(rates), favorite);
    if (std::abs(verdict.gap) <= 1e-9) continue;  // indifference set excluded
    ++accepted;

    auto tensor = poisson_tensor(n, rates);
    std::vector<int> counts(2);
    counts[static_cast<std::size_t>(favorite)] = n - 1;
    counts[static_cast<std::size_t>(other)] = 1;
    const double dev = tensor.payoff(counts, other);
    max_err = std::max(max_err, std::abs(dev - (n - 1) * verdict.gap));
    const bool should_deviate = dev > 0.0;
    const bool says_deviate = verdict.verdict == analytic::GreedyVerdict::UniquelyDeviate;
    if (should_deviate != says_deviate || max_err > 1e-10) {
      detail = "disagreement at attempt " + std::to_string(attempts) + ": rates (" +
               fmt(rates[0]) + ", " + fmt(rates[1]) + "), n=" + std::to_string(n) +
               ", gap " + fmt(verdict.gap, 6) + ", tensor deviation " + fmt(dev, 6);
      return false;
    }
  }
  detail = std::to_string(accepted) + " instances checked, max |tensor - (n-1)*gap| = " +
           fmt(max_err, 3);
  return accepted == 100;
}

bool boundary_monotonicity(std::string& detail) {
  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[static_cast<std::size_t>(i)] = 0.1 + (10.0 - 0.1) * i / 49.0;

  std::vector<std::vector<double>> stars;  // indexed by n - 2
  for (int n = 2; n <= 6; ++n) {
    const auto curve = analytic::boundary_curve(n, grid);
    std::vector<double> vals;
    for (const auto& point : curve) {
      if (!point.lambda2_star) {
        detail = "n=" + std::to_string(n) + ": missing break-even at lambda1 = " +
                 fmt(point.lambda1);
        return false;
      }
      vals.push_back(*point.lambda2_star);
    }
    stars.push_back(std::move(vals));
  }

  for (std::size_t i = 0; i < grid.size(); ++i)
    if (stars[0][i] != grid[i]) {
      detail = "n=2 curve leaves the diagonal at lambda1 = " + fmt(grid[i]);
      return false;
    }
  for (int n = 3; n <= 5; ++n)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double here = stars[static_cast<std::size_t>(n - 2)][i];
      const double next = stars[static_cast<std::size_t>(n - 1)][i];
      if (!(next < here)) {
        detail = "ordering violated at lambda1 = " + fmt(grid[i]) + ": lambda2*(n=" +
                 std::to_string(n + 1) + ") = " + fmt(next) + " >= lambda2*(n=" +
                 std::to_string(n) + ") = " + fmt(here);
        return false;
      }
    }
  detail = "lambda2*(n+1) < lambda2*(n) at all 50 grid points for n in {3,4,5}; n=2 diagonal";
  return true;
}

bool qualitative_regimes(std::string& detail) {
  const double tol = 0.03;
  std::ostringstream os;
  bool ok = true;

  // (a) k = 0.95, m = 3: process-1 ensemble weight from n = 3 to n = 4.
  const auto rates95 = sweep::sweep_rates(0.95, 0.0, 3);
  const double w3 = solver::diversification_metric(poisson_tensor(3, rates95), 100, 99)
                        .avg_probs[0];
  const double w4 = solver::diversification_metric(poisson_tensor(4, rates95), 100, 99)
                        .avg_probs[0];
  const bool a_ok = w4 < w3 - tol;
  ok = ok && a_ok;
  os << "(a) " << (a_ok ? "ok" : "FAIL") << " process-1 weight n=3 " << fmt(w3, 5) << " -> n=4 "
     << fmt(w4, 5) << " (needs drop > " << fmt(tol, 2) << ")";

  // (b) k = 0.65, m = 3, n = 5: process-3 ensemble weight stays negligible.
  const auto rates65 = sweep::sweep_rates(0.65, 0.0, 3);
  const double w5 = solver::diversification_metric(poisson_tensor(5, rates65), 100, 5)
                        .avg_probs[2];
  const bool b_ok = w5 < tol;
  ok = ok && b_ok;
  os << "; (b) " << (b_ok ? "ok" : "FAIL") << " process-3 weight " << fmt(w5, 5) << " < "
     << fmt(tol, 2);

  // (c) additive rate offsets at k = 0.95, n = 3: entropy ordering.
  double h[3] = {0.0, 0.0, 0.0};
  const double offsets[3] = {-0.5, 0.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    const auto rates = sweep::sweep_rates(0.95, offsets[i], 3);
    h[i] = entropy(
        solver::diversification_metric(poisson_tensor(3, rates), 100, 99).avg_probs);
  }
  const bool c_ok = h[0] < h[1] - tol && h[2] > h[1] + tol;
  ok = ok && c_ok;
  os << "; (c) " << (c_ok ? "ok" : "FAIL") << " entropy offset -0.5: " << fmt(h[0], 6)
     << ", 0: " << fmt(h[1], 6) << ", +1.0: " << fmt(h[2], 6);

  detail = os.str();
  return ok;
}

bool mc_exact_agreement(std::string& detail) {
  rng::Stream stream(kMasterSeed, 0xACC, 11);
  double worst_z = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 2 + static_cast<int>(stream.next_u64() % 3);
    const int m = 2 + static_cast<int>(stream.next_u64() % 2);
    std::vector<double> rates(static_cast<std::size_t>(m));
    for (auto& r : rates) r = 0.2 + 4.8 * stream.next_double();

    auto exact = poisson_tensor(n, rates);
    auto mc = game::mc_payoff_tensor(n, dist::Rates(rates), 1000000,
                                     rng::derive_seed(kMasterSeed, static_cast<std::uint64_t>(inst)));
    for (std::size_t e = 0; e < exact.entries.size(); ++e)
      for (int j = 0; j < m; ++j) {
        if (exact.entries[e].counts[static_cast<std::size_t>(j)] == 0) continue;
        const double diff = std::abs(mc.entries[e].payoffs[static_cast<std::size_t>(j)] -
                                     exact.entries[e].payoffs[static_cast<std::size_t>(j)]);
        const double err = mc.entries[e].stderrs[static_cast<std::size_t>(j)];
        if (err > 0.0) worst_z = std::max(worst_z, diff / err);
        if (diff > 4.0 * err + 1e-12) {
          detail = "instance " + std::to_string(inst) + " entry " + std::to_string(e) +
                   " process " + std::to_string(j + 1) + ": |mc - exact| = " + fmt(diff, 4) +
                   " > 4 stderr = " + fmt(4.0 * err, 4);
          return false;
        }
      }
  }
  detail = "20/20 instances within 4 stderr; worst |z| = " + fmt(worst_z, 4);
  return true;
}

bool conjecture_probe_runs(std::string& detail) {
  std::ostringstream os;
  for (int n = 3; n <= 6; ++n) {
    const double lo = 1.0 / (n - 1);
    const double hi = static_cast<double>(n - 1);
    std::vector<double> grid(50);
    for (int i = 0; i < 50; ++i)
      grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / 50.0;
    const auto report = analytic::conjecture_probe(n, grid);
    if (n > 3) os << "; ";
    os << "n=" << n << " unique=" << (report.unique_everywhere ? "yes" : "NO")
       << " increasing=" << (report.strictly_increasing ? "yes" : "NO");
    if (!report.unique_everywhere || !report.strictly_increasing)
      os << " [finding surfaced, not gated]";
  }
  detail = os.str();
  return true;  // gated only on completing without non-convergence
}

struct Criterion {
  int id;
  const char* name;
  double budget_ms;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "intro-game-payoff", 1.0, intro_game_payoff},
      {2, "n3-closed-form", 1000.0, n3_closed_form},
      {3, "n4-closed-form", 1000.0, n4_closed_form},
      {4, "symmetric-value", 1000.0, symmetric_value},
      {5, "ensemble-value", 120000.0, ensemble_value},
      {6, "two-agent-max-rate", 60000.0, two_agent_max_rate},
      {7, "counterexample-game", 1.0, counterexample_game},
      {8, "greedy-threshold", 30000.0, greedy_threshold},
      {9, "boundary-monotonicity", 60000.0, boundary_monotonicity},
      {10, "qualitative-regimes", 600000.0, qualitative_regimes},
      {11, "mc-exact-agreement", 300000.0, mc_exact_agreement},
      {12, "conjecture-probe", 120000.0, conjecture_probe_runs},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const auto stop = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (ms >= criterion.budget_ms) {
      ok = false;
      detail += " [over budget " + fmt(criterion.budget_ms, 6) + " ms]";
    }
    if (!ok) ++failures;
    std::printf("[%s] %02d %s (%.1f ms): %s\n", ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, ms, detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0)
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures > 0 ? 1 : 0;
}
