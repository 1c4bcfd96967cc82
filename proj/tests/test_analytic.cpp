#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pools/analytic.hpp"
#include "pools/dist.hpp"
#include "pools/game.hpp"

using namespace pools;
using analytic::EquilibriumKind;
using analytic::GreedyVerdict;

TEST_CASE("greedy deviation rule on frozen cases") {
  // Five agents, strongest alternative at rate 0.9: deviating wins.
  auto r = analytic::greedy_best_response(5, dist::Rates({1.0, 0.9, 0.5}), 0);
  CHECK(r.verdict == GreedyVerdict::UniquelyDeviate);
  CHECK(r.deviant == 1);
  CHECK(std::abs(r.gap - 0.22246083385937197106) < 1e-12);

  // Two agents, a 2:1 favorite: joining the favorite wins.
  r = analytic::greedy_best_response(2, dist::Rates({2.0, 1.0}), 0);
  CHECK(r.verdict == GreedyVerdict::UniquelyFavorite);
  CHECK(r.deviant == 1);
  CHECK(std::abs(r.gap - (0.18258477493038806636 - 0.60570314110766843361)) < 1e-12);

  // Identical rates, two agents: joining and deviating tie exactly.
  r = analytic::greedy_best_response(2, dist::Rates({1.0, 1.0}), 0);
  CHECK(r.verdict == GreedyVerdict::Indifferent);

  // Identical rates, three agents: the shared pot makes deviation strict.
  r = analytic::greedy_best_response(3, dist::Rates({1.0, 1.0, 1.0}), 0);
  CHECK(r.verdict == GreedyVerdict::UniquelyDeviate);
  CHECK(r.gap > 0.0);
  CHECK(r.deviant != 0);

  CHECK_THROWS_AS(analytic::greedy_best_response(1, dist::Rates({1.0, 0.5}), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::greedy_best_response(3, dist::Rates({1.0, 0.5}), 2),
                  std::invalid_argument);
  // The favorite argument must actually be a max-rate process.
  CHECK_THROWS_AS(analytic::greedy_best_response(3, dist::Rates({1.0, 0.5}), 1),
                  std::invalid_argument);
}

TEST_CASE("greedy gap matches the exact tensor deviation payoff") {
  // Against n-1 agents on the favorite, the deviator's expected payoff is
  // (n-1) * gap; read the same number off the exact anonymous tensor.
  const dist::Rates rates({1.25, 1.0});
  const auto r = analytic::greedy_best_response(3, rates, 0);
  CHECK(r.verdict == GreedyVerdict::UniquelyDeviate);
  CHECK(r.deviant == 1);

  auto tensor = game::exact_payoff_tensor(3, game::induced_outcome_distribution(rates));
  const double dev_payoff = tensor.payoff(std::vector<int>{2, 1}, 1);
  CHECK(std::abs(2.0 * r.gap - dev_payoff) < 1e-12);
  // Frozen closed form: deviator wins the whole pot on p_lt, loses on p_gt.
  CHECK(std::abs(dev_payoff - 0.17129159652691126892) < 1e-12);
}

TEST_CASE("break even boundary in rate space") {
  const std::array<double, 4> grid{1.0, 2.0, 3.0, 4.0};
  auto curve = analytic::boundary_curve(3, grid);
  REQUIRE(curve.size() == 4);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].lambda1 == grid[i]);
    REQUIRE(curve[i].lambda2_star.has_value());
    // Break-even sits strictly below the favorite's rate.
    CHECK(*curve[i].lambda2_star < grid[i]);
    CHECK(*curve[i].lambda2_star > 0.0);
    if (i > 0) CHECK(*curve[i].lambda2_star > *curve[i - 1].lambda2_star);
  }
  CHECK(std::abs(*curve[3].lambda2_star - 3.0158446624605531076) < 1e-7);

  // At the reported rate the gap really is near zero, and it has the right
  // sign on either side.
  const double star = *curve[3].lambda2_star;
  auto gap_at = [](double l2, double l1, int n) {
    const auto cp = dist::compare(l2, l1);
    return cp.p_gt - cp.p_lt / (n - 1);
  };
  CHECK(std::abs(gap_at(star, 4.0, 3)) < 1e-7);
  CHECK(gap_at(star + 0.05, 4.0, 3) > 0.0);
  CHECK(gap_at(star - 0.05, 4.0, 3) < 0.0);

  // Two agents: any strictly better rate wins outright, so the boundary is
  // the diagonal.
  auto diag = analytic::boundary_curve(2, grid);
  for (std::size_t i = 0; i < diag.size(); ++i) {
    REQUIRE(diag[i].lambda2_star.has_value());
    CHECK(*diag[i].lambda2_star == grid[i]);
  }

  CHECK_THROWS_AS(analytic::boundary_curve(3, std::array<double, 1>{-1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::boundary_curve(3, grid, 0.0), std::invalid_argument);
}

TEST_CASE("two agent best responses need not follow win probabilities") {
  // Four equiprobable singleton rankings over five processes. Pairwise,
  // choice 3 beats choice 2 in every draw and choice 0 beats choice 1 in
  // every draw; everything else ties in expectation.
  std::vector<std::pair<game::OrderedPartition, double>> support;
  support.emplace_back(game::OrderedPartition({{4}, {0}, {1}, {3}, {2}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{4}, {3}, {2}, {0}, {1}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{0}, {1}, {3}, {2}, {4}}, 5), 0.25);
  support.emplace_back(game::OrderedPartition({{3}, {2}, {0}, {1}, {4}}, 5), 0.25);
  auto tensor =
      game::exact_payoff_tensor(2, game::OutcomeDistribution(5, std::move(support)));

  const auto br = analytic::two_agent_best_response(tensor);
  REQUIRE(br.best_per_opponent.size() == 5);
  CHECK(br.best_per_opponent[1] == std::vector<int>{0});
  CHECK(br.best_per_opponent[2] == std::vector<int>{3});
  CHECK(br.best_per_opponent[0] == std::vector<int>{0, 2, 3, 4});
  CHECK(br.best_per_opponent[3] == std::vector<int>{0, 1, 3, 4});
  CHECK(br.best_per_opponent[4] == std::vector<int>{0, 1, 2, 3, 4});
  // No choice is best against everything.
  CHECK(br.universal.empty());

  // In the Poisson two-agent game a strict max-rate process is universal.
  auto poisson = game::exact_payoff_tensor(
      2, game::induced_outcome_distribution(dist::Rates({2.0, 1.0})));
  const auto pbr = analytic::two_agent_best_response(poisson);
  CHECK(pbr.best_per_opponent[0] == std::vector<int>{0});
  CHECK(pbr.best_per_opponent[1] == std::vector<int>{0});
  CHECK(pbr.universal == std::vector<int>{0});

  auto three = game::exact_payoff_tensor(
      3, game::induced_outcome_distribution(dist::Rates({2.0, 1.0})));
  CHECK_THROWS_AS(analytic::two_agent_best_response(three), std::invalid_argument);
}

TEST_CASE("indifference polynomial endpoint identities") {
  for (int n : {3, 4, 5, 8, 12, 25}) {
    for (double c : {0.3, 1.0, 1.4205184030984358869, 3.7}) {
      const auto poly = analytic::symmetric_eq_polynomial(n, c);
      CHECK(poly.n == n);
      CHECK(poly.c == c);
      const double at0 = c * (n - 1) - 1.0;
      const double at1 = c - (n - 1);
      CHECK(poly(0.0) == doctest::Approx(at0).epsilon(1e-12));
      CHECK(poly(1.0) == doctest::Approx(at1).epsilon(1e-11).scale(std::abs(at1) + 1.0));
    }
  }
  CHECK_THROWS_AS(analytic::symmetric_eq_polynomial(2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(analytic::symmetric_eq_polynomial(3, 0.0), std::invalid_argument);
}

TEST_CASE("two process symmetric equilibria closed forms") {
  // n = 3 interior: s* = (2c - 1) / (c + 1).
  const double c3 = 1.4205184030984358869;  // odds ratio of rates 1.25 vs 1
  auto eqs = analytic::symmetric_equilibria_two_process(3, c3);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].kind == EquilibriumKind::Interior);
  CHECK(std::abs(eqs[0].s1 - 0.76059607885658443566) < 5e-12);
  CHECK(std::abs(eqs[0].residual) < 1e-9);

  for (double c : {0.7, 1.0, 1.3, 1.9}) {
    eqs = analytic::symmetric_equilibria_two_process(3, c);
    REQUIRE(eqs.size() == 1);
    CHECK(std::abs(eqs[0].s1 - (2.0 * c - 1.0) / (c + 1.0)) < 5e-12);
  }

  // n = 4, c = 2: the interior root is (7 - sqrt(29)) / 2.
  eqs = analytic::symmetric_equilibria_two_process(4, 2.0);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].kind == EquilibriumKind::Interior);
  CHECK(std::abs(eqs[0].s1 - 0.5 * (7.0 - std::sqrt(29.0))) < 5e-12);

  // Pure regimes: a strong enough favorite absorbs everyone, a weak enough
  // one is abandoned.
  eqs = analytic::symmetric_equilibria_two_process(3, 2.5);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].kind == EquilibriumKind::PureFavorite);
  CHECK(eqs[0].s1 == 1.0);

  eqs = analytic::symmetric_equilibria_two_process(3, 0.4);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].kind == EquilibriumKind::PureFavorite);
  CHECK(eqs[0].s1 == 0.0);

  // Interior weights respond monotonically to the odds ratio across n.
  for (int n : {3, 4, 5, 6}) {
    double prev = -1.0;
    for (double c : {0.8, 1.1, 1.5, 1.9}) {
      const auto e = analytic::symmetric_equilibria_two_process(n, c);
      REQUIRE(!e.empty());
      CHECK(e.front().s1 > prev);
      prev = e.front().s1;
    }
  }
}

TEST_CASE("interior uniqueness probe") {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.6 + 1.3 * i / 19.0);
  const auto report = analytic::conjecture_probe(3, grid);
  CHECK(report.n == 3);
  REQUIRE(report.points.size() == grid.size());
  CHECK(report.unique_everywhere);
  CHECK(report.strictly_increasing);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(report.points[i].root_count == 1);
    CHECK(std::abs(report.points[i].s1 - (2.0 * grid[i] - 1.0) / (grid[i] + 1.0)) < 1e-10);
  }

  CHECK_THROWS_AS(analytic::conjecture_probe(3, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(analytic::conjecture_probe(3, std::vector<double>{1.2, 1.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(analytic::conjecture_probe(3, std::vector<double>{2.5}),
                  std::invalid_argument);
}
