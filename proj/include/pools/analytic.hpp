#pragma once

// Closed-form and semi-analytic results for Poisson pools: the greedy
// deviation rule against a field of favorite-pickers, the indifference
// boundary in rate space, and symmetric equilibria of the two-process game
// through exact polynomial root isolation.

#include <optional>
#include <span>
#include <vector>

#include "pools/dist.hpp"
#include "pools/exec.hpp"
#include "pools/game.hpp"

namespace pools::analytic {

enum class GreedyVerdict { UniquelyFavorite, UniquelyDeviate, Indifferent };

// Best response against n-1 agents all picking the favorite: deviating to
// the strongest alternative beats joining exactly when gap > 0, where
// gap = p_gt - p_lt / (n - 1) for the alternative measured against the
// favorite. The expected deviation payoff is (n - 1) * gap.
struct GreedyResponse {
  GreedyVerdict verdict = GreedyVerdict::Indifferent;
  int deviant = -1;  // strongest deviation target, 0-based
  double gap = 0.0;
};

GreedyResponse greedy_best_response(int n, const dist::Rates& rates, int favorite);

// For each lambda1, the second-process rate at which joining and deviating
// break even. Empty optional when the gap never changes sign. For n = 2 the
// curve is the diagonal.
struct BoundaryPoint {
  double lambda1 = 0.0;
  std::optional<double> lambda2_star;
};

std::vector<BoundaryPoint> boundary_curve(int n, std::span<const double> lambda1_grid,
                                          double tol_lambda = 1e-8,
                                          Exec exec = Exec::Parallel);

// Argmax sets of the two-agent game read off a payoff tensor, one per
// opponent pick, plus the choices that are best against every pick.
struct TwoAgentBestResponse {
  std::vector<std::vector<int>> best_per_opponent;
  std::vector<int> universal;
};

TwoAgentBestResponse two_agent_best_response(const game::PayoffTensor& tensor);

// Indifference polynomial in the favorite's weight s for the symmetric
// two-process game with odds ratio c = p_gt / p_lt. Its sign is the sign of
// the marginal gain from shifting weight onto the favorite; interior
// symmetric equilibria are its roots in (0, 1). Endpoint values are
// c(n-1) - 1 at s = 0 and c - (n-1) at s = 1.
struct SymmetricEqPolynomial {
  int n = 0;
  double c = 0.0;
  std::vector<double> coeffs;  // coeffs[i] multiplies s^i

  double operator()(double s) const;
};

SymmetricEqPolynomial symmetric_eq_polynomial(int n, double c);

enum class EquilibriumKind { PureFavorite, Interior };

struct SymmetricEquilibrium {
  double s1 = 0.0;  // weight on the favorite process
  EquilibriumKind kind = EquilibriumKind::Interior;
  double residual = 0.0;  // polynomial value at s1
};

// All symmetric equilibria of the two-process game: the pure regimes at
// c >= n-1 (all on the favorite) and c <= 1/(n-1) (all on the other
// process), and otherwise every odd-multiplicity interior root, isolated by
// Sturm sequences and refined by bisection to 1e-12.
std::vector<SymmetricEquilibrium> symmetric_equilibria_two_process(int n, double c);

struct ConjectureProbePoint {
  double c = 0.0;
  double s1 = 0.0;  // smallest interior equilibrium weight
  int root_count = 0;
};

// Scans a grid of odds ratios inside the interior regime and reports whether
// the interior equilibrium is unique and strictly increasing in c. Findings
// are reported, never asserted.
struct ConjectureProbeReport {
  int n = 0;
  std::vector<ConjectureProbePoint> points;
  bool unique_everywhere = false;
  bool strictly_increasing = false;
};

ConjectureProbeReport conjecture_probe(int n, std::span<const double> c_grid,
                                       Exec exec = Exec::Parallel);

}  // namespace pools::analytic
