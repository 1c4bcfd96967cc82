#include "pools/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pools/errors.hpp"

namespace pools::analytic {

namespace {

// ---------- exact rationals for the polynomial expansion ----------

struct Fraction {
  long long num = 0;
  long long den = 1;
};

long long checked_ll(__int128 v) {
  if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
    throw std::overflow_error("rational overflow");
  return static_cast<long long>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Fraction normalized(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {checked_ll(num), checked_ll(den)};
}

Fraction frac(long long num, long long den) { return normalized(num, den); }

Fraction operator+(Fraction a, Fraction b) {
  return normalized(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                    static_cast<__int128>(a.den) * b.den);
}

Fraction operator*(Fraction a, Fraction b) {
  return normalized(static_cast<__int128>(a.num) * b.num,
                    static_cast<__int128>(a.den) * b.den);
}

double to_double(Fraction f) {
  return static_cast<double>(static_cast<long double>(f.num) / static_cast<long double>(f.den));
}

unsigned long long binom(unsigned long long a, unsigned long long b) {
  if (b > a) return 0;
  if (b > a - b) b = a - b;
  unsigned long long r = 1;
  for (unsigned long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// The marginal gain from weight s on the favorite splits per coefficient
// into a constant part and a multiple of the odds ratio c. Both parts are
// exact rationals for moderate n; larger n falls back to long double sums.
void expand_coefficients_exact(int n, std::vector<Fraction>& alpha, std::vector<Fraction>& beta) {
  alpha.assign(static_cast<std::size_t>(n), Fraction{});
  beta.assign(static_cast<std::size_t>(n), Fraction{});
  for (int k = 1; k <= n - 2; ++k) {
    const auto cb = static_cast<long long>(binom(n - 1, k));
    const Fraction w_alpha = frac(-static_cast<long long>(n), n - k);
    const Fraction w_beta = frac(n, k + 1);
    for (int i = 0; i <= n - 1 - k; ++i) {
      const long long sign = (i % 2 == 0) ? 1 : -1;
      const long long coef = cb * static_cast<long long>(binom(n - 1 - k, i)) * sign;
      const std::size_t idx = static_cast<std::size_t>(k + i);
      alpha[idx] = alpha[idx] + Fraction{coef, 1} * w_alpha;
      beta[idx] = beta[idx] + Fraction{coef, 1} * w_beta;
    }
  }
  for (int i = 0; i <= n - 1; ++i) {
    const long long b = static_cast<long long>(binom(n - 1, i)) * ((i % 2 == 0) ? 1 : -1);
    const std::size_t idx = static_cast<std::size_t>(i);
    alpha[idx] = alpha[idx] + Fraction{-b, 1};
    beta[idx] = beta[idx] + Fraction{b * (n - 1), 1};
  }
  alpha[static_cast<std::size_t>(n - 1)] =
      alpha[static_cast<std::size_t>(n - 1)] + Fraction{-(static_cast<long long>(n) - 1), 1};
  beta[static_cast<std::size_t>(n - 1)] =
      beta[static_cast<std::size_t>(n - 1)] + Fraction{1, 1};
}

void expand_coefficients_double(int n, std::vector<long double>& alpha,
                                std::vector<long double>& beta) {
  alpha.assign(static_cast<std::size_t>(n), 0.0L);
  beta.assign(static_cast<std::size_t>(n), 0.0L);
  auto binf = [](int a, int b) {
    long double r = 1.0L;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  for (int k = 1; k <= n - 2; ++k) {
    const long double cb = binf(n - 1, k);
    const long double w_alpha = -static_cast<long double>(n) / (n - k);
    const long double w_beta = static_cast<long double>(n) / (k + 1);
    for (int i = 0; i <= n - 1 - k; ++i) {
      const long double coef = cb * binf(n - 1 - k, i) * ((i % 2 == 0) ? 1.0L : -1.0L);
      alpha[static_cast<std::size_t>(k + i)] += coef * w_alpha;
      beta[static_cast<std::size_t>(k + i)] += coef * w_beta;
    }
  }
  for (int i = 0; i <= n - 1; ++i) {
    const long double b = binf(n - 1, i) * ((i % 2 == 0) ? 1.0L : -1.0L);
    alpha[static_cast<std::size_t>(i)] += -b;
    beta[static_cast<std::size_t>(i)] += b * (n - 1);
  }
  alpha[static_cast<std::size_t>(n - 1)] += -(static_cast<long double>(n) - 1.0L);
  beta[static_cast<std::size_t>(n - 1)] += 1.0L;
}

// ---------- root isolation ----------

using Poly = std::vector<double>;  // ascending powers

double peval(const Poly& p, double x) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// Drops near-zero leading coefficients; low-order coefficients are kept.
Poly trim(Poly p, double scale) {
  const double cut = 1e-14 * scale;
  while (p.size() > 1 && std::abs(p.back()) <= cut) p.pop_back();
  return p;
}

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

bool is_zero_poly(const Poly& p) {
  for (double c : p)
    if (c != 0.0) return false;
  return true;
}

// Remainder of a / b by synthetic division.
Poly remainder(Poly a, const Poly& b, double scale) {
  while (a.size() >= b.size() && !is_zero_poly(a)) {
    const double factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= factor * b[i];
    a.back() = 0.0;
    a = trim(std::move(a), scale);
    if (a.size() == 1 && a[0] == 0.0) break;
  }
  return a;
}

std::vector<Poly> sturm_chain(Poly p, double scale) {
  std::vector<Poly> chain;
  chain.push_back(trim(std::move(p), scale));
  if (chain[0].size() <= 1) return chain;
  chain.push_back(trim(derivative(chain[0]), scale));
  while (chain.back().size() > 1 && !is_zero_poly(chain.back())) {
    Poly r = remainder(chain[chain.size() - 2], chain.back(), scale);
    if (is_zero_poly(r)) break;
    for (double& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

int sign_changes(const std::vector<Poly>& chain, double x) {
  int changes = 0;
  int prev = 0;
  for (const auto& p : chain) {
    const double v = peval(p, x);
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

double bisect_root(const Poly& p, double lo, double hi) {
  double flo = peval(p, lo);
  if (flo == 0.0) return lo;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double fm = peval(p, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Odd-multiplicity roots of p in the open interval (lo, hi). Requires
// nonzero values at both endpoints. Sturm counts isolate single distinct
// roots; a sign change across the isolating interval certifies odd
// multiplicity, even-multiplicity touch points are dropped.
std::vector<double> odd_roots_in(const Poly& p, double lo, double hi) {
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  const auto chain = sturm_chain(p, scale);

  std::vector<double> roots;
  std::vector<std::pair<double, double>> stack{{lo, hi}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    const int count = sign_changes(chain, a) - sign_changes(chain, b);
    if (count <= 0) continue;
    const double fa = peval(p, a);
    const double fb = peval(p, b);
    if (count == 1 || b - a < 1e-13) {
      if ((fa > 0.0) != (fb > 0.0)) roots.push_back(bisect_root(p, a, b));
      continue;
    }
    double mid = 0.5 * (a + b);
    if (peval(p, mid) == 0.0) {
      // The split point is itself a root; classify it from flanking signs
      // and keep isolating on both sides.
      double h = (b - a) * 1e-9;
      while ((peval(p, mid - h) == 0.0 || peval(p, mid + h) == 0.0) && h < (b - a) * 0.25)
        h *= 2.0;
      if ((peval(p, mid - h) > 0.0) != (peval(p, mid + h) > 0.0)) roots.push_back(mid);
      stack.emplace_back(a, mid - h);
      stack.emplace_back(mid + h, b);
    } else {
      stack.emplace_back(a, mid);
      stack.emplace_back(mid, b);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

void check_n_agents(int n, int minimum) {
  if (n < minimum)
    throw std::invalid_argument("need at least " + std::to_string(minimum) + " agents");
}

}  // namespace

GreedyResponse greedy_best_response(int n, const dist::Rates& rates, int favorite) {
  check_n_agents(n, 2);
  const int m = rates.size();
  if (favorite < 0 || favorite >= m)
    throw std::invalid_argument("greedy_best_response: favorite out of range");
  for (int i = 0; i < m; ++i)
    if (rates[i] > rates[favorite])
      throw std::invalid_argument("greedy_best_response: favorite is not a max-rate process");

  int deviant = -1;
  for (int i = 0; i < m; ++i) {
    if (i == favorite) continue;
    if (deviant < 0 || rates[i] > rates[deviant]) deviant = i;
  }

  const auto cp = dist::compare(rates[deviant], rates[favorite]);
  const double gap = cp.p_gt - cp.p_lt / (n - 1);
  GreedyResponse out;
  out.deviant = deviant;
  out.gap = gap;
  if (gap > 1e-12)
    out.verdict = GreedyVerdict::UniquelyDeviate;
  else if (gap < -1e-12)
    out.verdict = GreedyVerdict::UniquelyFavorite;
  else
    out.verdict = GreedyVerdict::Indifferent;
  return out;
}

std::vector<BoundaryPoint> boundary_curve(int n, std::span<const double> lambda1_grid,
                                          double tol_lambda, Exec exec) {
  check_n_agents(n, 2);
  if (!(tol_lambda > 0.0)) throw std::invalid_argument("boundary_curve: bad rate tolerance");
  for (double l1 : lambda1_grid)
    if (!std::isfinite(l1) || l1 <= 0.0)
      throw std::invalid_argument("boundary_curve: rates must be positive and finite");

  std::vector<BoundaryPoint> out(lambda1_grid.size());
  if (n == 2) {
    // A lone opponent is beaten by any strictly higher rate, so the
    // break-even curve is the diagonal.
    for (std::size_t i = 0; i < lambda1_grid.size(); ++i)
      out[i] = {lambda1_grid[i], lambda1_grid[i]};
    return out;
  }

  const auto total = static_cast<std::int64_t>(lambda1_grid.size());
  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      const double l1 = lambda1_grid[static_cast<std::size_t>(i)];
      const auto gap = [&](double l2) {
        const auto cp = dist::compare(l2, l1);
        return cp.p_gt - cp.p_lt / (n - 1);
      };
      double lo = l1 * 1e-9;
      double hi = l1;
      const double glo = gap(lo);
      const double ghi = gap(hi);
      BoundaryPoint point{l1, std::nullopt};
      if (glo >= 0.0) {
        point.lambda2_star = lo;
      } else if (ghi <= 0.0) {
        // No sign change on (0, lambda1]: no break-even rate to report.
      } else {
        while (hi - lo > tol_lambda) {
          const double mid = 0.5 * (lo + hi);
          const double g = gap(mid);
          if (g == 0.0) {
            lo = hi = mid;
            break;
          }
          (g < 0.0 ? lo : hi) = mid;
        }
        point.lambda2_star = 0.5 * (lo + hi);
      }
      out[static_cast<std::size_t>(i)] = point;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)exec;
  return out;
}

TwoAgentBestResponse two_agent_best_response(const game::PayoffTensor& tensor) {
  if (tensor.n != 2)
    throw std::invalid_argument("two_agent_best_response: tensor must be a 2-agent game");
  const int m = tensor.m;
  TwoAgentBestResponse out;
  out.best_per_opponent.resize(static_cast<std::size_t>(m));
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < m; ++k) {
    std::vector<double> value(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      counts[static_cast<std::size_t>(j)] += 1;
      counts[static_cast<std::size_t>(k)] += 1;
      value[static_cast<std::size_t>(j)] = tensor.payoff(counts, j);
      counts[static_cast<std::size_t>(j)] -= 1;
      counts[static_cast<std::size_t>(k)] -= 1;
    }
    const double best = *std::max_element(value.begin(), value.end());
    for (int j = 0; j < m; ++j)
      if (value[static_cast<std::size_t>(j)] >= best - 1e-12)
        out.best_per_opponent[static_cast<std::size_t>(k)].push_back(j);
  }
  for (int j = 0; j < m; ++j) {
    bool everywhere = true;
    for (const auto& bs : out.best_per_opponent)
      if (std::find(bs.begin(), bs.end(), j) == bs.end()) {
        everywhere = false;
        break;
      }
    if (everywhere) out.universal.push_back(j);
  }
  return out;
}

double SymmetricEqPolynomial::operator()(double s) const { return peval(coeffs, s); }

SymmetricEqPolynomial symmetric_eq_polynomial(int n, double c) {
  check_n_agents(n, 3);
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("symmetric_eq_polynomial: odds ratio must be positive");

  SymmetricEqPolynomial poly;
  poly.n = n;
  poly.c = c;
  poly.coeffs.assign(static_cast<std::size_t>(n), 0.0);
  if (n <= 20) {
    std::vector<Fraction> alpha, beta;
    expand_coefficients_exact(n, alpha, beta);
    for (int j = 0; j < n; ++j)
      poly.coeffs[static_cast<std::size_t>(j)] =
          to_double(alpha[static_cast<std::size_t>(j)]) +
          to_double(beta[static_cast<std::size_t>(j)]) * c;
  } else {
    std::vector<long double> alpha, beta;
    expand_coefficients_double(n, alpha, beta);
    for (int j = 0; j < n; ++j)
      poly.coeffs[static_cast<std::size_t>(j)] = static_cast<double>(
          alpha[static_cast<std::size_t>(j)] +
          beta[static_cast<std::size_t>(j)] * static_cast<long double>(c));
  }
  return poly;
}

std::vector<SymmetricEquilibrium> symmetric_equilibria_two_process(int n, double c) {
  const auto poly = symmetric_eq_polynomial(n, c);
  if (c >= static_cast<double>(n - 1))
    return {{1.0, EquilibriumKind::PureFavorite, poly(1.0)}};
  if (c <= 1.0 / (n - 1))
    return {{0.0, EquilibriumKind::PureFavorite, poly(0.0)}};

  const auto roots = odd_roots_in(poly.coeffs, 0.0, 1.0);
  if (roots.empty())
    throw std::logic_error(
        "symmetric_equilibria_two_process: interior regime admits no "
        "odd-multiplicity root; the marginal-gain signs at the endpoints are "
        "inconsistent");
  std::vector<SymmetricEquilibrium> out;
  out.reserve(roots.size());
  for (double r : roots) out.push_back({r, EquilibriumKind::Interior, poly(r)});
  return out;
}

ConjectureProbeReport conjecture_probe(int n, std::span<const double> c_grid, Exec exec) {
  check_n_agents(n, 3);
  if (c_grid.empty()) throw std::invalid_argument("conjecture_probe: empty grid");
  const double lo = 1.0 / (n - 1);
  const double hi = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > lo) || !(c_grid[i] < hi))
      throw std::invalid_argument("conjecture_probe: odds ratio outside the interior regime");
    if (i > 0 && !(c_grid[i] > c_grid[i - 1]))
      throw std::invalid_argument("conjecture_probe: grid must be strictly increasing");
  }

  ConjectureProbeReport report;
  report.n = n;
  report.points.resize(c_grid.size());
  const auto total = static_cast<std::int64_t>(c_grid.size());
  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      const double c = c_grid[static_cast<std::size_t>(i)];
      const auto eqs = symmetric_equilibria_two_process(n, c);
      ConjectureProbePoint point;
      point.c = c;
      point.s1 = eqs.front().s1;
      point.root_count = static_cast<int>(eqs.size());
      report.points[static_cast<std::size_t>(i)] = point;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)exec;

  report.unique_everywhere = true;
  report.strictly_increasing = true;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    if (report.points[i].root_count != 1) report.unique_everywhere = false;
    if (i > 0 && !(report.points[i].s1 > report.points[i - 1].s1))
      report.strictly_increasing = false;
  }
  return report;
}

}  // namespace pools::analytic
