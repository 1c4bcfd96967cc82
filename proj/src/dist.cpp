#include "pools/dist.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pools/errors.hpp"

namespace pools::dist {

namespace {

void check_rate(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw std::invalid_argument("rate must be positive and finite, got " +
                                std::to_string(lambda));
}

void check_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-8)
    throw std::invalid_argument("tolerance must lie in (0, 1e-8]");
}

// Generous summation cap; the residual criterion fires far earlier.
int tail_cap(double lambda) {
  return static_cast<int>(lambda + 60.0 * std::sqrt(lambda) + 1000.0);
}

}  // namespace

Rates::Rates(std::vector<double> l) : lambda(std::move(l)) {
  if (lambda.size() < 2) throw std::invalid_argument("need at least 2 processes");
  for (double x : lambda) check_rate(x);
}

double Rates::max_rate() const {
  double best = lambda[0];
  for (double x : lambda)
    if (x > best) best = x;
  return best;
}

double poisson_log_pmf(double lambda, int y) {
  check_rate(lambda);
  if (y < 0) throw std::invalid_argument("count must be non-negative");
  return -lambda + y * std::log(lambda) - std::lgamma(static_cast<double>(y) + 1.0);
}

double poisson_pmf(double lambda, int y) { return std::exp(poisson_log_pmf(lambda, y)); }

ComparisonProbs compare(double lambda_a, double lambda_b, double tol) {
  check_rate(lambda_a);
  check_rate(lambda_b);
  check_tol(tol);

  // One pass over y. cdf_a and cdf_b trail by one term, so the products
  // pa * cdf_b and pb * cdf_a pick up P(Y_a = y, Y_b < y) and its mirror.
  // All three sums draw on the same pmf products in the same order, which
  // makes compare(a, b) and compare(b, a) bitwise transposes of each other.
  ComparisonProbs out;
  double cdf_a = 0.0, cdf_b = 0.0;
  const double half_tol = 0.5 * tol;
  const int cap = tail_cap(std::max(lambda_a, lambda_b));
  for (int y = 0; y <= cap; ++y) {
    const double pa = std::exp(-lambda_a + y * std::log(lambda_a) -
                               std::lgamma(static_cast<double>(y) + 1.0));
    const double pb = std::exp(-lambda_b + y * std::log(lambda_b) -
                               std::lgamma(static_cast<double>(y) + 1.0));
    out.p_eq += pa * pb;
    out.p_gt += pa * cdf_b;
    out.p_lt += pb * cdf_a;
    cdf_a += pa;
    cdf_b += pb;
    if (1.0 - cdf_a * cdf_b < half_tol) break;
  }
  out.odds_ratio = out.p_gt / out.p_lt;
  return out;
}

std::map<std::uint32_t, double> argmax_set_distribution(const Rates& rates,
                                                        std::uint32_t chosen,
                                                        double tol) {
  check_tol(tol);
  const int m = rates.size();
  if (chosen == 0) throw std::invalid_argument("chosen set must be non-empty");
  if (m < 32 && (chosen >> m) != 0)
    throw std::invalid_argument("chosen set references processes beyond the rate vector");

  std::vector<int> idx;
  for (int i = 0; i < m; ++i)
    if (chosen & (1u << i)) idx.push_back(i);
  const int r = static_cast<int>(idx.size());
  if (r > 20)
    throw CapacityError("argmax_set_distribution: " + std::to_string(r) +
                        " chosen processes exceeds the 2^20 subset budget");

  if (r == 1) return {{chosen, 1.0}};

  const std::uint32_t full = (1u << r) - 1u;
  std::vector<double> acc(full + 1, 0.0);  // indexed by packed submask
  std::vector<double> pmf(static_cast<std::size_t>(r));
  std::vector<double> cdf_prev(static_cast<std::size_t>(r), 0.0);  // CDF at y-1
  const double half_tol = 0.5 * tol;
  double lmax = 0.0;
  for (int i : idx) lmax = std::max(lmax, rates[i]);
  const int cap = tail_cap(lmax);

  for (int y = 0; y <= cap; ++y) {
    for (int i = 0; i < r; ++i) {
      const double lam = rates[idx[static_cast<std::size_t>(i)]];
      pmf[static_cast<std::size_t>(i)] =
          std::exp(-lam + y * std::log(lam) - std::lgamma(static_cast<double>(y) + 1.0));
    }
    // The processes in S tie at the maximum y exactly when the members of S
    // hit y and the rest stay below it.
    for (std::uint32_t s = 1; s <= full; ++s) {
      double prob = 1.0;
      for (int i = 0; i < r; ++i)
        prob *= (s & (1u << i)) ? pmf[static_cast<std::size_t>(i)]
                                : cdf_prev[static_cast<std::size_t>(i)];
      acc[s] += prob;
    }
    double joint_cdf = 1.0;
    for (int i = 0; i < r; ++i) {
      cdf_prev[static_cast<std::size_t>(i)] += pmf[static_cast<std::size_t>(i)];
      joint_cdf *= cdf_prev[static_cast<std::size_t>(i)];
    }
    if (1.0 - joint_cdf < half_tol) break;
  }

  std::map<std::uint32_t, double> out;
  for (std::uint32_t s = 1; s <= full; ++s) {
    std::uint32_t key = 0;
    for (int i = 0; i < r; ++i)
      if (s & (1u << i)) key |= 1u << idx[static_cast<std::size_t>(i)];
    out[key] = acc[s];
  }
  return out;
}

}  // namespace pools::dist
