#pragma once

// Exact comparison probabilities for independent Poisson counts, by direct
// summation of truncated series. Truncation is driven by the residual joint
// tail mass, so every returned probability is accurate to the requested
// tolerance.

#include <cstdint>
#include <map>
#include <vector>

namespace pools::dist {

inline constexpr double kDefaultTol = 1e-12;

// Rates of the independent Poisson processes, 0-based.
struct Rates {
  std::vector<double> lambda;

  explicit Rates(std::vector<double> l);

  int size() const { return static_cast<int>(lambda.size()); }
  double operator[](int i) const { return lambda[static_cast<std::size_t>(i)]; }
  double max_rate() const;
};

// Outcome split for one count measured against another.
struct ComparisonProbs {
  double p_gt = 0.0;        // P(Y_a > Y_b)
  double p_lt = 0.0;        // P(Y_a < Y_b)
  double p_eq = 0.0;        // P(Y_a = Y_b)
  double odds_ratio = 0.0;  // p_gt / p_lt
};

double poisson_log_pmf(double lambda, int y);
double poisson_pmf(double lambda, int y);

// The three probabilities are accumulated from the same truncated series, so
// compare(a, b).p_gt == compare(b, a).p_lt exactly, and the total never
// exceeds 1.
ComparisonProbs compare(double lambda_a, double lambda_b, double tol = kDefaultTol);

// Distribution of the exact argmax set among the processes in `chosen`
// (a bitmask over process indices). Keys are the non-empty submasks S of
// `chosen`; the value at S is the probability that S is exactly the set of
// chosen processes attaining the maximum count.
std::map<std::uint32_t, double> argmax_set_distribution(const Rates& rates,
                                                        std::uint32_t chosen,
                                                        double tol = kDefaultTol);

}  // namespace pools::dist
