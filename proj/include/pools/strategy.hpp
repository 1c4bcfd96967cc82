#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pools::game {

// A probability vector over the m processes.
struct MixedStrategy {
  std::vector<double> probs;

  MixedStrategy() = default;
  explicit MixedStrategy(std::vector<double> p) : probs(std::move(p)) {}

  int size() const { return static_cast<int>(probs.size()); }

  static MixedStrategy uniform(int m) {
    if (m < 1) throw std::invalid_argument("MixedStrategy: m must be at least 1");
    return MixedStrategy(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
  }

  static MixedStrategy pure(int m, int j) {
    if (m < 1 || j < 0 || j >= m) throw std::invalid_argument("MixedStrategy: bad pure index");
    std::vector<double> p(static_cast<std::size_t>(m), 0.0);
    p[static_cast<std::size_t>(j)] = 1.0;
    return MixedStrategy(std::move(p));
  }

  // Simplex membership up to `slack` in the total mass.
  void validate(double slack = 1e-9) const {
    if (probs.empty()) throw std::invalid_argument("MixedStrategy: empty");
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("MixedStrategy: negative or non-finite probability");
      total += p;
    }
    if (std::abs(total - 1.0) > slack)
      throw std::invalid_argument("MixedStrategy: probabilities sum to " + std::to_string(total));
  }
};

}  // namespace pools::game
