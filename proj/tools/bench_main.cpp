// Timing harness for the serial and OpenMP variants of the data-parallel
// kernels. Each kernel is run under both execution policies; the reported
// max delta must be exactly 0, since the parallel variants are required to
// be bit-identical to the serial reference.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pools/analytic.hpp"
#include "pools/dist.hpp"
#include "pools/game.hpp"
#include "pools/solver.hpp"

namespace {

using pools::Exec;

double time_ms(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

double tensor_delta(const pools::game::PayoffTensor& a, const pools::game::PayoffTensor& b) {
  double delta = 0.0;
  for (std::size_t e = 0; e < a.entries.size(); ++e)
    for (std::size_t j = 0; j < a.entries[e].payoffs.size(); ++j) {
      const double x = a.entries[e].payoffs[j];
      const double y = b.entries[e].payoffs[j];
      if (std::isnan(x) && std::isnan(y)) continue;
      delta = std::max(delta, std::abs(x - y));
    }
  return delta;
}

void report(const char* name, double serial_ms, double parallel_ms, double delta) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   max|delta| %g\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms, delta);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run serially\n\n");
#endif

  {
    const pools::dist::Rates rates({1.0, 0.95, 0.9, 0.85, 0.8});
    const auto outcome = pools::game::induced_outcome_distribution(rates);
    pools::game::PayoffTensor serial, parallel;
    const double t_serial =
        time_ms([&] { serial = pools::game::exact_payoff_tensor(8, outcome, Exec::Serial); });
    const double t_parallel =
        time_ms([&] { parallel = pools::game::exact_payoff_tensor(8, outcome, Exec::Parallel); });
    report("exact tensor n=8 m=5", t_serial, t_parallel, tensor_delta(serial, parallel));
  }

  {
    const pools::dist::Rates rates({2.0, 1.5, 1.0});
    pools::game::PayoffTensor serial, parallel;
    const double t_serial = time_ms(
        [&] { serial = pools::game::mc_payoff_tensor(5, rates, 2000000, 7, Exec::Serial); });
    const double t_parallel = time_ms(
        [&] { parallel = pools::game::mc_payoff_tensor(5, rates, 2000000, 7, Exec::Parallel); });
    report("mc tensor n=5 m=3 2e6", t_serial, t_parallel, tensor_delta(serial, parallel));
  }

  {
    const pools::dist::Rates rates({1.0, 0.95, 0.9025});
    const auto tensor =
        pools::game::exact_payoff_tensor(4, pools::game::induced_outcome_distribution(rates));
    pools::solver::DiversificationMetric serial, parallel;
    const double t_serial = time_ms(
        [&] { serial = pools::solver::diversification_metric(tensor, 40, 3, Exec::Serial); });
    const double t_parallel = time_ms(
        [&] { parallel = pools::solver::diversification_metric(tensor, 40, 3, Exec::Parallel); });
    double delta = 0.0;
    for (std::size_t j = 0; j < serial.avg_probs.size(); ++j)
      delta = std::max(delta, std::abs(serial.avg_probs[j] - parallel.avg_probs[j]));
    report("dynamics ensemble t=40", t_serial, t_parallel, delta);
  }

  {
    std::vector<double> grid(24);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.25 + 0.25 * static_cast<double>(i);
    std::vector<pools::analytic::BoundaryPoint> serial, parallel;
    const double t_serial = time_ms(
        [&] { serial = pools::analytic::boundary_curve(4, grid, 1e-8, Exec::Serial); });
    const double t_parallel = time_ms(
        [&] { parallel = pools::analytic::boundary_curve(4, grid, 1e-8, Exec::Parallel); });
    double delta = 0.0;
    for (std::size_t i = 0; i < serial.size(); ++i)
      delta = std::max(delta, std::abs(serial[i].lambda2_star.value_or(-1.0) -
                                       parallel[i].lambda2_star.value_or(-1.0)));
    report("boundary curve 24 points", t_serial, t_parallel, delta);
  }

  return 0;
}
