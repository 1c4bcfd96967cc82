#include "pools/sweep.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pools/errors.hpp"
#include "pools/io.hpp"
#include "pools/rng.hpp"

namespace pools::sweep {

namespace {

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

std::vector<double> sweep_rates(double k, double offset, int m) {
  if (!std::isfinite(k) || k <= 0.0)
    throw std::invalid_argument("sweep rates: k must be positive and finite");
  if (!std::isfinite(offset)) throw std::invalid_argument("sweep rates: offset must be finite");
  std::vector<double> rates(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    rates[static_cast<std::size_t>(j)] = std::pow(k, j) + offset;
    if (rates[static_cast<std::size_t>(j)] <= 0.0)
      throw std::invalid_argument("sweep rates: k^" + std::to_string(j) + " + offset is not positive");
  }
  return rates;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, Exec exec) {
  if (config.n_list.empty() || config.m_list.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  for (int n : config.n_list)
    if (n < 2) throw std::invalid_argument("run_sweep: pools need at least 2 agents");
  for (int m : config.m_list)
    if (m < 2) throw std::invalid_argument("run_sweep: menus need at least 2 processes");

  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (int n : config.n_list) {
    for (int m : config.m_list) {
      const dist::Rates rates(sweep_rates(config.k, config.offset, m));
      game::PayoffTensor tensor;
      if (config.samples <= 0) {
        tensor = game::exact_payoff_tensor(n, game::induced_outcome_distribution(rates), exec,
                                           config.max_entries);
      } else {
        tensor = game::mc_payoff_tensor(n, rates, config.samples,
                                        rng::derive_seed(config.seed, 0x7E25 + cell), exec,
                                        config.max_entries);
      }
      const auto metric = solver::diversification_metric(
          tensor, config.t, rng::derive_seed(config.seed, cell), exec);
      for (int j = 0; j < m; ++j)
        rows.push_back({n, m, j + 1, metric.avg_probs[static_cast<std::size_t>(j)],
                        metric.dispersion[static_cast<std::size_t>(j)]});
      ++cell;
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepConfig& config,
                     const std::vector<SweepRow>& rows) {
  io::write_config_header(
      os, "sweep",
      {{"n_list", join_ints(config.n_list)},
       {"m_list", join_ints(config.m_list)},
       {"k", io::format_double(config.k)},
       {"offset", io::format_double(config.offset)},
       {"t", std::to_string(config.t)},
       {"seed", std::to_string(config.seed)},
       {"tensor", config.samples <= 0 ? "exact" : "mc"},
       {"samples", std::to_string(config.samples < 0 ? 0 : config.samples)}});
  os << "n,m,process,avg_prob,stddev\n";
  for (const auto& row : rows)
    os << row.n << ',' << row.m << ',' << row.process << ',' << io::format_double(row.avg_prob)
       << ',' << io::format_double(row.stddev) << '\n';
}

}  // namespace pools::sweep
