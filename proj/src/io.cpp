#include "pools/io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pools::io {

namespace {

std::string process_key(int j) { return std::to_string(j + 1); }

}  // namespace

json comparison_to_json(const dist::ComparisonProbs& cp) {
  return json{{"p_gt", cp.p_gt}, {"p_lt", cp.p_lt}, {"p_eq", cp.p_eq},
              {"odds_ratio", cp.odds_ratio}};
}

json tensor_to_json(const game::PayoffTensor& tensor) {
  json entries = json::array();
  for (const auto& e : tensor.entries) {
    json payoffs = json::object();
    json stderrs = json::object();
    for (int j = 0; j < tensor.m; ++j) {
      if (e.counts[static_cast<std::size_t>(j)] == 0) continue;
      payoffs[process_key(j)] = e.payoffs[static_cast<std::size_t>(j)];
      if (!e.stderrs.empty()) stderrs[process_key(j)] = e.stderrs[static_cast<std::size_t>(j)];
    }
    json entry{{"counts", e.counts}, {"payoffs", payoffs}};
    if (!e.stderrs.empty()) entry["stderr"] = stderrs;
    entries.push_back(std::move(entry));
  }
  return json{{"n", tensor.n}, {"m", tensor.m}, {"entries", entries}};
}

game::PayoffTensor tensor_from_json(const json& doc) {
  game::PayoffTensor tensor;
  tensor.n = doc.at("n").get<int>();
  tensor.m = doc.at("m").get<int>();
  if (tensor.n < 2 || tensor.m < 1) throw std::invalid_argument("tensor_from_json: bad header");
  const auto& entries = doc.at("entries");
  tensor.entries.reserve(entries.size());
  for (const auto& item : entries) {
    game::PayoffTensor::Entry e;
    e.counts = item.at("counts").get<std::vector<int>>();
    if (static_cast<int>(e.counts.size()) != tensor.m)
      throw std::invalid_argument("tensor_from_json: count vector over wrong m");
    e.payoffs.assign(static_cast<std::size_t>(tensor.m),
                     std::numeric_limits<double>::quiet_NaN());
    const bool has_err = item.contains("stderr");
    if (has_err)
      e.stderrs.assign(static_cast<std::size_t>(tensor.m),
                       std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < tensor.m; ++j) {
      if (e.counts[static_cast<std::size_t>(j)] == 0) continue;
      e.payoffs[static_cast<std::size_t>(j)] = item.at("payoffs").at(process_key(j)).get<double>();
      if (has_err)
        e.stderrs[static_cast<std::size_t>(j)] = item.at("stderr").at(process_key(j)).get<double>();
    }
    tensor.entries.push_back(std::move(e));
  }
  // Entries must cover every count vector in enumeration order.
  const auto expect = game::enumerate_count_vectors(tensor.n, tensor.m);
  if (expect.size() != tensor.entries.size())
    throw std::invalid_argument("tensor_from_json: wrong entry count");
  for (std::size_t i = 0; i < expect.size(); ++i)
    if (expect[i] != tensor.entries[i].counts)
      throw std::invalid_argument("tensor_from_json: entries out of order");
  return tensor;
}

json equilibrium_to_json(const solver::EquilibriumResult& result) {
  json profile = json::array();
  for (const auto& s : result.profile) profile.push_back(s.probs);
  return json{{"profile", profile},       {"regret", result.regret},
              {"converged", result.converged}, {"symmetric", result.symmetric},
              {"iterations", result.iterations}, {"seed", result.seed}};
}

json symmetric_search_to_json(const solver::SymmetricSearchResult& search) {
  json eqs = json::array();
  for (const auto& r : search.equilibria) eqs.push_back(equilibrium_to_json(r));
  return json{{"equilibria", eqs},
              {"starts", search.starts},
              {"converged", search.converged},
              {"total_iterations", search.total_iterations}};
}

json metric_to_json(const solver::DiversificationMetric& metric) {
  return json{{"avg_probs", metric.avg_probs},
              {"t", metric.t},
              {"converged_runs", metric.converged_runs},
              {"per_run", metric.per_run},
              {"dispersion", metric.dispersion}};
}

json symmetric_equilibria_to_json(const std::vector<analytic::SymmetricEquilibrium>& eqs) {
  json out = json::array();
  for (const auto& eq : eqs)
    out.push_back(json{
        {"s1", eq.s1},
        {"kind", eq.kind == analytic::EquilibriumKind::PureFavorite ? "pure_favorite" : "interior"},
        {"residual", eq.residual}});
  return out;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char ch : raw) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_config_header(std::ostream& os, const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& config) {
  os << "# pools " << command << "\n";
  for (const auto& [key, value] : config) os << "# " << key << "=" << value << "\n";
}

}  // namespace pools::io
