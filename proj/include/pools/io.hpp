#pragma once

// JSON and CSV serialization for the library types. JSON documents use
// 1-based process keys; CSV emitters quote per RFC 4180 and echo the
// generating configuration in `# key=value` header lines.

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pools/analytic.hpp"
#include "pools/dist.hpp"
#include "pools/game.hpp"
#include "pools/solver.hpp"

namespace pools::io {

using json = nlohmann::json;

json comparison_to_json(const dist::ComparisonProbs& cp);
json tensor_to_json(const game::PayoffTensor& tensor);
game::PayoffTensor tensor_from_json(const json& doc);
json equilibrium_to_json(const solver::EquilibriumResult& result);
json symmetric_search_to_json(const solver::SymmetricSearchResult& search);
json metric_to_json(const solver::DiversificationMetric& metric);
json symmetric_equilibria_to_json(const std::vector<analytic::SymmetricEquilibrium>& eqs);

// Quotes a field when it contains a comma, quote, or newline.
std::string csv_field(const std::string& raw);

// Shortest representation that is stable across runs; 12 significant digits.
std::string format_double(double v);

void write_config_header(std::ostream& os, const std::string& command,
                         const std::vector<std::pair<std::string, std::string>>& config);

}  // namespace pools::io
