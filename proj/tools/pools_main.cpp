#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pools/analytic.hpp"
#include "pools/dist.hpp"
#include "pools/errors.hpp"
#include "pools/game.hpp"
#include "pools/io.hpp"
#include "pools/solver.hpp"
#include "pools/sweep.hpp"

namespace {

using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
  file << text;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("need at least 1 grid point");
  if (points == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

int config_int(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  int parsed = 0;
  try {
    parsed = std::stoi(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument("sweep config: bad integer '" + value + "' for " + key);
  return parsed;
}

double config_double(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument("sweep config: bad number '" + value + "' for " + key);
  return parsed;
}

std::vector<int> config_int_list(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(config_int(trim(item), key));
  if (out.empty()) throw std::invalid_argument("sweep config: empty list for " + key);
  return out;
}

std::uint64_t config_uint64(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  std::uint64_t parsed = 0;
  try {
    parsed = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || value.empty())
    throw std::invalid_argument("sweep config: bad seed '" + value + "' for " + key);
  return parsed;
}

bool config_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("sweep config: bad boolean '" + value + "' for " + key);
}

// Applies a key=value config file to the sweep options. Keys are the long
// option names (dash and underscore spellings both accepted, so an emitted
// CSV header round-trips); options given on the command line keep
// precedence, and a samples/exact conflict inside the file is an error.
void apply_sweep_config_file(const std::string& path, const CLI::App& sweep_cmd,
                             pools::sweep::SweepConfig& config, double& samples, bool& exact,
                             std::string& out) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot open config file: " + path);

  const bool cli_samples = sweep_cmd.count("--samples") > 0;
  const bool cli_exact = sweep_cmd.count("--exact") > 0;
  bool file_samples = false;
  bool file_exact = false;

  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("sweep config: line " + std::to_string(line_no) +
                                  " is not key=value");
    std::string key = trim(line.substr(0, eq));
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n-list") {
      if (sweep_cmd.count("--n-list") == 0) config.n_list = config_int_list(value, key);
    } else if (key == "m-list") {
      if (sweep_cmd.count("--m-list") == 0) config.m_list = config_int_list(value, key);
    } else if (key == "k") {
      if (sweep_cmd.count("--k") == 0) config.k = config_double(value, key);
    } else if (key == "offset") {
      if (sweep_cmd.count("--offset") == 0) config.offset = config_double(value, key);
    } else if (key == "t") {
      if (sweep_cmd.count("--t") == 0) config.t = config_int(value, key);
    } else if (key == "seed") {
      if (sweep_cmd.count("--seed") == 0) config.seed = config_uint64(value, key);
    } else if (key == "samples") {
      if (!cli_samples && !cli_exact) {
        samples = config_double(value, key);
        file_samples = samples > 0.0;
      }
    } else if (key == "exact") {
      if (!cli_samples && !cli_exact) {
        exact = config_bool(value, key);
        file_exact = exact;
      }
    } else if (key == "out") {
      if (sweep_cmd.count("--out") == 0) out = value;
    } else {
      throw std::invalid_argument("sweep config: unknown key '" + key + "'");
    }
  }
  if (file_samples && file_exact)
    throw std::invalid_argument("sweep config: samples and exact are mutually exclusive");
}

struct CompareArgs {
  double l1 = 0.0, l2 = 0.0, tol = pools::dist::kDefaultTol;
  std::string out;
};

struct BoundaryArgs {
  std::vector<int> n_list;
  double l1_min = 0.1, l1_max = 10.0, tol = 1e-8;
  int points = 200;
  std::string out;
};

struct SymmetricEqArgs {
  int n = 3;
  double c = 0.0, l1 = 0.0, l2 = 0.0;
  std::string out;
};

struct ConjectureArgs {
  int n = 3;
  int points = 50;
  double c_min = 0.0, c_max = 0.0;
  std::string out;
};

struct PayoffArgs {
  int n = 2;
  std::vector<double> rates;
  double samples = 0.0;
  std::uint64_t seed = 1;
  double tol = pools::dist::kDefaultTol;
  std::string out;
};

void run_compare(const CompareArgs& args) {
  const auto cp = pools::dist::compare(args.l1, args.l2, args.tol);
  json doc = pools::io::comparison_to_json(cp);
  doc["config"] = {{"command", "compare"}, {"l1", args.l1}, {"l2", args.l2}, {"tol", args.tol}};
  emit(doc.dump(2) + "\n", args.out);
}

void run_boundary(const BoundaryArgs& args) {
  if (!(args.l1_min > 0.0) || !(args.l1_max >= args.l1_min))
    throw std::invalid_argument("boundary: need 0 < --l1-min <= --l1-max");
  const auto grid = linspace(args.l1_min, args.l1_max, args.points);
  std::ostringstream os;
  pools::io::write_config_header(os, "boundary",
                                 {{"n_list", join_ints(args.n_list)},
                                  {"l1_min", pools::io::format_double(args.l1_min)},
                                  {"l1_max", pools::io::format_double(args.l1_max)},
                                  {"points", std::to_string(args.points)},
                                  {"tol_lambda", pools::io::format_double(args.tol)}});
  os << "n,lambda1,lambda2_star\n";
  for (int n : args.n_list) {
    const auto curve = pools::analytic::boundary_curve(n, grid, args.tol);
    for (const auto& point : curve) {
      os << n << ',' << pools::io::format_double(point.lambda1) << ',';
      if (point.lambda2_star) os << pools::io::format_double(*point.lambda2_star);
      os << '\n';
    }
  }
  emit(os.str(), args.out);
}

void run_symmetric_eq(const SymmetricEqArgs& args, bool has_c, bool has_rates) {
  if (has_c == has_rates)
    throw std::invalid_argument("symmetric-eq: pass either --c or both --l1 and --l2");
  double c = args.c;
  json config{{"command", "symmetric-eq"}, {"n", args.n}};
  if (has_rates) {
    const auto cp = pools::dist::compare(args.l1, args.l2);
    c = cp.odds_ratio;
    config["l1"] = args.l1;
    config["l2"] = args.l2;
  }
  config["c"] = c;
  const auto eqs = pools::analytic::symmetric_equilibria_two_process(args.n, c);
  json doc{{"config", config}, {"equilibria", pools::io::symmetric_equilibria_to_json(eqs)}};
  emit(doc.dump(2) + "\n", args.out);
}

void run_conjecture(const ConjectureArgs& args, bool has_range) {
  if (args.n < 3) throw std::invalid_argument("conjecture: need at least 3 agents");
  std::vector<double> grid;
  if (has_range) {
    grid = linspace(args.c_min, args.c_max, args.points);
  } else {
    // Midpoint grid spanning the interior regime without touching its edges.
    const double lo = 1.0 / (args.n - 1);
    const double hi = static_cast<double>(args.n - 1);
    grid.resize(static_cast<std::size_t>(args.points));
    for (int i = 0; i < args.points; ++i)
      grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / args.points;
  }
  const auto report = pools::analytic::conjecture_probe(args.n, grid);
  std::ostringstream os;
  pools::io::write_config_header(
      os, "conjecture",
      {{"n", std::to_string(args.n)},
       {"points", std::to_string(args.points)},
       {"c_min", pools::io::format_double(grid.front())},
       {"c_max", pools::io::format_double(grid.back())},
       {"unique_everywhere", report.unique_everywhere ? "true" : "false"},
       {"strictly_increasing", report.strictly_increasing ? "true" : "false"}});
  os << "c,s1,root_count\n";
  for (const auto& point : report.points)
    os << pools::io::format_double(point.c) << ',' << pools::io::format_double(point.s1) << ','
       << point.root_count << '\n';
  emit(os.str(), args.out);
}

void run_sweep_cmd(const pools::sweep::SweepConfig& config, const std::string& out) {
  const auto rows = pools::sweep::run_sweep(config);
  std::ostringstream os;
  pools::sweep::write_sweep_csv(os, config, rows);
  emit(os.str(), out);
}

void run_payoff(const PayoffArgs& args) {
  if (!(args.samples >= 0.0) || !std::isfinite(args.samples))
    throw std::invalid_argument("payoff: bad --samples");
  const pools::dist::Rates rates(args.rates);
  pools::game::PayoffTensor tensor;
  json config{{"command", "payoff"}, {"n", args.n}, {"rates", args.rates}};
  if (args.samples > 0.0) {
    const auto samples = static_cast<long long>(args.samples);
    tensor = pools::game::mc_payoff_tensor(args.n, rates, samples, args.seed);
    config["samples"] = samples;
    config["seed"] = args.seed;
  } else {
    tensor = pools::game::exact_payoff_tensor(
        args.n, pools::game::induced_outcome_distribution(rates, args.tol));
    config["tol"] = args.tol;
  }
  json doc = pools::io::tensor_to_json(tensor);
  doc["config"] = config;
  emit(doc.dump(2) + "\n", args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"winners-take-all pools over independent Poisson processes"};
  app.require_subcommand(1);

  CompareArgs compare_args;
  auto* compare_cmd =
      app.add_subcommand("compare", "outcome probabilities of one process against another");
  compare_cmd->add_option("--l1", compare_args.l1, "rate of the first process")->required();
  compare_cmd->add_option("--l2", compare_args.l2, "rate of the second process")->required();
  compare_cmd->add_option("--tol", compare_args.tol, "series truncation tolerance");
  compare_cmd->add_option("--out", compare_args.out, "output file (default stdout)");

  BoundaryArgs boundary_args;
  auto* boundary_cmd =
      app.add_subcommand("boundary", "break-even second rate across a grid of first rates");
  boundary_cmd->add_option("--n-list", boundary_args.n_list, "pool sizes")
      ->required()
      ->delimiter(',');
  boundary_cmd->add_option("--l1-min", boundary_args.l1_min, "grid start");
  boundary_cmd->add_option("--l1-max", boundary_args.l1_max, "grid end");
  boundary_cmd->add_option("--points", boundary_args.points, "grid resolution");
  boundary_cmd->add_option("--tol", boundary_args.tol, "bisection tolerance on the rate");
  boundary_cmd->add_option("--out", boundary_args.out, "output file (default stdout)");

  SymmetricEqArgs symeq_args;
  auto* symeq_cmd = app.add_subcommand(
      "symmetric-eq", "symmetric equilibria of the two-process game");
  symeq_cmd->add_option("--n", symeq_args.n, "pool size")->required();
  auto* symeq_c = symeq_cmd->add_option("--c", symeq_args.c, "odds ratio p_gt / p_lt");
  auto* symeq_l1 = symeq_cmd->add_option("--l1", symeq_args.l1, "rate of the first process");
  symeq_cmd->add_option("--l2", symeq_args.l2, "rate of the second process");
  symeq_cmd->add_option("--out", symeq_args.out, "output file (default stdout)");

  ConjectureArgs conjecture_args;
  auto* conjecture_cmd = app.add_subcommand(
      "conjecture", "uniqueness and monotonicity scan of the interior equilibrium");
  conjecture_cmd->add_option("--n", conjecture_args.n, "pool size")->required();
  conjecture_cmd->add_option("--points", conjecture_args.points, "grid resolution");
  auto* conj_cmin = conjecture_cmd->add_option("--c-min", conjecture_args.c_min, "grid start");
  conjecture_cmd->add_option("--c-max", conjecture_args.c_max, "grid end")->needs(conj_cmin);
  conjecture_cmd->add_option("--out", conjecture_args.out, "output file (default stdout)");

  pools::sweep::SweepConfig sweep_config;
  double sweep_samples = 0.0;
  bool sweep_exact = false;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "equilibrium diversification across pool sizes and process menus");
  sweep_cmd->add_option("--n-list", sweep_config.n_list, "pool sizes")->delimiter(',');
  sweep_cmd->add_option("--m-list", sweep_config.m_list, "menu sizes")->delimiter(',');
  sweep_cmd->add_option("--k", sweep_config.k, "geometric rate profile base");
  sweep_cmd->add_option("--offset", sweep_config.offset, "rate profile offset");
  sweep_cmd->add_option("--t", sweep_config.t, "dynamics runs per grid point");
  sweep_cmd->add_option("--seed", sweep_config.seed, "master seed");
  auto* sweep_samples_opt =
      sweep_cmd->add_option("--samples", sweep_samples, "Monte Carlo samples per tensor");
  sweep_cmd->add_flag("--exact", sweep_exact, "force exact tensors (the default)")
      ->excludes(sweep_samples_opt);
  sweep_cmd->add_option("--out", sweep_out, "output file (default stdout)");
  std::string sweep_config_path;
  sweep_cmd->add_option("--config", sweep_config_path, "key=value file with the options above");

  PayoffArgs payoff_args;
  auto* payoff_cmd = app.add_subcommand("payoff", "payoff tensor for given rates");
  payoff_cmd->add_option("--n", payoff_args.n, "pool size")->required();
  payoff_cmd->add_option("--rates", payoff_args.rates, "process rates")
      ->required()
      ->delimiter(',');
  payoff_cmd->add_option("--samples", payoff_args.samples,
                         "Monte Carlo samples (omit for the exact tensor)");
  payoff_cmd->add_option("--seed", payoff_args.seed, "Monte Carlo seed");
  payoff_cmd->add_option("--tol", payoff_args.tol, "exact-tensor truncation tolerance");
  payoff_cmd->add_option("--out", payoff_args.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (compare_cmd->parsed()) run_compare(compare_args);
    if (boundary_cmd->parsed()) run_boundary(boundary_args);
    if (symeq_cmd->parsed())
      run_symmetric_eq(symeq_args, symeq_c->count() > 0, symeq_l1->count() > 0);
    if (conjecture_cmd->parsed()) run_conjecture(conjecture_args, conj_cmin->count() > 0);
    if (sweep_cmd->parsed()) {
      if (!sweep_config_path.empty())
        apply_sweep_config_file(sweep_config_path, *sweep_cmd, sweep_config, sweep_samples,
                                sweep_exact, sweep_out);
      if (sweep_config.n_list.empty())
        throw std::invalid_argument("sweep: --n-list is required (flag or config file)");
      if (sweep_config.m_list.empty())
        throw std::invalid_argument("sweep: --m-list is required (flag or config file)");
      if (sweep_samples > 0.0) sweep_config.samples = static_cast<long long>(sweep_samples);
      run_sweep_cmd(sweep_config, sweep_out);
    }
    if (payoff_cmd->parsed()) run_payoff(payoff_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pools::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const pools::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
