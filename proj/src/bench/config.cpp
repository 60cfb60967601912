#include "pxlogit/bench/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pxlogit::bench {

std::vector<double> madelon_eta_path() { return {5000, 1000, 500, 200, 50, 10, 2, kSubstituteEta8, 0.1}; }

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InvalidInput("setting '" + key + "': not a number: " + v);
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    // allow forms such as 1e5
    const double d = to_double(key, v);
    if (d != static_cast<double>(static_cast<long long>(d))) throw InvalidInput("setting '" + key + "': not an integer: " + v);
    return static_cast<long long>(d);
  }
  return x;
}

}  // namespace

void apply_setting(BenchConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string v = trim(raw_value);
  if (key == "solver" || key == "solvers") cfg.solvers = split_list(v);
  else if (key == "penalty") cfg.penalty = v;
  else if (key == "lambda1") cfg.lambda1 = to_double(key, v);
  else if (key == "lambda2") cfg.lambda2 = to_double(key, v);
  else if (key == "tol") cfg.tol = to_double(key, v);
  else if (key == "max-iter") cfg.max_iter = static_cast<long>(to_integer(key, v));
  else if (key == "reps") cfg.reps = static_cast<int>(to_integer(key, v));
  else if (key == "seed") {
    std::uint64_t s;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), s);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw InvalidInput("setting 'seed': not an unsigned integer: " + v);
    cfg.seed = s;
  } else if (key == "init") cfg.init = v;
  else if (key == "generator") cfg.generator = v;
  else if (key == "data") cfg.data = v;
  else if (key == "n") cfg.n = static_cast<Index>(to_integer(key, v));
  else if (key == "p") cfg.p = static_cast<Index>(to_integer(key, v));
  else if (key == "rho") cfg.rho = to_double(key, v);
  else if (key == "weights") cfg.weights = v;
  else if (key == "lambda-path") {
    cfg.lambda_path.clear();
    if (v == "madelon") {
      cfg.lambda_path = madelon_eta_path();
    } else {
      for (const auto& item : split_list(v)) cfg.lambda_path.push_back(to_double(key, item));
    }
  } else if (key == "out") cfg.out = v;
  else if (key == "block-size") cfg.block_size = static_cast<Index>(to_integer(key, v));
  else if (key == "weight-mode") cfg.weight_mode = v;
  else if (key == "write-traces") cfg.write_traces = (v == "1" || v == "true" || v == "yes");
  else throw InvalidInput("unknown setting '" + raw_key + "'");
}

void load_config_file(BenchConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput(path + ": line " + std::to_string(ln) + ": expected key=value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void validate(const BenchConfig& cfg) {
  if (cfg.solvers.empty()) throw InvalidInput("no solvers configured");
  if (!(cfg.tol > 0) || cfg.max_iter < 1 || cfg.reps < 1) throw InvalidInput("tol, max-iter and reps must be positive");
  if (cfg.init != "zeros" && cfg.init != "random_normal") throw InvalidInput("init must be zeros or random_normal");
  if (cfg.weights != "unit" && cfg.weights != "exp") throw InvalidInput("weights must be unit or exp");
  if (cfg.generator != "ar1" && cfg.generator != "table1" && cfg.generator != "csv" && cfg.generator != "pseudo")
    throw InvalidInput("generator must be ar1, table1, csv or pseudo");
  if ((cfg.generator == "csv" || cfg.generator == "pseudo") && cfg.data.empty())
    throw InvalidInput("generator '" + cfg.generator + "' needs --data");
  parse_penalty_kind(cfg.penalty);
  parse_weight_mode(cfg.weight_mode);
  for (const auto& s : cfg.solvers)
    if (s != "cd" && s != "cd_plain") parse_solver_kind(s);
}

Penalty make_penalty(const BenchConfig& cfg, double lambda) {
  switch (parse_penalty_kind(cfg.penalty)) {
    case PenaltyKind::none: return Penalty::none();
    case PenaltyKind::l1: return Penalty::l1(lambda);
    case PenaltyKind::l2: return Penalty::l2(lambda);
    case PenaltyKind::elastic_net: return Penalty::elastic_net(lambda, cfg.lambda2);
    case PenaltyKind::scad: return Penalty::scad(lambda);
  }
  return Penalty::none();
}

Penalty make_penalty(const BenchConfig& cfg) {
  const PenaltyKind k = parse_penalty_kind(cfg.penalty);
  return make_penalty(cfg, k == PenaltyKind::l2 ? cfg.lambda2 : cfg.lambda1);
}

}  // namespace pxlogit::bench
