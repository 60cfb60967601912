#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pxlogit/coord_descent.hpp"

namespace pxlogit::bench {

// The tuning sequence of the high-dimensional protocol. Its eighth value is
// not recoverable from the source; 0.5 stands in for it.
std::vector<double> madelon_eta_path();
constexpr double kSubstituteEta8 = 0.5;

struct BenchConfig {
  std::vector<std::string> solvers{"em", "px_ecme"};
  std::string penalty = "none";
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double tol = 1e-7;
  long max_iter = 100000;
  int reps = 1;
  std::uint64_t seed = 1;
  std::string init = "zeros";  // zeros | random_normal
  std::string generator = "ar1";  // ar1 | table1 | csv | pseudo
  std::string data;  // CSV dataset, or covariate table for the pseudo generator
  Index n = 500;
  Index p = 5;
  double rho = 0.0;
  std::string weights = "unit";  // unit | exp
  std::vector<double> lambda_path;  // empty: single fit per replication
  std::string out = "bench_out";
  Index block_size = 0;
  std::string weight_mode = "em";
  bool write_traces = true;
};

// Applies one key=value setting; keys mirror the CLI flag names (dashes or
// underscores). Unknown keys throw.
void apply_setting(BenchConfig& cfg, const std::string& key, const std::string& value);

// Flat key=value file; '#' starts a comment.
void load_config_file(BenchConfig& cfg, const std::string& path);

void validate(const BenchConfig& cfg);

// Penalty for one fit: lambda overrides the configured strength for l1, l2,
// scad (lambda1, lambda2, lambda) and elastic_net (lambda1).
Penalty make_penalty(const BenchConfig& cfg, double lambda);
Penalty make_penalty(const BenchConfig& cfg);

}  // namespace pxlogit::bench
