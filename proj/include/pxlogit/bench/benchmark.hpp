#pragma once

#include <string>
#include <vector>

#include "pxlogit/bench/config.hpp"
#include "pxlogit/solvers.hpp"

namespace pxlogit::bench {

struct RunRecord {
  std::string method;
  int rep = 0;
  int path_index = -1;  // -1 outside lambda-path mode
  long iterations = 0;
  double seconds = 0.0;
  double final_loglik = 0.0;
  bool converged = false;
};

struct SummaryRow {
  std::string method;
  double median_iter = 0.0;
  double mean_iter = 0.0;
  double sd_iter = 0.0;
  double median_sec = 0.0;
  double mean_sec = 0.0;
  double mean_final_loglik = 0.0;
  int not_converged = 0;
};

// Everything in a summary is derived from traces through this function, so
// summaries can be rebuilt from the trace files alone. A run counts as
// converged when its last recorded step is below tol.
RunRecord record_from_trace(const std::vector<TraceRow>& trace, double tol);
SummaryRow summarize(const std::string& method, const std::vector<RunRecord>& runs);

std::string summary_csv(const std::vector<SummaryRow>& rows);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

std::string trace_filename(const std::string& method, int rep, int path_index);

// Dispatches solver names, including the coordinate-descent variants "cd"
// (alpha expansion on) and "cd_plain" (off).
SolveResult fit_one(const Dataset& d, const std::string& solver, const Penalty& pen, const Coefficients& beta0,
                    const BenchConfig& cfg);

// Dataset for replication r.
Dataset replication_data(const BenchConfig& cfg, int rep);
Coefficients initial_beta(const BenchConfig& cfg, Index p, int rep);

struct BenchOutput {
  std::vector<SummaryRow> summary;
  std::vector<RunRecord> runs;
  std::string summary_path;
};

// Writes <out>/summary.csv, the same rows as <out>/summary.json, and, when
// enabled, <out>/traces/*.csv.
BenchOutput run_benchmark(const BenchConfig& cfg);

}  // namespace pxlogit::bench
