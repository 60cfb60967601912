#include "pxlogit/bench/benchmark.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "pxlogit/bench/csv_io.hpp"
#include "pxlogit/bench/generators.hpp"
#include "pxlogit/bench/rng.hpp"

namespace pxlogit::bench {

namespace {

void write_summary_json(const std::string& path, const std::vector<SummaryRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SummaryRow& r : rows)
    arr.push_back({{"method", r.method},
                   {"median_iter", r.median_iter},
                   {"mean_iter", r.mean_iter},
                   {"sd_iter", r.sd_iter},
                   {"median_sec", r.median_sec},
                   {"mean_sec", r.mean_sec},
                   {"mean_final_loglik", r.mean_final_loglik},
                   {"not_converged", r.not_converged}});
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  f << arr.dump(2) << '\n';
}

constexpr std::uint64_t kWeightSalt = 0x5EEDBA5E00000001ULL;
constexpr std::uint64_t kInitSalt = 0x5EEDBA5E00000002ULL;

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Index find_column(const std::vector<std::string>& names, std::initializer_list<const char*> wanted) {
  for (size_t c = 0; c < names.size(); ++c)
    for (const char* w : wanted)
      if (lower(names[c]) == w) return static_cast<Index>(c);
  return -1;
}

}  // namespace

RunRecord record_from_trace(const std::vector<TraceRow>& trace, double tol) {
  RunRecord r;
  if (trace.empty()) return r;
  const TraceRow& last = trace.back();
  r.iterations = last.iter;
  r.seconds = 0.0;
  for (const auto& row : trace) r.seconds += row.elapsed_sec;
  r.final_loglik = last.loglik;
  r.converged = last.iter >= 1 && last.step_norm < tol && std::isfinite(last.penalized_loglik);
  return r;
}

SummaryRow summarize(const std::string& method, const std::vector<RunRecord>& runs) {
  SummaryRow s;
  s.method = method;
  if (runs.empty()) return s;
  std::vector<double> it, sec;
  double ll = 0.0;
  for (const auto& r : runs) {
    it.push_back(static_cast<double>(r.iterations));
    sec.push_back(r.seconds);
    ll += r.final_loglik;
    if (!r.converged) ++s.not_converged;
  }
  const double n = static_cast<double>(runs.size());
  s.median_iter = median(it);
  s.mean_iter = std::accumulate(it.begin(), it.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : it) ss += (x - s.mean_iter) * (x - s.mean_iter);
  s.sd_iter = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.median_sec = median(sec);
  s.mean_sec = std::accumulate(sec.begin(), sec.end(), 0.0) / n;
  s.mean_final_loglik = ll / n;
  return s;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "method,median_iter,mean_iter,sd_iter,median_sec,mean_sec,mean_final_loglik,not_converged\n";
  for (const auto& r : rows) {
    out += r.method + ',' + format_fixed4(r.median_iter) + ',' + format_fixed4(r.mean_iter) + ',' +
           format_fixed4(r.sd_iter) + ',' + format_fixed4(r.median_sec) + ',' + format_fixed4(r.mean_sec) + ',' +
           format_fixed4(r.mean_final_loglik) + ',' + std::to_string(r.not_converged) + '\n';
  }
  return out;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot write '" + path + "'");
  out << summary_csv(rows);
}

std::string trace_filename(const std::string& method, int rep, int path_index) {
  std::string name = method + "_rep" + std::to_string(rep);
  if (path_index >= 0) name += "_eta" + std::to_string(path_index + 1);
  return name + ".csv";
}

SolveResult fit_one(const Dataset& d, const std::string& solver, const Penalty& pen, const Coefficients& beta0,
                    const BenchConfig& cfg) {
  if (solver == "cd" || solver == "cd_plain") {
    CDConfig cd;
    switch (pen.kind()) {
      case PenaltyKind::none: break;
      case PenaltyKind::l1: cd.lambda1 = pen.lambda1(); break;
      case PenaltyKind::l2: cd.lambda2 = pen.lambda2(); break;
      case PenaltyKind::elastic_net:
        cd.lambda1 = pen.lambda1();
        cd.lambda2 = pen.lambda2();
        break;
      case PenaltyKind::scad: throw InvalidInput("coordinate descent supports the elastic-net family only");
    }
    cd.block_size = cfg.block_size;
    cd.weight_mode = parse_weight_mode(cfg.weight_mode);
    cd.tol = cfg.tol;
    cd.max_cycles = cfg.max_iter;
    cd.expansion_on = solver == "cd";
    return cd_solve(d, cd, beta0);
  }
  SolverConfig sc;
  sc.tol = cfg.tol;
  sc.max_iter = cfg.max_iter;
  return run(d, pen, parse_solver_kind(solver), beta0, sc);
}

Dataset replication_data(const BenchConfig& cfg, int rep) {
  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
  std::optional<Dataset> d;
  if (cfg.generator == "ar1") {
    d = gen_ar1(cfg.n, cfg.p, cfg.rho, seed).data;
  } else if (cfg.generator == "table1") {
    d = builtin_table1();
  } else if (cfg.generator == "csv") {
    d = load_dataset_csv(cfg.data);
  } else if (cfg.generator == "pseudo") {
    const NumericTable t = load_numeric_table(cfg.data);
    const Index num = find_column(t.names, {"number", "num"});
    const Index start = find_column(t.names, {"start"});
    if (num < 0 || start < 0) throw InvalidInput(cfg.data + ": covariate table needs 'number' and 'start' columns");
    d = gen_pseudo_outcomes(t.values, num, start, seed);
  } else {
    throw InvalidInput("unknown generator '" + cfg.generator + "'");
  }
  if (cfg.weights == "exp") return d->with_weights(gen_exp_weights(d->n(), seed ^ kWeightSalt));
  return std::move(*d);
}

Coefficients initial_beta(const BenchConfig& cfg, Index p, int rep) {
  if (cfg.init == "zeros") return Vector::Zero(p);
  Rng rng((cfg.seed + static_cast<std::uint64_t>(rep)) ^ kInitSalt);
  Coefficients b(p);
  for (Index j = 0; j < p; ++j) b[j] = rng.normal();
  return b;
}

BenchOutput run_benchmark(const BenchConfig& cfg) {
  validate(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.out);
  const fs::path trace_dir = out_dir / "traces";
  fs::create_directories(cfg.write_traces ? trace_dir : out_dir);

  BenchOutput out;
  std::map<std::string, std::vector<RunRecord>> by_method;
  const bool path_mode = !cfg.lambda_path.empty();
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const Dataset d = replication_data(cfg, rep);
    for (const auto& solver : cfg.solvers) {
      Coefficients beta = initial_beta(cfg, d.p(), rep);
      const size_t points = path_mode ? cfg.lambda_path.size() : 1;
      for (size_t k = 0; k < points; ++k) {
        const Penalty pen = path_mode ? make_penalty(cfg, cfg.lambda_path[k]) : make_penalty(cfg);
        SolveResult res;
        try {
          res = fit_one(d, solver, pen, beta, cfg);
        } catch (const std::exception& e) {
          res.failed = true;
          res.message = e.what();
          res.beta_hat = beta;
        }
        const int pidx = path_mode ? static_cast<int>(k) : -1;
        if (cfg.write_traces) write_trace_csv((trace_dir / trace_filename(solver, rep, pidx)).string(), res.trace);
        RunRecord rec = record_from_trace(res.trace, cfg.tol);
        rec.method = solver;
        rec.rep = rep;
        rec.path_index = pidx;
        by_method[solver].push_back(rec);
        out.runs.push_back(rec);
        // warm start along the path
        if (res.beta_hat.size() == d.p() && res.beta_hat.allFinite()) beta = res.beta_hat;
      }
    }
  }
  for (const auto& solver : cfg.solvers) out.summary.push_back(summarize(solver, by_method[solver]));
  out.summary_path = (out_dir / "summary.csv").string();
  write_summary_csv(out.summary_path, out.summary);
  write_summary_json((out_dir / "summary.json").string(), out.summary);
  return out;
}

}  // namespace pxlogit::bench
