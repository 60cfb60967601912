#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "pxlogit/bench/benchmark.hpp"
#include "pxlogit/bench/csv_io.hpp"
#include "pxlogit/bench/generators.hpp"
#include "pxlogit/bench/rng.hpp"

using namespace pxlogit;
using namespace pxlogit::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pxlogit_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

double column_corr(const Matrix& X, Index a, Index b) {
  const Vector x = X.col(a).array() - X.col(a).mean();
  const Vector y = X.col(b).array() - X.col(b).mean();
  return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

// Drops the elapsed_sec column.
std::string strip_elapsed(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << "\n";
  return out.str();
}

int run_cli(const std::string& args, const fs::path& capture) {
  const std::string cmd = std::string(PXLOGIT_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Table1Data, Contents) {
  const Dataset d = builtin_table1();
  EXPECT_EQ(d.n(), 7);
  EXPECT_EQ(d.p(), 2);
  EXPECT_NEAR(d.s().sum(), 1.0, 1e-15);
  EXPECT_EQ(d.X()(3, 1), 100.0);
  EXPECT_EQ(d.X()(2, 1), 0.001);
  EXPECT_EQ(d.y().sum(), 5.0);
  EXPECT_TRUE(d.unit_trials());
  EXPECT_NEAR(weighted_loglik(d, Vector::Zero(2)), -0.6931, 5e-5);
}

TEST(Ar1, IndependentColumns) {
  const SimulatedData sim = gen_ar1(2000, 5, 0.0, 11);
  const Matrix& X = sim.data.X();
  EXPECT_TRUE((X.col(0).array() == 1.0).all());
  for (Index j = 1; j + 1 < 5; ++j) EXPECT_LT(std::abs(column_corr(X, j, j + 1)), 3 / std::sqrt(2000.0));
  EXPECT_TRUE((sim.data.s().array() == 1.0).all());
  EXPECT_TRUE(sim.data.unit_trials());
}

TEST(Ar1, StronglyCorrelatedColumns) {
  const SimulatedData sim = gen_ar1(2000, 5, 0.99, 12);
  for (Index j = 1; j + 1 < 5; ++j) {
    const double r = column_corr(sim.data.X(), j, j + 1);
    EXPECT_GE(r, 0.97);
    EXPECT_LE(r, 1.0);
  }
}

TEST(Ar1, SparseHeavyTailedCoefficients) {
  int zeros = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const SimulatedData sim = gen_ar1(5, 10, 0.5, seed);
    for (Index j = 0; j < 10; ++j) zeros += sim.beta_true[j] == 0.0;
    total += 10;
  }
  // Bernoulli(0.75) inclusion: 3 sigma band around 0.25
  const double frac = static_cast<double>(zeros) / total;
  EXPECT_NEAR(frac, 0.25, 3 * std::sqrt(0.25 * 0.75 / total));
}

TEST(Ar1, Deterministic) {
  const SimulatedData a = gen_ar1(100, 4, 0.3, 99), b = gen_ar1(100, 4, 0.3, 99), c = gen_ar1(100, 4, 0.3, 100);
  EXPECT_EQ(a.data.X(), b.data.X());
  EXPECT_EQ(a.data.y(), b.data.y());
  EXPECT_EQ(a.beta_true, b.beta_true);
  EXPECT_NE(a.data.X(), c.data.X());
}

TEST(ExpWeights, MomentsAndDeterminism) {
  const Vector w = gen_exp_weights(100000, 5);
  EXPECT_GT(w.minCoeff(), 0.0);
  EXPECT_GE(w.mean(), 0.99);
  EXPECT_LE(w.mean(), 1.01);
  EXPECT_EQ(w, gen_exp_weights(100000, 5));
}

TEST(PseudoOutcomes, ProbabilityFollowsColumns) {
  bench::Rng rng(3);
  Matrix cov(4000, 3);
  for (Index i = 0; i < cov.rows(); ++i) {
    cov(i, 0) = 60 * rng.uniform();
    cov(i, 1) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    cov(i, 2) = rng.uniform() < 0.5 ? 0.0 : 1.0;
  }
  const Dataset d = gen_pseudo_outcomes(cov, 1, 2, 7);
  EXPECT_EQ(d.p(), 4);
  EXPECT_TRUE((d.X().col(0).array() == 1.0).all());
  // empirical frequency in each (num, start) cell against 1 / (1 + exp(-3 num + start))
  for (int num = 0; num <= 1; ++num)
    for (int start = 0; start <= 1; ++start) {
      double hits = 0, count = 0;
      for (Index i = 0; i < d.n(); ++i)
        if (d.X()(i, 2) == num && d.X()(i, 3) == start) {
          hits += d.y()[i];
          ++count;
        }
      const double p = 1 / (1 + std::exp(-3.0 * num + start));
      EXPECT_NEAR(hits / count, p, 4 * std::sqrt(p * (1 - p) / count)) << num << start;
    }
}

TEST(Csv, Table1RoundTripBitExact) {
  const fs::path dir = scratch_dir("roundtrip");
  const Dataset d = builtin_table1();
  write_csv((dir / "t1.csv").string(), d);
  const Dataset back = load_dataset_csv((dir / "t1.csv").string());
  EXPECT_EQ(back.X(), d.X());
  EXPECT_EQ(back.y(), d.y());
  EXPECT_EQ(back.m(), d.m());
  EXPECT_EQ(back.s(), d.s());
  fs::remove_all(dir);
}

TEST(Csv, RandomRoundTripBitExact) {
  const fs::path dir = scratch_dir("roundtrip2");
  Dataset d = gen_ar1(50, 4, 0.5, 3).data;
  d = d.with_weights(gen_exp_weights(50, 4));
  write_csv((dir / "d.csv").string(), d);
  const Dataset back = load_dataset_csv((dir / "d.csv").string());
  EXPECT_EQ(back.X(), d.X());
  EXPECT_EQ(back.s(), d.s());
  fs::remove_all(dir);
}

TEST(Csv, MissingValuesRouteToMissingDataset) {
  const fs::path dir = scratch_dir("missing");
  spit(dir / "m.csv", "y,m,s,x1,x2,x3\r\n1,1,1,1,NA,0\r\n0,1,0.5,1,1,NA\r\n");
  auto loaded = load_csv((dir / "m.csv").string());
  ASSERT_TRUE(std::holds_alternative<MissingDataset>(loaded));
  const MissingDataset& md = std::get<MissingDataset>(loaded);
  EXPECT_EQ(md.n(), 2);
  EXPECT_EQ(md.missing_count(), 2);
  write_csv((dir / "m2.csv").string(), md);
  auto again = load_csv((dir / "m2.csv").string());
  ASSERT_TRUE(std::holds_alternative<MissingDataset>(again));
  EXPECT_EQ(std::get<MissingDataset>(again).s(), md.s());
  fs::remove_all(dir);
}

TEST(Csv, ErrorsNameTheRow) {
  const fs::path dir = scratch_dir("errors");
  auto expect_error = [&](const std::string& body, const std::string& needle) {
    spit(dir / "bad.csv", body);
    try {
      load_csv((dir / "bad.csv").string());
      ADD_FAILURE() << "accepted: " << body;
    } catch (const std::exception& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("y,m,s,x1\n1,1,1,1\n2,1,1,1\n", "line 3");
  expect_error("y,m,s,x1\n1,1,-1,1\n", "line 2");
  expect_error("y,m,s,x1\n1,1,1,abc\n", "line 2");
  expect_error("y,m,x1\n1,1,1\n", "header");
  expect_error("y,m,s,x1\nNA,1,1,1\n", "line 2");
  fs::remove_all(dir);
}

TEST(Trace, RoundTrip) {
  const fs::path dir = scratch_dir("trace");
  std::vector<TraceRow> rows{{0, -1.0 / 3, -0.25, 0.0, 0.0}, {1, -0.1, 0.1 + 0.2, 1e-300, 0.5}};
  write_trace_csv((dir / "t.csv").string(), rows);
  EXPECT_EQ(slurp(dir / "t.csv").substr(0, 48), "iter,loglik,penalized_loglik,step_norm,elapsed_s");
  const auto back = read_trace_csv((dir / "t.csv").string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].penalized_loglik, -1.0 / 3);
  EXPECT_EQ(back[1].loglik, 0.1 + 0.2);
  EXPECT_EQ(back[1].step_norm, 1e-300);
  fs::remove_all(dir);
}

TEST(Summary, Statistics) {
  std::vector<RunRecord> runs{{"em", 0, -1, 10, 1.0, -3, true}, {"em", 1, -1, 20, 2.0, -5, true},
                              {"em", 2, -1, 60, 3.0, -4, false}};
  const SummaryRow s = summarize("em", runs);
  EXPECT_EQ(s.median_iter, 20);
  EXPECT_EQ(s.mean_iter, 30);
  EXPECT_NEAR(s.sd_iter, std::sqrt(700.0), 1e-12);
  EXPECT_EQ(s.median_sec, 2.0);
  EXPECT_EQ(s.mean_final_loglik, -4.0);
  EXPECT_EQ(s.not_converged, 1);
  EXPECT_EQ(summary_csv({s}).substr(0, 83),
            "method,median_iter,mean_iter,sd_iter,median_sec,mean_sec,mean_final_loglik,not_conv");
}

TEST(Config, FileThenOverrides) {
  const fs::path dir = scratch_dir("config");
  spit(dir / "c.txt", "# comment\nsolver = em,px_ecme\ntol=1e-9\nmax_iter=50\nlambda-path = madelon\n");
  BenchConfig cfg;
  load_config_file(cfg, (dir / "c.txt").string());
  EXPECT_EQ(cfg.solvers, (std::vector<std::string>{"em", "px_ecme"}));
  EXPECT_EQ(cfg.tol, 1e-9);
  EXPECT_EQ(cfg.max_iter, 50);
  EXPECT_EQ(cfg.lambda_path, madelon_eta_path());
  apply_setting(cfg, "tol", "1e-6");
  EXPECT_EQ(cfg.tol, 1e-6);
  EXPECT_THROW(apply_setting(cfg, "colour", "blue"), InvalidInput);
  EXPECT_THROW(apply_setting(cfg, "tol", "fast"), InvalidInput);
  fs::remove_all(dir);
}

TEST(Config, MadelonPath) {
  const auto path = madelon_eta_path();
  ASSERT_EQ(path.size(), 9u);
  EXPECT_EQ(path.front(), 5000.0);
  EXPECT_EQ(path[7], kSubstituteEta8);
  EXPECT_EQ(path.back(), 0.1);
  for (size_t k = 1; k < path.size(); ++k) EXPECT_LT(path[k], path[k - 1]);
}

TEST(Benchmark, Table1Protocol) {
  const fs::path dir = scratch_dir("t1bench");
  BenchConfig cfg;
  cfg.generator = "table1";
  cfg.solvers = {"px_ecme", "newton"};
  cfg.tol = 1e-9;
  cfg.out = dir.string();
  const BenchOutput out = run_benchmark(cfg);
  ASSERT_EQ(out.summary.size(), 2u);
  EXPECT_NEAR(out.summary[0].median_iter, 63, 3);
  EXPECT_EQ(out.summary[0].not_converged, 0);
  EXPECT_EQ(out.summary[1].not_converged, 1);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "traces" / "px_ecme_rep0.csv"));
  std::ifstream jf(dir / "summary.json");
  const nlohmann::json j = nlohmann::json::parse(jf);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["method"], "px_ecme");
  EXPECT_EQ(j[0]["median_iter"].get<double>(), out.summary[0].median_iter);
  EXPECT_EQ(j[1]["not_converged"].get<int>(), 1);
  fs::remove_all(dir);
}

TEST(Benchmark, DeterministicAndSummaryFromTraces) {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  BenchConfig cfg;
  cfg.solvers = {"em", "px_ecme", "gd_backtrack"};
  cfg.n = 120;
  cfg.p = 4;
  cfg.rho = 0.5;
  cfg.reps = 3;
  cfg.seed = 77;
  cfg.weights = "exp";
  cfg.init = "random_normal";
  cfg.out = a.string();
  const BenchOutput oa = run_benchmark(cfg);
  cfg.out = b.string();
  run_benchmark(cfg);
  for (const auto& entry : fs::directory_iterator(a / "traces")) {
    const fs::path other = b / "traces" / entry.path().filename();
    ASSERT_TRUE(fs::exists(other));
    EXPECT_EQ(strip_elapsed(slurp(entry.path())), strip_elapsed(slurp(other))) << entry.path();
  }
  // rebuild the summary from the trace files alone
  std::vector<SummaryRow> rebuilt;
  for (const std::string& method : cfg.solvers) {
    std::vector<RunRecord> runs;
    for (int r = 0; r < cfg.reps; ++r) {
      RunRecord rec = record_from_trace(read_trace_csv((a / "traces" / trace_filename(method, r, -1)).string()), cfg.tol);
      rec.method = method;
      rec.rep = r;
      runs.push_back(rec);
    }
    rebuilt.push_back(summarize(method, runs));
  }
  EXPECT_EQ(summary_csv(rebuilt), slurp(a / "summary.csv"));
  for (const SummaryRow& row : oa.summary) EXPECT_LE(row.mean_final_loglik, 0.0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Benchmark, ReplicationUsesSeedPlusR) {
  BenchConfig cfg;
  cfg.n = 30;
  cfg.p = 3;
  cfg.seed = 10;
  const Dataset r1 = replication_data(cfg, 1);
  cfg.seed = 11;
  const Dataset r0 = replication_data(cfg, 0);
  EXPECT_EQ(r1.X(), r0.X());
  EXPECT_EQ(r1.y(), r0.y());
}

TEST(Benchmark, LambdaPathWarmStarts) {
  const fs::path dir = scratch_dir("path");
  BenchConfig cfg;
  cfg.solvers = {"cd", "gpx"};
  cfg.penalty = "l1";
  cfg.n = 150;
  cfg.p = 6;
  cfg.lambda_path = {20, 5, 1};
  cfg.out = dir.string();
  const BenchOutput out = run_benchmark(cfg);
  EXPECT_EQ(out.runs.size(), 6u);
  for (const RunRecord& r : out.runs) EXPECT_TRUE(r.converged) << r.method << " " << r.path_index;
  EXPECT_TRUE(fs::exists(dir / "traces" / "cd_rep0_eta3.csv"));
  // the warm start means the second path point starts where the first ended
  const auto first = read_trace_csv((dir / "traces" / "cd_rep0_eta1.csv").string());
  const auto second = read_trace_csv((dir / "traces" / "cd_rep0_eta2.csv").string());
  EXPECT_EQ(first.back().loglik, second.front().loglik);
  fs::remove_all(dir);
}

TEST(Benchmark, FailuresDoNotAbort) {
  const fs::path dir = scratch_dir("fail");
  BenchConfig cfg;
  cfg.generator = "table1";
  cfg.solvers = {"newton", "em"};
  cfg.max_iter = 20;
  cfg.out = dir.string();
  const BenchOutput out = run_benchmark(cfg);
  ASSERT_EQ(out.summary.size(), 2u);
  EXPECT_EQ(out.summary[0].not_converged, 1);
  EXPECT_EQ(out.summary[1].not_converged, 1);
  fs::remove_all(dir);
}

TEST(Cli, Table1AndSolveSmoke) {
  const fs::path dir = scratch_dir("cli");
  EXPECT_EQ(run_cli("table1", dir / "t1.txt"), 0);
  const std::string t1 = slurp(dir / "t1.txt");
  EXPECT_NE(t1.find("-0.6931"), std::string::npos) << t1;
  EXPECT_NE(t1.find("4.39"), std::string::npos) << t1;

  EXPECT_EQ(run_cli("gen --generator table1 --out " + (dir / "t1.csv").string(), dir / "gen.txt"), 0);
  spit(dir / "cfg.txt", "solver=em\ntol=1e-3\n");
  EXPECT_EQ(run_cli("solve --config " + (dir / "cfg.txt").string() + " --solver px_ecme --tol 1e-9 --data " +
                        (dir / "t1.csv").string(),
                    dir / "solve.txt"),
            0);
  const std::string solve = slurp(dir / "solve.txt");
  EXPECT_NE(solve.find("px_ecme"), std::string::npos) << solve;
  EXPECT_NE(solve.find("iterations        6"), std::string::npos) << solve;

  EXPECT_NE(run_cli("solve --solver em --penalty l1 --lambda1 1 --data " + (dir / "t1.csv").string(), dir / "bad.txt"), 0);
  EXPECT_NE(slurp(dir / "bad.txt").find("error"), std::string::npos);
  EXPECT_EQ(run_cli("diagnose", dir / "diag.txt"), 0);
  fs::remove_all(dir);
}
