#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <utility>
#include <variant>

#include "pxlogit/bench/benchmark.hpp"
#include "pxlogit/bench/csv_io.hpp"
#include "pxlogit/bench/generators.hpp"
#include "pxlogit/diagnostics.hpp"
#include "pxlogit/missing.hpp"

using namespace pxlogit;
using namespace pxlogit::bench;

namespace {

// Flags shared with the key=value config file.
const std::pair<const char*, const char*> kSettingFlags[] = {
    {"solver", "comma-separated: em px_ecme newton mm mm_quarter px_mm px_mm_quarter gd gd_backtrack gpx aa1 cd cd_plain"},
    {"penalty", "none, l1, l2, elastic_net or scad"},
    {"lambda1", "l1 / elastic-net / scad strength"},
    {"lambda2", "l2 strength (ridge part of elastic_net)"},
    {"tol", "stop when the parameter change has L2 norm below this"},
    {"max-iter", "iteration budget"},
    {"seed", "64-bit seed; replication r uses seed + r"},
    {"init", "zeros or random_normal"},
    {"data", "CSV with header y,m,s,x1..xp (NA marks a missing binary covariate); covariate table for --generator pseudo"},
    {"out", "output directory"},
    {"reps", "replications"},
    {"block-size", "coordinate descent refresh block size k"},
    {"weight-mode", "coordinate descent weights: em or nr"},
    {"generator", "ar1, table1, csv or pseudo"},
    {"n", "ar1 observations"},
    {"p", "ar1 columns including the intercept"},
    {"rho", "ar1 adjacent-column correlation in [0, 1)"},
    {"weights", "unit or exp"},
    {"lambda-path", "comma-separated penalty path with warm starts, or 'madelon'"}};

struct SettingOptions {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  std::string config;

  void attach(CLI::App* app) {
    for (const auto& [name, help] : kSettingFlags)
      opts[name] = app->add_option(std::string("--") + name, values[name], help);
    app->add_option("--config", config, "key=value file; command-line flags take precedence");
  }

  BenchConfig resolve(BenchConfig base) const {
    if (!config.empty()) load_config_file(base, config);
    for (const auto& [name, opt] : opts)
      if (opt->count() > 0) apply_setting(base, name, values.at(name));
    return base;
  }
};

void print_result(const std::string& label, const SolveResult& r) {
  std::printf("solver            %s\n", label.c_str());
  std::printf("iterations        %ld\n", r.iterations);
  std::printf("converged         %s\n", r.converged ? "yes" : "no");
  if (r.diverged) std::printf("diverged          yes\n");
  if (r.failed || r.stalled) std::printf("status            %s\n", r.message.c_str());
  std::printf("loglik            %.10g\n", r.final_loglik);
  std::printf("penalized_loglik  %.10g\n", r.final_penalized_loglik);
  std::printf("grad_norm         %.3e\n", r.final_grad_norm);
  std::printf("beta             ");
  for (Index j = 0; j < r.beta_hat.size(); ++j) std::printf(" %.10g", r.beta_hat[j]);
  std::printf("\n");
}

int cmd_solve(const BenchConfig& cfg) {
  if (cfg.solvers.size() != 1) throw InvalidInput("solve takes exactly one --solver");
  const std::string& solver = cfg.solvers.front();
  if (!cfg.data.empty()) {
    auto loaded = load_csv(cfg.data);
    if (auto* md = std::get_if<MissingDataset>(&loaded)) {
      if (solver != "em" && solver != "px_ecme") throw InvalidInput("missing covariates support em or px_ecme only");
      MissingConfig mc;
      mc.tol = cfg.tol;
      mc.max_iter = cfg.max_iter;
      mc.px = solver == "px_ecme";
      const auto res = px_solve_missing(*md, Vector::Zero(md->p()), CellModel::uniform(md->num_configs()), mc);
      print_result(solver + " (missing covariates)", res.fit);
      if (!cfg.out.empty()) write_trace_csv(cfg.out, res.fit.trace);
      return res.fit.converged ? 0 : 2;
    }
  }
  BenchConfig c = cfg;
  if (c.data.empty() && c.generator == "csv") throw InvalidInput("solve needs --data");
  if (!c.data.empty() && c.generator != "pseudo") c.generator = "csv";
  const Dataset d = replication_data(c, 0);
  const SolveResult r = fit_one(d, solver, make_penalty(c), initial_beta(c, d.p(), 0), c);
  print_result(solver, r);
  if (!c.out.empty()) write_trace_csv(c.out, r.trace);
  return r.converged ? 0 : 2;
}

int cmd_bench(const BenchConfig& cfg) {
  const BenchOutput out = run_benchmark(cfg);
  std::cout << summary_csv(out.summary);
  std::cerr << "summary written to " << out.summary_path << "\n";
  return 0;
}

int cmd_gen(const BenchConfig& cfg) {
  if (cfg.out.empty()) throw InvalidInput("gen needs --out <file.csv>");
  if (cfg.generator == "ar1") {
    Dataset d = gen_ar1(cfg.n, cfg.p, cfg.rho, cfg.seed).data;
    if (cfg.weights == "exp") d = d.with_weights(gen_exp_weights(d.n(), cfg.seed ^ 0x5EEDBA5E00000001ULL));
    write_csv(cfg.out, d);
  } else if (cfg.generator == "table1") {
    write_csv(cfg.out, builtin_table1());
  } else if (cfg.generator == "pseudo") {
    write_csv(cfg.out, replication_data(cfg, 0));
  } else {
    throw InvalidInput("gen supports generators ar1, table1 and pseudo");
  }
  std::cerr << "wrote " << cfg.out << "\n";
  return 0;
}

int cmd_diagnose(const BenchConfig& cfg) {
  const Dataset d = cfg.data.empty() ? builtin_table1() : load_dataset_csv(cfg.data);
  SolverConfig sc;
  sc.max_iter = cfg.max_iter;
  const JacobianReport rep = verify_theorem1(d, sc);
  Eigen::IOFormat fmt(6, 0, "  ", "\n", "  [", "]");
  std::cout << "beta*          " << rep.beta_star.transpose().format(Eigen::IOFormat(10)) << "\n";
  std::cout << "gradient norm  " << rep.grad_norm << "\n";
  std::cout << "J_EM\n" << rep.J_em.format(fmt) << "\n";
  std::cout << "J_PX\n" << rep.J_px.format(fmt) << "\n";
  std::cout << "r_EM           " << rep.r_em << "\n";
  std::cout << "r_PX           " << rep.r_px << "\n";
  std::cout << "FD deviation   " << rep.fd_agreement << (rep.fd_ok ? "  (ok)" : "  (too large)") << "\n";
  std::cout << "r_PX <= r_EM   " << (rep.rate_ok ? "yes" : "no") << "\n";
  return rep.fd_ok && rep.rate_ok ? 0 : 1;
}

int cmd_table1() {
  const Dataset d = builtin_table1();
  SolverConfig sc;
  sc.tol = 1e-9;
  const Vector zero = Vector::Zero(2);
  const SolveResult nr = run(d, Penalty::none(), {Method::newton}, zero, sc);
  const SolveResult px = run(d, Penalty::none(), {Method::px_ecme}, zero, sc);
  const SolveResult em = run(d, Penalty::none(), {Method::em}, zero, sc);

  // beta paths are rebuilt by replaying the steps; traces only hold objectives
  auto path = [&](Method m, long upto) {
    std::vector<Vector> out{zero};
    Vector b = zero;
    for (long k = 1; k <= upto; ++k) {
      try {
        if (m == Method::newton) b = newton_step(d, b, Penalty::none());
        else if (m == Method::px_ecme) b = px_ecme_step(d, b, Penalty::none()).beta;
        else b = em_step(d, b, Penalty::none());
      } catch (const std::exception&) {
        b = Vector::Constant(2, std::nan(""));
      }
      out.push_back(b);
    }
    return out;
  };
  const long last = 63;
  const auto pn = path(Method::newton, last), pp = path(Method::px_ecme, last), pe = path(Method::em, last);
  auto cell = [&](const std::vector<Vector>& p, long k) {
    const Vector& b = p[static_cast<size_t>(k)];
    if (!b.allFinite() || b.norm() > 1e8) {
      std::printf("  %10s %10s %12s", "-", "-", "-");
      return;
    }
    std::printf("  %10.2f %10.2f %12.4f", b[0], b[1], weighted_loglik(d, b));
  };
  std::printf("%4s  %-34s  %-34s  %-34s\n", "k", "Newton-Raphson", "PX-ECME", "EM");
  for (long k : {0L, 1L, 2L, 3L, 4L, 5L, 6L, 7L, 8L, 9L, 10L, 63L}) {
    std::printf("%4ld", k);
    cell(pn, k);
    cell(pp, k);
    cell(pe, k);
    std::printf("\n");
  }
  std::printf("\nNewton-Raphson: %s after %ld iterations\n", nr.diverged ? "diverged" : (nr.converged ? "converged" : "stopped"),
              nr.iterations);
  std::printf("PX-ECME: converged=%s in %ld iterations, beta=(%.5f, %.5f), loglik=%.6f\n", px.converged ? "yes" : "no",
              px.iterations, px.beta_hat[0], px.beta_hat[1], px.final_loglik);
  std::printf("EM:      converged=%s in %ld iterations, beta=(%.5f, %.5f), loglik=%.6f\n", em.converged ? "yes" : "no",
              em.iterations, em.beta_hat[0], em.beta_hat[1], em.final_loglik);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted and penalized logistic regression by Polya-Gamma EM and its accelerations"};
  app.require_subcommand(1);

  SettingOptions solve_opts, bench_opts, gen_opts, diag_opts;
  auto* solve = app.add_subcommand("solve", "fit one model and print the estimate");
  solve_opts.attach(solve);
  auto* bench = app.add_subcommand("bench", "run a replicated benchmark and write traces and a summary");
  bench_opts.attach(bench);
  auto* gen = app.add_subcommand("gen", "write a simulated dataset as CSV");
  gen_opts.attach(gen);
  auto* diag = app.add_subcommand("diagnose", "EM and PX-ECME Jacobians and rates at the MLE");
  diag_opts.attach(diag);
  auto* table1 = app.add_subcommand("table1", "reproduce the seven-observation divergence example");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      BenchConfig base;
      base.solvers = {"px_ecme"};
      base.generator = "csv";
      base.out.clear();
      return cmd_solve(solve_opts.resolve(base));
    }
    if (bench->parsed()) return cmd_bench(bench_opts.resolve(BenchConfig{}));
    if (gen->parsed()) {
      BenchConfig base;
      base.out.clear();
      return cmd_gen(gen_opts.resolve(base));
    }
    if (diag->parsed()) return cmd_diagnose(diag_opts.resolve(BenchConfig{}));
    if (table1->parsed()) return cmd_table1();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
