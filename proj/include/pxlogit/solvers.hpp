#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pxlogit/numeric.hpp"
#include "pxlogit/penalty.hpp"

namespace pxlogit {

enum class Method { em, px_ecme, newton, mm, px_mm, gd, gd_backtrack, gpx_ecme_pgd, aa1 };
enum class KappaRule { max_weight, quarter };

struct SolverKind {
  Method method = Method::em;
  KappaRule kappa = KappaRule::max_weight;
};

// Names: em, px_ecme, newton, mm, mm_quarter, px_mm, px_mm_quarter, gd,
// gd_backtrack, gpx_ecme_pgd (alias gpx), aa1.
SolverKind parse_solver_kind(const std::string& name);
std::string to_string(const SolverKind& kind);
bool is_monotone(const SolverKind& kind);

struct SolverConfig {
  double tol = 1e-7;
  long max_iter = 100000;
  RaySearchConfig ray_cfg{};
  bool record_trace = true;
  // Fixed steplength for gd; when unset, 1/((1+1e-6) lambda_max(X'S diag(m) X / 4)).
  std::optional<double> gd_kappa;
};

struct TraceRow {
  long iter = 0;
  double penalized_loglik = 0.0;
  double loglik = 0.0;
  double step_norm = 0.0;
  double elapsed_sec = 0.0;
};

struct SolveResult {
  Coefficients beta_hat;
  long iterations = 0;
  bool converged = false;
  bool diverged = false;
  bool failed = false;
  bool stalled = false;
  std::string message;
  double final_penalized_loglik = 0.0;
  double final_loglik = 0.0;
  double final_grad_norm = 0.0;
  std::vector<TraceRow> trace;
};

// A base update followed by a scalar expansion beta = rho * base.
struct ExpandedStep {
  Coefficients beta;
  Coefficients base;
  double rho = 1.0;
};

struct AA1State {
  std::optional<Coefficients> beta_prev;
  std::optional<Coefficients> em_prev;
};

struct AA1Step {
  Coefficients beta;
  AA1State state;
  bool accepted = false;
};

struct BacktrackState {
  std::optional<double> last_kappa;
  double kappa = 0.0;
  bool stalled = false;
};

Coefficients em_step(const Dataset& d, const Coefficients& beta, const Penalty& pen);
ExpandedStep px_ecme_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                          const RaySearchConfig& ray_cfg = {});
Coefficients newton_step(const Dataset& d, const Coefficients& beta, const Penalty& pen);

double mm_kappa(const Dataset& d, const Coefficients& beta, KappaRule rule);
Coefficients mm_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, KappaRule rule);
ExpandedStep px_mm_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, KappaRule rule,
                        const RaySearchConfig& ray_cfg = {});

double default_gd_kappa(const Dataset& d);
Coefficients gd_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, double kappa);
Coefficients gd_backtrack_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                               BacktrackState& state);

double gpx_kappa(const Dataset& d, const Coefficients& beta);
// Coordinatewise maximizer of the surrogate Q-function with H = I/kappa - X'SWX.
Coefficients gpx_inner_update(const Dataset& d, const Coefficients& beta, const Penalty& pen, double kappa);
ExpandedStep gpx_ecme_pgd_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                               const RaySearchConfig& ray_cfg = {});

AA1Step aa1_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, const AA1State& state);

// Scales base by the rho maximizing penalized_loglik(rho * base).
ExpandedStep expand_along_ray(const Dataset& d, const Coefficients& base, const Penalty& pen,
                              const RaySearchConfig& ray_cfg);

void check_compatible(const Dataset& d, const Penalty& pen, const SolverKind& kind);

SolveResult run(const Dataset& d, const Penalty& pen, const SolverKind& kind, const Coefficients& beta0,
                const SolverConfig& cfg = {});

// Gradient of the smooth part of the penalized objective with the
// minimum-norm subgradient of any l1 part; zero exactly at stationary points.
Vector penalized_gradient(const Dataset& d, const Coefficients& beta, const Penalty& pen);

}  // namespace pxlogit
