#include "pxlogit/solvers.hpp"

#include <chrono>
#include <cmath>

namespace pxlogit {

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "em") return {Method::em};
  if (name == "px_ecme" || name == "px-ecme") return {Method::px_ecme};
  if (name == "newton" || name == "nr") return {Method::newton};
  if (name == "mm") return {Method::mm, KappaRule::max_weight};
  if (name == "mm_quarter") return {Method::mm, KappaRule::quarter};
  if (name == "px_mm" || name == "px-mm") return {Method::px_mm, KappaRule::max_weight};
  if (name == "px_mm_quarter") return {Method::px_mm, KappaRule::quarter};
  if (name == "gd") return {Method::gd};
  if (name == "gd_backtrack" || name == "gdbt") return {Method::gd_backtrack};
  if (name == "gpx_ecme_pgd" || name == "gpx") return {Method::gpx_ecme_pgd};
  if (name == "aa1") return {Method::aa1};
  throw InvalidInput("unknown solver '" + name + "'");
}

std::string to_string(const SolverKind& kind) {
  const bool q = kind.kappa == KappaRule::quarter;
  switch (kind.method) {
    case Method::em: return "em";
    case Method::px_ecme: return "px_ecme";
    case Method::newton: return "newton";
    case Method::mm: return q ? "mm_quarter" : "mm";
    case Method::px_mm: return q ? "px_mm_quarter" : "px_mm";
    case Method::gd: return "gd";
    case Method::gd_backtrack: return "gd_backtrack";
    case Method::gpx_ecme_pgd: return "gpx_ecme_pgd";
    case Method::aa1: return "aa1";
  }
  return "?";
}

bool is_monotone(const SolverKind& kind) { return kind.method != Method::newton; }

namespace {

void require_quadratic(const Penalty& pen, const char* who) {
  if (!pen.is_quadratic())
    throw InvalidInput(std::string(who) + " supports only none/l2 penalties; use gpx_ecme_pgd or coordinate descent");
}

Matrix add_diagonal(Matrix A, const Vector& diag) {
  A.diagonal() += diag;
  return A;
}

}  // namespace

Coefficients em_step(const Dataset& d, const Coefficients& beta, const Penalty& pen) {
  require_quadratic(pen, "em_step");
  const LinkQuantities lq = link_quantities(d, beta);
  const Matrix E = add_diagonal(d.weighted_gram(lq.w_em), pen.ridge_diagonal(d.p()));
  return solve_spd(E, d.weighted_cross(d.u()));
}

ExpandedStep expand_along_ray(const Dataset& d, const Coefficients& base, const Penalty& pen,
                              const RaySearchConfig& ray_cfg) {
  ExpandedStep out{base, base, 1.0};
  if (base.isZero(0.0)) return out;
  const Vector eta_dir = d.X() * base;
  // Measured relative to rho = 1 so that nearby candidates compare accurately.
  const double pen1 = pen.ray_value(base, 1.0);
  auto f = [&](double r) {
    return loglik_change(d, eta_dir, r * eta_dir) - (pen.ray_value(base, r) - pen1);
  };
  auto df = [&](double r) { return loglik_along_ray(d, eta_dir, r).slope - pen.ray_slope(base, r); };
  const RayOptimum opt = ray_maximize(f, df, ray_cfg);
  out.rho = opt.rho;
  if (opt.rho != 1.0) out.beta = opt.rho * base;
  return out;
}

ExpandedStep px_ecme_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                          const RaySearchConfig& ray_cfg) {
  return expand_along_ray(d, em_step(d, beta, pen), pen, ray_cfg);
}

Coefficients newton_step(const Dataset& d, const Coefficients& beta, const Penalty& pen) {
  require_quadratic(pen, "newton_step");
  const LinkQuantities lq = link_quantities(d, beta);
  const Vector ridge = pen.ridge_diagonal(d.p());
  const Matrix H = add_diagonal(d.weighted_gram(lq.w_nr), ridge);
  const Vector g = d.weighted_cross(d.y() - lq.mu) - ridge.cwiseProduct(beta);
  return beta + solve_spd(H, g);
}

double mm_kappa(const Dataset& d, const Coefficients& beta, KappaRule rule) {
  if (rule == KappaRule::quarter) {
    if (!d.unit_trials()) throw InvalidInput("kappa = 1/4 requires m_i = 1 for every observation");
    return 0.25;
  }
  const Vector eta = d.X() * beta;
  double k = 0.0;
  for (Index i = 0; i < d.n(); ++i) k = std::max(k, pg_weight(eta[i], d.m()[i]));
  return k;
}

Coefficients mm_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, KappaRule rule) {
  require_quadratic(pen, "mm_step");
  const double kappa = mm_kappa(d, beta, rule);
  const Vector ridge = pen.ridge_diagonal(d.p());
  const Matrix G = add_diagonal(d.weighted_gram(Vector::Ones(d.n())), ridge / kappa);
  const Vector g = grad_loglik(d, beta) - ridge.cwiseProduct(beta);
  return beta + solve_spd(G, g / kappa);
}

ExpandedStep px_mm_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, KappaRule rule,
                        const RaySearchConfig& ray_cfg) {
  return expand_along_ray(d, mm_step(d, beta, pen, rule), pen, ray_cfg);
}

double default_gd_kappa(const Dataset& d) {
  const double lmax = max_eigenvalue(0.25 * d.weighted_gram(d.m()));
  return 1.0 / ((1.0 + 1e-6) * lmax);
}

Coefficients gd_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, double kappa) {
  if (!(kappa > 0)) throw InvalidInput("steplength must be positive");
  const Vector l = beta / kappa + grad_loglik(d, beta);
  Coefficients out(d.p());
  for (Index j = 0; j < d.p(); ++j) out[j] = pen.scalar_quadratic_penalized_min(j, 1.0 / kappa, l[j]);
  return out;
}

Coefficients gd_backtrack_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                               BacktrackState& state) {
  const Vector eta0 = d.X() * beta;
  const double pen0 = pen.value(beta);
  const Vector g = grad_loglik(d, beta);
  double kappa = state.last_kappa ? 2.0 * *state.last_kappa : 1.0;
  state.stalled = false;
  for (int halvings = 0; halvings <= 60; ++halvings, kappa *= 0.5) {
    const Vector l = beta / kappa + g;
    Coefficients cand(d.p());
    for (Index j = 0; j < d.p(); ++j) cand[j] = pen.scalar_quadratic_penalized_min(j, 1.0 / kappa, l[j]);
    const Vector delta = cand - beta;
    const double gain = loglik_change(d, eta0, d.X() * cand);
    // Sufficient ascent for the smooth part; together with the prox property
    // this implies the penalized objective does not decrease.
    const double bound = g.dot(delta) - delta.squaredNorm() / (2.0 * kappa);
    if (std::isfinite(gain) && gain >= bound && gain - (pen.value(cand) - pen0) >= 0.0) {
      state.kappa = kappa;
      state.last_kappa = kappa;
      return cand;
    }
  }
  state.stalled = true;
  return beta;
}

double gpx_kappa(const Dataset& d, const Coefficients& beta) {
  const LinkQuantities lq = link_quantities(d, beta);
  return 1.0 / ((1.0 + 1e-6) * max_eigenvalue(d.weighted_gram(lq.w_em)));
}

Coefficients gpx_inner_update(const Dataset& d, const Coefficients& beta, const Penalty& pen, double kappa) {
  const LinkQuantities lq = link_quantities(d, beta);
  const Matrix E = d.weighted_gram(lq.w_em);
  const Vector a = beta / kappa - E * beta;
  const Vector l = d.weighted_cross(d.u()) + a;
  Coefficients out(d.p());
  for (Index j = 0; j < d.p(); ++j) out[j] = pen.scalar_quadratic_penalized_min(j, 1.0 / kappa, l[j]);
  return out;
}

ExpandedStep gpx_ecme_pgd_step(const Dataset& d, const Coefficients& beta, const Penalty& pen,
                               const RaySearchConfig& ray_cfg) {
  const double kappa = gpx_kappa(d, beta);
  return expand_along_ray(d, gpx_inner_update(d, beta, pen, kappa), pen, ray_cfg);
}

AA1Step aa1_step(const Dataset& d, const Coefficients& beta, const Penalty& pen, const AA1State& state) {
  const Coefficients em = em_step(d, beta, pen);
  AA1Step out{em, AA1State{beta, em}, false};
  if (!state.beta_prev || !state.em_prev) return out;
  const Vector r = em - beta;
  const Vector v = em - beta + *state.beta_prev - *state.em_prev;
  const double vv = v.squaredNorm();
  if (!(vv > 0)) return out;
  const double gamma = v.dot(r) / vv;
  const Coefficients cand = (1.0 - gamma) * em + gamma * *state.em_prev;
  if (cand.allFinite() && penalized_loglik(d, cand, pen) >= penalized_loglik(d, em, pen)) {
    out.beta = cand;
    out.accepted = true;
  }
  return out;
}

void check_compatible(const Dataset& d, const Penalty& pen, const SolverKind& kind) {
  switch (kind.method) {
    case Method::em:
    case Method::px_ecme:
    case Method::newton:
    case Method::aa1: require_quadratic(pen, to_string(kind).c_str()); break;
    case Method::mm:
    case Method::px_mm:
      require_quadratic(pen, to_string(kind).c_str());
      if (kind.kappa == KappaRule::quarter && !d.unit_trials())
        throw InvalidInput("kappa = 1/4 requires m_i = 1 for every observation");
      break;
    default: break;
  }
}

Vector penalized_gradient(const Dataset& d, const Coefficients& beta, const Penalty& pen) {
  Vector g = grad_loglik(d, beta);
  for (Index j = 0; j < d.p(); ++j) {
    if (beta[j] != 0.0) {
      g[j] -= pen.component_slope(j, beta[j]);
    } else {
      g[j] = soft_threshold(g[j], pen.kink(j));
    }
  }
  return g;
}

SolveResult run(const Dataset& d, const Penalty& pen, const SolverKind& kind, const Coefficients& beta0,
                const SolverConfig& cfg) {
  if (beta0.size() != d.p()) throw InvalidInput("initial coefficient vector has the wrong length");
  if (!(cfg.tol > 0) || cfg.max_iter < 1) throw InvalidInput("tol and max_iter must be positive");
  check_compatible(d, pen, kind);

  using Clock = std::chrono::steady_clock;
  SolveResult res;
  Coefficients beta = beta0;
  double ll = weighted_loglik(d, beta);
  double pll = ll - pen.value(beta);
  if (cfg.record_trace) res.trace.push_back({0, pll, ll, 0.0, 0.0});

  AA1State aa1;
  BacktrackState bt;
  double gd_kappa = 0.0;
  try {
    if (kind.method == Method::gd) gd_kappa = cfg.gd_kappa ? *cfg.gd_kappa : default_gd_kappa(d);
  } catch (const std::exception& e) {
    res.failed = true;
    res.message = e.what();
  }

  long t = 0;
  while (!res.failed && t < cfg.max_iter) {
    ++t;
    const auto start = Clock::now();
    Coefficients next;
    try {
      switch (kind.method) {
        case Method::em: next = em_step(d, beta, pen); break;
        case Method::px_ecme: next = px_ecme_step(d, beta, pen, cfg.ray_cfg).beta; break;
        case Method::newton: next = newton_step(d, beta, pen); break;
        case Method::mm: next = mm_step(d, beta, pen, kind.kappa); break;
        case Method::px_mm: next = px_mm_step(d, beta, pen, kind.kappa, cfg.ray_cfg).beta; break;
        case Method::gd: next = gd_step(d, beta, pen, gd_kappa); break;
        case Method::gd_backtrack: next = gd_backtrack_step(d, beta, pen, bt); break;
        case Method::gpx_ecme_pgd: next = gpx_ecme_pgd_step(d, beta, pen, cfg.ray_cfg).beta; break;
        case Method::aa1: {
          AA1Step s = aa1_step(d, beta, pen, aa1);
          next = std::move(s.beta);
          aa1 = std::move(s.state);
          break;
        }
      }
    } catch (const std::exception& e) {
      res.failed = true;
      res.message = e.what();
      --t;
      break;
    }
    if (bt.stalled) {
      res.stalled = true;
      res.message = "backtracking stalled after 60 halvings";
      --t;
      break;
    }
    const double step = (next - beta).norm();
    beta = std::move(next);
    ll = weighted_loglik(d, beta);
    pll = ll - pen.value(beta);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (cfg.record_trace) res.trace.push_back({t, pll, ll, step, elapsed});

    if (!std::isfinite(pll) || !beta.allFinite() || beta.norm() > 1e8) {
      res.diverged = true;
      res.message = "iterates diverged";
      break;
    }
    if (step < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  res.iterations = t;
  res.beta_hat = beta;
  res.final_loglik = ll;
  res.final_penalized_loglik = pll;
  res.final_grad_norm = beta.allFinite() ? grad_loglik(d, beta).norm() : std::nan("");
  return res;
}

}  // namespace pxlogit
