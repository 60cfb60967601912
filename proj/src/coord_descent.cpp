#include "pxlogit/coord_descent.hpp"

#include <chrono>
#include <cmath>

namespace pxlogit {

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "em") return WeightMode::em;
  if (name == "nr") return WeightMode::nr;
  throw InvalidInput("unknown weight mode '" + name + "' (expected em or nr)");
}

std::string to_string(WeightMode mode) { return mode == WeightMode::em ? "em" : "nr"; }

namespace {

void validate(const Dataset& d, const CDConfig& cfg) {
  if (cfg.block_size < 0 || cfg.block_size > d.p()) throw InvalidInput("block size must lie in [1, p]");
  if (!(cfg.lambda1 >= 0) || !(cfg.lambda2 >= 0)) throw InvalidInput("lambda1 and lambda2 must be nonnegative");
  if (!(cfg.tol > 0) || cfg.max_cycles < 1) throw InvalidInput("tol and max_cycles must be positive");
}

// Rebuilds A, col_sq, the linear term and the residual from state.beta.
void rebuild_weights(CDState& st, const Dataset& d, const CDConfig& cfg) {
  const LinkQuantities lq = link_quantities(d, st.beta);
  const Vector& w = cfg.weight_mode == WeightMode::em ? lq.w_em : lq.w_nr;
  const Vector root = d.s().cwiseProduct(w).cwiseSqrt();
  st.A = d.X().array().colwise() * root.array();
  st.col_sq = st.A.colwise().squaredNorm().transpose();
  if (cfg.weight_mode == WeightMode::em) {
    st.linear = d.weighted_cross(d.u());
  } else {
    // Working response of the Newton quadratic model around beta.
    st.linear = d.weighted_cross(d.y() - lq.mu + w.cwiseProduct(lq.eta));
  }
  st.resid = st.A * st.theta;
}

}  // namespace

bool cd_refresh_due(Index j, Index p, Index block_size) {
  const Index k = block_size == 0 ? p : block_size;
  return (j + 1) % k == 0 || j == p - 1;
}

CDState cd_init(const Dataset& d, const CDConfig& cfg, const Coefficients& beta0) {
  validate(d, cfg);
  if (beta0.size() != d.p()) throw InvalidInput("initial coefficient vector has the wrong length");
  CDState st;
  st.theta = beta0;
  st.alpha = 1.0;
  st.beta = beta0;
  rebuild_weights(st, d, cfg);
  return st;
}

double cd_coordinate_update(CDState& st, const Dataset& d, const CDConfig& cfg, Index j) {
  (void)d;
  const double D = st.col_sq[j] + cfg.lambda2;
  if (!(D > 0)) return st.theta[j];
  const auto Aj = st.A.col(j);
  const double old = st.theta[j];
  const double V = st.linear[j] / D;
  const double U = (Aj.dot(st.resid) - st.col_sq[j] * old) / D;
  const double lt = cfg.lambda1 / D;
  const double a = std::abs(st.alpha);
  const double next = soft_threshold(V / st.alpha - U, lt / a);
  if (next != old) {
    st.resid.noalias() += (next - old) * Aj;
    st.theta[j] = next;
  }
  return next;
}

void cd_refresh(CDState& st, const Dataset& d, const CDConfig& cfg) {
  if (cfg.expansion_on) {
    const Coefficients current = st.alpha * st.theta;
    const ExpandedStep ex = expand_along_ray(d, current, cfg.penalty(), cfg.ray_cfg);
    st.alpha *= ex.rho;
    if (st.alpha == 0.0 || !std::isfinite(st.alpha)) {
      st.theta.setZero();
      st.alpha = 1.0;
    }
    st.beta = st.alpha * st.theta;
  } else {
    st.beta = st.theta;
  }
  rebuild_weights(st, d, cfg);
}

SolveResult cd_solve(const Dataset& d, const CDConfig& cfg, const Coefficients& beta0) {
  using Clock = std::chrono::steady_clock;
  CDState st = cd_init(d, cfg, beta0);
  const Penalty pen = cfg.penalty();
  SolveResult res;
  double ll = weighted_loglik(d, st.beta);
  double pll = ll - pen.value(st.beta);
  if (cfg.record_trace) res.trace.push_back({0, pll, ll, 0.0, 0.0});

  long cycle = 0;
  try {
    while (cycle < cfg.max_cycles) {
      ++cycle;
      const auto start = Clock::now();
      const Coefficients before = st.beta;
      for (Index j = 0; j < d.p(); ++j) {
        cd_coordinate_update(st, d, cfg, j);
        if (cd_refresh_due(j, d.p(), cfg.block_size)) cd_refresh(st, d, cfg);
      }
      const double step = (st.beta - before).norm();
      ll = weighted_loglik(d, st.beta);
      pll = ll - pen.value(st.beta);
      const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      if (cfg.record_trace) res.trace.push_back({cycle, pll, ll, step, elapsed});
      if (!std::isfinite(pll) || st.beta.norm() > 1e8) {
        res.diverged = true;
        res.message = "iterates diverged";
        break;
      }
      if (step < cfg.tol) {
        res.converged = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.message = e.what();
  }
  res.iterations = cycle;
  res.beta_hat = st.beta;
  res.final_loglik = ll;
  res.final_penalized_loglik = pll;
  res.final_grad_norm = grad_loglik(d, st.beta).norm();
  return res;
}

double kkt_check(const Dataset& d, const Coefficients& beta, double lambda1, double lambda2) {
  const Vector g = grad_loglik(d, beta) - lambda2 * beta;
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double v = beta[j] != 0.0 ? std::abs(g[j] - lambda1 * (beta[j] > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g[j]) - lambda1);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace pxlogit
