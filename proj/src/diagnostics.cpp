#include "pxlogit/diagnostics.hpp"

#include <cmath>

namespace pxlogit {

namespace {

struct InfoMatrices {
  Matrix E;  // X'SWX
  Matrix V;  // X'SRX
};

InfoMatrices info_matrices(const Dataset& d, const Coefficients& beta) {
  const LinkQuantities lq = link_quantities(d, beta);
  return {d.weighted_gram(lq.w_em), d.weighted_gram(lq.w_nr)};
}

Matrix spd_solve_matrix(const Matrix& A, const Matrix& B) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw SingularSystem("information matrix is not positive definite", NAN);
  return llt.solve(B);
}

}  // namespace

Matrix jacobian_em_analytic(const Dataset& d, const Coefficients& beta_star) {
  const InfoMatrices m = info_matrices(d, beta_star);
  return Matrix::Identity(d.p(), d.p()) - spd_solve_matrix(m.E, m.V);
}

Matrix jacobian_px_analytic(const Dataset& d, const Coefficients& beta_star) {
  if (beta_star.isZero(0.0)) throw InvalidInput("the expanded-map Jacobian needs a nonzero fixed point");
  const InfoMatrices m = info_matrices(d, beta_star);
  const Matrix EinvV = spd_solve_matrix(m.E, m.V);
  const Matrix J_em = Matrix::Identity(d.p(), d.p()) - EinvV;
  const double c = beta_star.dot(m.V * beta_star);
  if (!(c > 0)) throw SingularSystem("c(beta*) is not positive", NAN);
  // V (V^{-1} - E^{-1}) V = V - V E^{-1} V
  const Matrix core = m.V - m.V * EinvV;
  return J_em - (beta_star * (beta_star.transpose() * core)) / c;
}

Matrix jacobian_fd(const std::function<Coefficients(const Coefficients&)>& map, const Coefficients& at) {
  const Index p = at.size();
  Matrix J(p, p);
  for (Index j = 0; j < p; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(at[j]));
    Coefficients plus = at, minus = at;
    plus[j] += h;
    minus[j] -= h;
    J.col(j) = (map(plus) - map(minus)) / (plus[j] - minus[j]);
  }
  return J;
}

double spectral_radius(const Matrix& J) {
  if (J.rows() != J.cols()) throw InvalidInput("spectral_radius: matrix must be square");
  if (J.rows() == 0) return 0.0;
  if (!J.allFinite()) throw InvalidInput("spectral_radius: non-finite entries");
  Eigen::EigenSolver<Matrix> es(J, false);
  if (es.info() != Eigen::Success) throw NonConvergence("eigenvalue iteration did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Coefficients converge_mle(const Dataset& d, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.tol = std::min(cfg.tol, 1e-12);
  c.record_trace = false;
  const SolveResult r = run(d, Penalty::none(), {Method::px_ecme}, Vector::Zero(d.p()), c);
  if (r.failed) throw NonConvergence("PX-ECME solve failed: " + r.message);
  Coefficients beta = r.beta_hat;
  double gn = grad_loglik(d, beta).norm();
  if (r.diverged || beta.norm() > 1e4) {
    throw SeparationDetected("coefficients exceed 1e4 without the gradient vanishing; the MLE is likely infinite");
  }
  for (int k = 0; k < 20 && gn >= 1e-9; ++k) {
    Coefficients next;
    try {
      next = newton_step(d, beta, Penalty::none());
    } catch (const std::exception&) {
      break;
    }
    const double gnext = next.allFinite() ? grad_loglik(d, next).norm() : INFINITY;
    if (!(gnext < gn)) break;
    beta = std::move(next);
    gn = gnext;
  }
  if (!(gn < 1e-8)) throw NonConvergence("could not reach a stationary point (gradient norm " + std::to_string(gn) + ")");
  // Under separation the gradient also vanishes numerically at large |eta|,
  // but the observed information collapses and the EM rate reaches 1.
  if (spectral_radius(jacobian_em_analytic(d, beta)) > 1.0 - 1e-6) {
    throw SeparationDetected("the information matrix is numerically singular at the limit point; the MLE is likely infinite");
  }
  return beta;
}

JacobianReport verify_theorem1(const Dataset& d, const SolverConfig& cfg) {
  JacobianReport rep;
  rep.beta_star = converge_mle(d, cfg);
  rep.grad_norm = grad_loglik(d, rep.beta_star).norm();
  rep.J_em = jacobian_em_analytic(d, rep.beta_star);
  rep.J_px = jacobian_px_analytic(d, rep.beta_star);

  const Penalty none = Penalty::none();
  RaySearchConfig tight = cfg.ray_cfg;
  tight.tol = 1e-12;
  rep.J_em_fd = jacobian_fd([&](const Coefficients& b) { return em_step(d, b, none); }, rep.beta_star);
  rep.J_px_fd =
      jacobian_fd([&](const Coefficients& b) { return px_ecme_step(d, b, none, tight).beta; }, rep.beta_star);

  rep.r_em = spectral_radius(rep.J_em);
  rep.r_px = spectral_radius(rep.J_px);
  rep.fd_agreement = std::max((rep.J_em - rep.J_em_fd).cwiseAbs().maxCoeff(),
                              (rep.J_px - rep.J_px_fd).cwiseAbs().maxCoeff());
  rep.fd_ok = rep.fd_agreement < 1e-3;
  rep.rate_ok = rep.r_px <= rep.r_em + 1e-8;
  return rep;
}

}  // namespace pxlogit
