#pragma once

#include <stdexcept>

#include "pxlogit/solvers.hpp"

namespace pxlogit {

class SeparationDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JacobianReport {
  Coefficients beta_star;
  Matrix J_em, J_px;
  Matrix J_em_fd, J_px_fd;
  double r_em = 0.0;
  double r_px = 0.0;
  double fd_agreement = 0.0;  // max elementwise |analytic - FD| over both maps
  double grad_norm = 0.0;
  bool fd_ok = false;
  bool rate_ok = false;  // r_px <= r_em + 1e-8
};

Matrix jacobian_em_analytic(const Dataset& d, const Coefficients& beta_star);
Matrix jacobian_px_analytic(const Dataset& d, const Coefficients& beta_star);

// Central differences of an arbitrary map, step 1e-5 * max(1, |beta_j|).
Matrix jacobian_fd(const std::function<Coefficients(const Coefficients&)>& map, const Coefficients& at);

double spectral_radius(const Matrix& J);

// Converges an unpenalized PX-ECME solve (polishing with Newton steps if
// needed) to a point with gradient norm below 1e-8.
Coefficients converge_mle(const Dataset& d, const SolverConfig& cfg = {});

JacobianReport verify_theorem1(const Dataset& d, const SolverConfig& cfg = {});

}  // namespace pxlogit
