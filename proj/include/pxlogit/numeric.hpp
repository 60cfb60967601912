#pragma once

#include <functional>
#include <stdexcept>

#include "pxlogit/model.hpp"

namespace pxlogit {

class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpdSolution {
  Vector x;
  double jitter = 0.0;  // 0 when the plain factorization succeeded
};

SpdSolution solve_spd_report(const Matrix& A, const Vector& b);
Vector solve_spd(const Matrix& A, const Vector& b);

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double max_eigenvalue(const Matrix& A);

struct RaySearchConfig {
  double initial_bracket_halfwidth = 1.0;
  int max_expansions = 60;
  double tol = 1e-10;
  int max_iters = 200;
};

struct RayOptimum {
  double rho = 1.0;
  double value = 0.0;
};

using ScalarFn = std::function<double(double)>;

// Maximizes f over rho, bracketing outward from rho = 1. The returned value is
// never below f(1).
RayOptimum ray_maximize(const ScalarFn& f, const RaySearchConfig& cfg = {});

// Same contract; refinement runs Brent's root finder on the supplied
// derivative when the bracket shows a sign change, which reaches a much
// tighter rho than comparison-based search can.
RayOptimum ray_maximize(const ScalarFn& f, const ScalarFn& slope, const RaySearchConfig& cfg = {});

}  // namespace pxlogit
