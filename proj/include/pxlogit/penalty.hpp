#pragma once

#include <string>
#include <vector>

#include "pxlogit/model.hpp"

namespace pxlogit {

enum class PenaltyKind { none, l1, l2, elastic_net, scad };

std::string to_string(PenaltyKind k);
PenaltyKind parse_penalty_kind(const std::string& name);

// Separable penalty sum_j P_j(beta_j). Exempt coordinates carry no penalty.
// For SCAD, lambda1() holds lambda and scad_a() the shape.
class Penalty {
 public:
  Penalty() = default;

  static Penalty none();
  static Penalty l1(double lambda1);
  static Penalty l2(double lambda2);
  static Penalty elastic_net(double lambda1, double lambda2);
  static Penalty scad(double lambda, double a = 3.7);

  Penalty with_exempt(std::vector<Index> idx) const;

  PenaltyKind kind() const { return kind_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double scad_a() const { return a_; }
  const std::vector<Index>& exempt() const { return exempt_; }
  bool is_exempt(Index j) const;

  // True when the penalty is none or a pure ridge term, i.e. the EM-family
  // M-step is a linear solve.
  bool is_quadratic() const;
  // Ridge coefficient on coordinate j (lambda2 or 0).
  double ridge(Index j) const;
  // Diagonal of lambda2 * I_pen.
  Vector ridge_diagonal(Index p) const;

  double component(Index j, double b) const;
  double value(const Vector& beta) const;
  double ray_value(const Vector& beta, double rho) const;
  // d/drho of value(rho*beta). At a kink the smooth part alone is returned.
  double ray_slope(const Vector& beta, double rho) const;

  // Derivative of P_j at b != 0 (exempt coordinates give 0).
  double component_slope(Index j, double b) const;
  // Half-width of the subdifferential of P_j at 0.
  double kink(Index j) const;

  // argmin_b (q/2) b^2 - l b + P_j(b), q > 0.
  double scalar_quadratic_penalized_min(Index j, double q, double l) const;

 private:
  Penalty(PenaltyKind k, double l1, double l2, double a) : kind_(k), lambda1_(l1), lambda2_(l2), a_(a) {}

  double slope_unchecked(double b) const;

  PenaltyKind kind_ = PenaltyKind::none;
  double lambda1_ = 0.0;
  double lambda2_ = 0.0;
  double a_ = 3.7;
  std::vector<Index> exempt_;
};

double penalized_loglik(const Dataset& d, const Coefficients& beta, const Penalty& pen);

double soft_threshold(double x, double t);

}  // namespace pxlogit
