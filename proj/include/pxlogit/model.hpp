#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pxlogit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Regression coefficients are plain Eigen vectors; callers are expected to
// keep them finite.
using Coefficients = Vector;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Binomial logistic data (y successes out of m trials, observation weight s).
// Immutable once built; the constructor validates everything.
class Dataset {
 public:
  Dataset(Matrix X, Vector y, Vector m, Vector s);

  // Unit trials and weights.
  static Dataset bernoulli(Matrix X, Vector y);

  const Matrix& X() const { return X_; }
  const Vector& y() const { return y_; }
  const Vector& m() const { return m_; }
  const Vector& s() const { return s_; }
  // u_i = y_i - m_i/2
  const Vector& u() const { return u_; }
  // s_i * log C(m_i, y_i), summed
  double log_binom_const() const { return log_binom_; }

  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }
  bool unit_trials() const { return unit_trials_; }

  // XᵀS diag(v) X
  Matrix weighted_gram(const Vector& v) const;
  // XᵀS v
  Vector weighted_cross(const Vector& v) const;

  Dataset with_weights(Vector s) const;

 private:
  Matrix X_;
  Vector y_, m_, s_, u_;
  double log_binom_ = 0.0;
  bool unit_trials_ = true;
};

struct LinkQuantities {
  Vector eta;
  Vector mu;
  Vector w_em;
  Vector w_nr;
};

// Stable scalar kernels.
double sigmoid(double z);
double log1pexp(double z);

double pg_weight(double z, double m);
double nr_weight(double z, double m);

LinkQuantities link_quantities(const Dataset& d, const Coefficients& beta);
double weighted_loglik(const Dataset& d, const Coefficients& beta);
Vector grad_loglik(const Dataset& d, const Coefficients& beta);

// loglik(to) - loglik(from), accurate to relative precision when the two
// predictors are close (differencing two full sums is not).
double loglik_change(const Dataset& d, const Vector& eta_from, const Vector& eta_to);

// Log-likelihood and its derivative in rho along beta at rho*beta, computed
// from a single predictor evaluation.
struct RayEval {
  double value;
  double slope;
};
RayEval loglik_along_ray(const Dataset& d, const Vector& eta_dir, double rho);

}  // namespace pxlogit
