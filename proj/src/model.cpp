#include "pxlogit/model.hpp"

#include <cmath>
#include <sstream>

namespace pxlogit {

namespace {

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

std::string row_msg(const char* what, Index i) {
  std::ostringstream os;
  os << what << " (row " << i + 1 << ")";
  return os.str();
}

}  // namespace

Dataset::Dataset(Matrix X, Vector y, Vector m, Vector s)
    : X_(std::move(X)), y_(std::move(y)), m_(std::move(m)), s_(std::move(s)) {
  const Index n = X_.rows();
  if (n == 0 || X_.cols() == 0) throw InvalidInput("empty design matrix");
  if (y_.size() != n || m_.size() != n || s_.size() != n)
    throw InvalidInput("y, m, s must have one entry per row of X");
  if (!X_.allFinite()) throw InvalidInput("design matrix has non-finite entries");
  bool any_weight = false;
  u_.resize(n);
  for (Index i = 0; i < n; ++i) {
    if (!is_integer(m_[i]) || m_[i] < 1) throw InvalidInput(row_msg("m must be a positive integer", i));
    if (!is_integer(y_[i]) || y_[i] < 0 || y_[i] > m_[i])
      throw InvalidInput(row_msg("y must be an integer in [0, m]", i));
    if (!std::isfinite(s_[i]) || s_[i] < 0) throw InvalidInput(row_msg("s must be nonnegative", i));
    any_weight = any_weight || s_[i] > 0;
    if (m_[i] != 1) unit_trials_ = false;
    u_[i] = y_[i] - 0.5 * m_[i];
    if (s_[i] > 0 && m_[i] > 1) {
      log_binom_ += s_[i] * (std::lgamma(m_[i] + 1) - std::lgamma(y_[i] + 1) -
                             std::lgamma(m_[i] - y_[i] + 1));
    }
  }
  if (!any_weight) throw InvalidInput("at least one observation weight must be positive");
}

Dataset Dataset::bernoulli(Matrix X, Vector y) {
  const Index n = X.rows();
  return Dataset(std::move(X), std::move(y), Vector::Ones(n), Vector::Ones(n));
}

Dataset Dataset::with_weights(Vector s) const { return Dataset(X_, y_, m_, std::move(s)); }

Matrix Dataset::weighted_gram(const Vector& v) const {
  const Vector sv = s_.cwiseProduct(v);
  Matrix G = X_.transpose() * (X_.array().colwise() * sv.array()).matrix();
  return 0.5 * (G + G.transpose());
}

Vector Dataset::weighted_cross(const Vector& v) const { return X_.transpose() * s_.cwiseProduct(v); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log1pexp(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double pg_weight(double z, double m) {
  const double a = std::abs(z);
  if (a < 1e-4) return m * (0.25 - z * z / 48.0);
  return m * std::tanh(0.5 * a) / (2.0 * a);
}

double nr_weight(double z, double m) {
  // pi(1-pi) = e^{-|z|}/(1+e^{-|z|})^2, safe for any |z|
  const double e = std::exp(-std::abs(z));
  const double q = 1.0 + e;
  return m * e / (q * q);
}

LinkQuantities link_quantities(const Dataset& d, const Coefficients& beta) {
  LinkQuantities lq;
  lq.eta = d.X() * beta;
  const Index n = d.n();
  lq.mu.resize(n);
  lq.w_em.resize(n);
  lq.w_nr.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double z = lq.eta[i], m = d.m()[i];
    lq.mu[i] = m * sigmoid(z);
    lq.w_em[i] = pg_weight(z, m);
    lq.w_nr[i] = nr_weight(z, m);
  }
  return lq;
}

double weighted_loglik(const Dataset& d, const Coefficients& beta) {
  const Vector eta = d.X() * beta;
  double acc = 0.0;
  for (Index i = 0; i < d.n(); ++i) {
    const double s = d.s()[i];
    if (s == 0.0) continue;
    acc += s * (d.y()[i] * eta[i] - d.m()[i] * log1pexp(eta[i]));
  }
  return acc + d.log_binom_const();
}

Vector grad_loglik(const Dataset& d, const Coefficients& beta) {
  const Vector eta = d.X() * beta;
  Vector r(d.n());
  for (Index i = 0; i < d.n(); ++i) r[i] = d.y()[i] - d.m()[i] * sigmoid(eta[i]);
  return d.weighted_cross(r);
}

double loglik_change(const Dataset& d, const Vector& eta_from, const Vector& eta_to) {
  double acc = 0.0;
  for (Index i = 0; i < d.n(); ++i) {
    const double s = d.s()[i];
    if (s == 0.0) continue;
    const double a = eta_from[i], delta = eta_to[i] - a;
    // log(1+e^b) - log(1+e^a) = log1p(expm1(b-a) sigmoid(a))
    const double dsoft = std::abs(delta) < 1.0 ? std::log1p(std::expm1(delta) * sigmoid(a))
                                               : log1pexp(eta_to[i]) - log1pexp(a);
    acc += s * (d.y()[i] * delta - d.m()[i] * dsoft);
  }
  return acc;
}

RayEval loglik_along_ray(const Dataset& d, const Vector& eta_dir, double rho) {
  double value = 0.0, slope = 0.0;
  for (Index i = 0; i < d.n(); ++i) {
    const double s = d.s()[i];
    if (s == 0.0) continue;
    const double e = eta_dir[i], z = rho * e;
    value += s * (d.y()[i] * z - d.m()[i] * log1pexp(z));
    slope += s * e * (d.y()[i] - d.m()[i] * sigmoid(z));
  }
  return {value + d.log_binom_const(), slope};
}

}  // namespace pxlogit
