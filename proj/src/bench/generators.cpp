#include "pxlogit/bench/generators.hpp"

#include <cmath>

#include "pxlogit/bench/rng.hpp"

namespace pxlogit::bench {

Dataset builtin_table1() {
  Matrix X(7, 2);
  X.col(0).setOnes();
  X.col(1) << 0.0, 0.0, 0.001, 100.0, -1.0, -1.0, 0.5;
  Vector y(7), s(7);
  y << 1, 0, 1, 1, 1, 0, 1;
  s << 0.4, 0.01, 0.4, 0.01, 0.04, 0.1, 0.04;
  return Dataset(std::move(X), std::move(y), Vector::Ones(7), std::move(s));
}

SimulatedData gen_ar1(Index n, Index p, double rho, std::uint64_t seed) {
  if (n < 1 || p < 1) throw InvalidInput("gen_ar1: n and p must be positive");
  if (!(rho >= 0 && rho < 1)) throw InvalidInput("gen_ar1: rho must lie in [0, 1)");
  Rng rng(seed);
  Vector beta(p);
  for (Index j = 0; j < p; ++j) {
    const bool z = rng.bernoulli(0.75);
    const double t = rng.student_t3();
    beta[j] = z ? t : 0.0;
  }
  // Innovations scaled by sqrt(1 - rho^2) keep every column N(0, 1), so
  // adjacent columns have correlation exactly rho.
  const double innov = std::sqrt(1.0 - rho * rho);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    if (p > 1) X(i, 1) = rng.normal();
    for (Index j = 2; j < p; ++j) X(i, j) = rho * X(i, j - 1) + innov * rng.normal();
  }
  const Vector eta = X * beta;
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.bernoulli(sigmoid(eta[i])) ? 1.0 : 0.0;
  return {Dataset::bernoulli(std::move(X), std::move(y)), std::move(beta)};
}

Vector gen_exp_weights(Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("gen_exp_weights: n must be positive");
  Rng rng(seed);
  Vector s(n);
  for (Index i = 0; i < n; ++i) s[i] = rng.exponential();
  return s;
}

Dataset gen_pseudo_outcomes(const Matrix& covariates, Index num_col, Index start_col, std::uint64_t seed) {
  const Index n = covariates.rows(), q = covariates.cols();
  if (num_col < 0 || num_col >= q || start_col < 0 || start_col >= q)
    throw InvalidInput("gen_pseudo_outcomes: covariate column out of range");
  Rng rng(seed);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const double prob = sigmoid(3.0 * covariates(i, num_col) - covariates(i, start_col));
    y[i] = rng.bernoulli(prob) ? 1.0 : 0.0;
  }
  Matrix X(n, q + 1);
  X.col(0).setOnes();
  X.rightCols(q) = covariates;
  return Dataset::bernoulli(std::move(X), std::move(y));
}

}  // namespace pxlogit::bench
