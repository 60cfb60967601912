#pragma once

#include <cstdint>

#include "pxlogit/bench/rng.hpp"
#include "pxlogit/model.hpp"

namespace pxlogit::testing {

struct InstanceSpec {
  Index n = 50;
  Index p = 3;
  int max_trials = 1;
  bool exp_weights = true;
  double beta_scale = 0.5;
  double x_scale = 1.0;
};

// Intercept plus Gaussian covariates, binomial responses drawn at a random
// moderate coefficient vector.
inline Dataset random_dataset(const InstanceSpec& spec, std::uint64_t seed) {
  bench::Rng rng(seed);
  Matrix X(spec.n, spec.p);
  for (Index i = 0; i < spec.n; ++i) {
    X(i, 0) = 1.0;
    for (Index j = 1; j < spec.p; ++j) X(i, j) = spec.x_scale * rng.normal();
  }
  Vector beta(spec.p);
  for (Index j = 0; j < spec.p; ++j) beta[j] = spec.beta_scale * rng.normal();
  Vector y(spec.n), m(spec.n), s(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    m[i] = 1 + static_cast<int>(rng.uniform() * spec.max_trials);
    if (m[i] > spec.max_trials) m[i] = spec.max_trials;
    const double pr = sigmoid(X.row(i).dot(beta));
    double yi = 0;
    for (int t = 0; t < static_cast<int>(m[i]); ++t) yi += rng.bernoulli(pr) ? 1 : 0;
    y[i] = yi;
    s[i] = spec.exp_weights ? rng.exponential() : 1.0;
  }
  return Dataset(std::move(X), std::move(y), std::move(m), std::move(s));
}

inline Vector random_vector(Index p, std::uint64_t seed, double scale = 1.0) {
  bench::Rng rng(seed);
  Vector v(p);
  for (Index j = 0; j < p; ++j) v[j] = scale * rng.normal();
  return v;
}

}  // namespace pxlogit::testing
