#pragma once

#include <cstdint>

#include "pxlogit/model.hpp"

namespace pxlogit::bench {

// Seven weighted observations with a single covariate and an intercept,
// on which Newton-Raphson from zero diverges.
Dataset builtin_table1();

struct SimulatedData {
  Dataset data;
  Vector beta_true;
};

// x_i1 = 1, x_i2 ~ N(0,1), x_ij = rho x_i,j-1 + sqrt(1 - rho^2) N(0,1) for
// 0 <= rho < 1; beta_j = Z_j T_j with Z ~ Bernoulli(0.75), T ~ t(3);
// y_i ~ Bernoulli(expit(x_i' beta)).
// Draw order: beta first, then X row by row, then y.
SimulatedData gen_ar1(Index n, Index p, double rho, std::uint64_t seed);

Vector gen_exp_weights(Index n, std::uint64_t seed);

// Pseudo-outcomes with P(y = 1) = 1 / (1 + exp(-3 num + start)) over a
// covariate table; the design is an intercept followed by all covariates.
Dataset gen_pseudo_outcomes(const Matrix& covariates, Index num_col, Index start_col, std::uint64_t seed);

}  // namespace pxlogit::bench
