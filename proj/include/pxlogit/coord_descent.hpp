#pragma once

#include "pxlogit/solvers.hpp"

namespace pxlogit {

enum class WeightMode { em, nr };

WeightMode parse_weight_mode(const std::string& name);
std::string to_string(WeightMode mode);

struct CDConfig {
  Index block_size = 0;  // 0 means p
  WeightMode weight_mode = WeightMode::em;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double tol = 1e-7;
  long max_cycles = 100000;
  bool expansion_on = true;
  RaySearchConfig ray_cfg{};
  bool record_trace = true;

  Penalty penalty() const { return Penalty::elastic_net(lambda1, lambda2); }
};

struct CDState {
  Vector theta;
  double alpha = 1.0;
  Vector beta;
  Matrix A;       // S^{1/2} W^{1/2} X at the last refresh
  Vector col_sq;  // squared column norms of A
  Vector linear;  // linear term of the quadratic model, per coordinate
  Vector resid;   // A * theta, maintained incrementally
};

// Weights at beta0, alpha = 1, theta = beta0.
CDState cd_init(const Dataset& d, const CDConfig& cfg, const Coefficients& beta0);

// Updates theta_j in place and returns the new value.
double cd_coordinate_update(CDState& state, const Dataset& d, const CDConfig& cfg, Index j);

// Alpha line search (when enabled), beta = alpha * theta, then new weights.
void cd_refresh(CDState& state, const Dataset& d, const CDConfig& cfg);

bool cd_refresh_due(Index j, Index p, Index block_size);

SolveResult cd_solve(const Dataset& d, const CDConfig& cfg, const Coefficients& beta0);

double kkt_check(const Dataset& d, const Coefficients& beta, double lambda1, double lambda2);

}  // namespace pxlogit
