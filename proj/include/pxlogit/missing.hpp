#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "pxlogit/solvers.hpp"

namespace pxlogit {

// Logistic data whose covariates are all binary apart from the intercept in
// column 0. Missing entries are NaN.
class MissingDataset {
 public:
  static constexpr Index kMaxColumns = 16;

  MissingDataset(Matrix Xobs, Vector y, Vector m, Vector s);

  const Matrix& Xobs() const { return X_; }
  const Vector& y() const { return y_; }
  const Vector& m() const { return m_; }
  const Vector& s() const { return s_; }
  const Vector& u() const { return u_; }
  Index n() const { return X_.rows(); }
  Index p() const { return X_.cols(); }
  Index num_configs() const { return configs_.rows(); }
  // Row k is the covariate pattern d_k: intercept 1, then bit (j-1) of k.
  const Matrix& configs() const { return configs_; }
  const std::vector<int>& consistent(Index i) const { return consistent_[static_cast<size_t>(i)]; }
  double log_binom(Index i) const { return log_binom_[i]; }
  bool is_missing(Index i, Index j) const { return std::isnan(X_(i, j)); }
  Index missing_count() const;

  // The fully observed view; throws if anything is missing.
  Dataset complete() const;

 private:
  Matrix X_;
  Vector y_, m_, s_, u_, log_binom_;
  Matrix configs_;
  std::vector<std::vector<int>> consistent_;
};

// Configurations (indices into configs()) consistent with an observed row.
std::vector<int> enumerate_consistent(const Eigen::Ref<const Vector>& xobs_row);

struct CellModel {
  Vector gamma;
  static CellModel uniform(Index num_configs);
};

struct EStepQuantities {
  // Posterior (k, p_ik) pairs per row; mass outside A_i is zero by construction.
  std::vector<std::vector<std::pair<int, double>>> pik;
  Matrix a;    // n x p, rows a_i
  Matrix B;    // p x p
  Vector Gk;   // expected (weighted) configuration counts
  Vector rhs;  // sum_i s_i u_i a_i

  Matrix dense_pik(Index num_configs) const;
};

EStepQuantities e_step(const MissingDataset& md, const Coefficients& beta, const CellModel& cells);
std::pair<Coefficients, CellModel> m_step(const EStepQuantities& eq, const MissingDataset& md);

// sum_i s_i log sum_{k in A_i} p(y_i | d_k, beta) gamma_k. This is the
// conditional form below plus sum_i s_i log P(x_obs,i | gamma), which does not
// depend on beta.
double observed_loglik_missing(const MissingDataset& md, const Coefficients& beta, const CellModel& cells);
// sum_i s_i log sum_{k in A_i} p(y_i | d_k, beta) gamma_k / sum_{A_i} gamma.
double conditional_loglik_missing(const MissingDataset& md, const Coefficients& beta, const CellModel& cells);

struct MissingConfig {
  double tol = 1e-7;
  long max_iter = 100000;
  bool px = true;
  RaySearchConfig ray_cfg{};
  bool record_trace = true;
};

struct MissingSolveResult {
  SolveResult fit;
  CellModel cells;
  std::vector<Coefficients> path;  // beta after each iteration, when traced
};

// One EM (or PX-ECME when px is set) update of (beta, gamma).
std::pair<Coefficients, CellModel> missing_step(const MissingDataset& md, const Coefficients& beta,
                                                const CellModel& cells, bool px, const RaySearchConfig& ray_cfg);

MissingSolveResult px_solve_missing(const MissingDataset& md, const Coefficients& beta0, const CellModel& gamma0,
                                    const MissingConfig& cfg = {});

}  // namespace pxlogit
