#include "pxlogit/missing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace pxlogit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string cell_msg(const char* what, Index i, Index j) {
  std::ostringstream os;
  os << what << " (row " << i + 1 << ", column " << j + 1 << ")";
  return os.str();
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// log p(y_i | d_k, beta) without the binomial constant.
double kernel(double y, double m, double eta) { return y * eta - m * log1pexp(eta); }

}  // namespace

MissingDataset::MissingDataset(Matrix Xobs, Vector y, Vector m, Vector s)
    : X_(std::move(Xobs)), y_(std::move(y)), m_(std::move(m)), s_(std::move(s)) {
  const Index n = X_.rows(), p = X_.cols();
  if (p < 1) throw InvalidInput("missing-covariate data needs an intercept column");
  if (p > kMaxColumns) throw InvalidInput("missing-covariate EM enumerates 2^(p-1) patterns; p must be at most 16");
  for (Index i = 0; i < n; ++i) {
    if (std::isnan(X_(i, 0)) || X_(i, 0) != 1.0) throw InvalidInput(cell_msg("intercept must be observed and equal 1", i, 0));
    for (Index j = 1; j < p; ++j) {
      const double v = X_(i, j);
      if (!std::isnan(v) && v != 0.0 && v != 1.0) throw InvalidInput(cell_msg("covariate must be 0, 1 or missing", i, j));
    }
  }
  // Borrow the response checks from Dataset.
  Matrix filled = X_.unaryExpr([](double v) { return std::isnan(v) ? 0.0 : v; });
  const Dataset check(std::move(filled), y_, m_, s_);
  u_ = check.u();
  log_binom_.resize(n);
  for (Index i = 0; i < n; ++i)
    log_binom_[i] = std::lgamma(m_[i] + 1) - std::lgamma(y_[i] + 1) - std::lgamma(m_[i] - y_[i] + 1);

  const Index K = Index{1} << (p - 1);
  configs_.resize(K, p);
  for (Index k = 0; k < K; ++k) {
    configs_(k, 0) = 1.0;
    for (Index j = 1; j < p; ++j) configs_(k, j) = static_cast<double>((k >> (j - 1)) & 1);
  }
  consistent_.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) consistent_.push_back(enumerate_consistent(X_.row(i).transpose()));
}

Index MissingDataset::missing_count() const {
  return X_.unaryExpr([](double v) { return std::isnan(v) ? 1.0 : 0.0; }).sum();
}

Dataset MissingDataset::complete() const {
  if (missing_count() > 0) throw InvalidInput("dataset has missing covariates");
  return Dataset(X_, y_, m_, s_);
}

std::vector<int> enumerate_consistent(const Eigen::Ref<const Vector>& row) {
  const Index p = row.size();
  if (p > MissingDataset::kMaxColumns) throw InvalidInput("row has more than 16 columns");
  int base = 0;
  std::vector<int> miss;
  for (Index j = 1; j < p; ++j) {
    if (std::isnan(row[j])) {
      miss.push_back(static_cast<int>(j - 1));
    } else if (row[j] == 1.0) {
      base |= 1 << (j - 1);
    }
  }
  std::vector<int> out;
  out.reserve(size_t{1} << miss.size());
  for (int sub = 0; sub < (1 << miss.size()); ++sub) {
    int k = base;
    for (size_t b = 0; b < miss.size(); ++b)
      if ((sub >> b) & 1) k |= 1 << miss[b];
    out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CellModel CellModel::uniform(Index num_configs) {
  return {Vector::Constant(num_configs, 1.0 / static_cast<double>(num_configs))};
}

Matrix EStepQuantities::dense_pik(Index num_configs) const {
  Matrix P = Matrix::Zero(static_cast<Index>(pik.size()), num_configs);
  for (size_t i = 0; i < pik.size(); ++i)
    for (const auto& [k, v] : pik[i]) P(static_cast<Index>(i), k) = v;
  return P;
}

EStepQuantities e_step(const MissingDataset& md, const Coefficients& beta, const CellModel& cells) {
  const Index n = md.n(), p = md.p(), K = md.num_configs();
  if (beta.size() != p || cells.gamma.size() != K) throw InvalidInput("e_step: dimension mismatch");
  const Matrix& D = md.configs();
  const Vector eta = D * beta;

  EStepQuantities eq;
  eq.pik.resize(static_cast<size_t>(n));
  eq.a = Matrix::Zero(n, p);
  eq.Gk = Vector::Zero(K);
  Vector wsum = Vector::Zero(K);
  std::vector<double> lw;
  for (Index i = 0; i < n; ++i) {
    const auto& Ai = md.consistent(i);
    lw.assign(Ai.size(), kNegInf);
    for (size_t c = 0; c < Ai.size(); ++c) {
      const double g = cells.gamma[Ai[c]];
      if (g > 0) lw[c] = std::log(g) + kernel(md.y()[i], md.m()[i], eta[Ai[c]]);
    }
    const double lse = log_sum_exp(lw);
    if (!std::isfinite(lse)) {
      std::ostringstream os;
      os << "row " << i + 1 << " has zero probability under the current cell model";
      throw InvalidInput(os.str());
    }
    auto& row = eq.pik[static_cast<size_t>(i)];
    row.reserve(Ai.size());
    const double s = md.s()[i];
    for (size_t c = 0; c < Ai.size(); ++c) {
      const double pk = std::exp(lw[c] - lse);
      if (pk == 0.0) continue;
      const int k = Ai[c];
      row.emplace_back(k, pk);
      eq.a.row(i) += pk * D.row(k);
      eq.Gk[k] += s * pk;
      wsum[k] += s * pk * pg_weight(eta[k], md.m()[i]);
    }
  }
  eq.B = D.transpose() * (D.array().colwise() * wsum.array()).matrix();
  eq.B = 0.5 * (eq.B + eq.B.transpose());
  eq.rhs = eq.a.transpose() * md.s().cwiseProduct(md.u());
  return eq;
}

std::pair<Coefficients, CellModel> m_step(const EStepQuantities& eq, const MissingDataset& md) {
  (void)md;
  Coefficients beta = solve_spd(eq.B, eq.rhs);
  const double total = eq.Gk.sum();
  if (!(total > 0)) throw InvalidInput("m_step: expected counts sum to zero");
  return {std::move(beta), CellModel{eq.Gk / total}};
}

namespace {

struct MixtureEval {
  double value = 0.0;
  double slope = 0.0;
};

// Joint observed log-likelihood at rho * beta (eta_cfg = D beta) and its
// derivative in rho.
MixtureEval mixture_along_ray(const MissingDataset& md, const Vector& eta_cfg, const CellModel& cells, double rho,
                              bool conditional) {
  MixtureEval out;
  std::vector<double> lw;
  for (Index i = 0; i < md.n(); ++i) {
    const double s = md.s()[i];
    if (s == 0.0) continue;
    const auto& Ai = md.consistent(i);
    lw.assign(Ai.size(), kNegInf);
    double gmass = 0.0;
    for (size_t c = 0; c < Ai.size(); ++c) {
      const double g = cells.gamma[Ai[c]];
      gmass += g;
      if (g > 0) lw[c] = std::log(g) + kernel(md.y()[i], md.m()[i], rho * eta_cfg[Ai[c]]);
    }
    const double lse = log_sum_exp(lw);
    double row = lse + md.log_binom(i);
    if (conditional) row -= std::log(gmass);
    out.value += s * row;
    if (!std::isfinite(lse)) continue;
    double sl = 0.0;
    for (size_t c = 0; c < Ai.size(); ++c) {
      if (lw[c] == kNegInf) continue;
      const double e = eta_cfg[Ai[c]];
      sl += std::exp(lw[c] - lse) * e * (md.y()[i] - md.m()[i] * sigmoid(rho * e));
    }
    out.slope += s * sl;
  }
  return out;
}

}  // namespace

double observed_loglik_missing(const MissingDataset& md, const Coefficients& beta, const CellModel& cells) {
  return mixture_along_ray(md, md.configs() * beta, cells, 1.0, false).value;
}

double conditional_loglik_missing(const MissingDataset& md, const Coefficients& beta, const CellModel& cells) {
  return mixture_along_ray(md, md.configs() * beta, cells, 1.0, true).value;
}

std::pair<Coefficients, CellModel> missing_step(const MissingDataset& md, const Coefficients& beta,
                                                const CellModel& cells, bool px, const RaySearchConfig& ray_cfg) {
  auto [b, g] = m_step(e_step(md, beta, cells), md);
  if (!px || b.isZero(0.0)) return {std::move(b), std::move(g)};
  const Vector eta_cfg = md.configs() * b;
  auto f = [&](double r) { return mixture_along_ray(md, eta_cfg, g, r, false).value; };
  auto df = [&](double r) { return mixture_along_ray(md, eta_cfg, g, r, false).slope; };
  const RayOptimum opt = ray_maximize(f, df, ray_cfg);
  if (opt.rho != 1.0) b *= opt.rho;
  return {std::move(b), std::move(g)};
}

MissingSolveResult px_solve_missing(const MissingDataset& md, const Coefficients& beta0, const CellModel& gamma0,
                                    const MissingConfig& cfg) {
  if (beta0.size() != md.p() || gamma0.gamma.size() != md.num_configs())
    throw InvalidInput("px_solve_missing: starting values have the wrong size");
  if ((gamma0.gamma.array() < 0).any() || std::abs(gamma0.gamma.sum() - 1.0) > 1e-12)
    throw InvalidInput("px_solve_missing: gamma0 must lie on the simplex");
  using Clock = std::chrono::steady_clock;
  MissingSolveResult out;
  SolveResult& res = out.fit;
  Coefficients beta = beta0;
  CellModel cells = gamma0;
  double obj = observed_loglik_missing(md, beta, cells);
  if (cfg.record_trace) {
    res.trace.push_back({0, obj, obj, 0.0, 0.0});
    out.path.push_back(beta);
  }
  long t = 0;
  try {
    while (t < cfg.max_iter) {
      ++t;
      const auto start = Clock::now();
      auto [b, g] = missing_step(md, beta, cells, cfg.px, cfg.ray_cfg);
      const double step = std::sqrt((b - beta).squaredNorm() + (g.gamma - cells.gamma).squaredNorm());
      beta = std::move(b);
      cells = std::move(g);
      obj = observed_loglik_missing(md, beta, cells);
      const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      if (cfg.record_trace) {
        res.trace.push_back({t, obj, obj, step, elapsed});
        out.path.push_back(beta);
      }
      if (!std::isfinite(obj) || beta.norm() > 1e8) {
        res.diverged = true;
        res.message = "iterates diverged";
        break;
      }
      if (step < cfg.tol) {
        res.converged = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.message = e.what();
  }
  res.iterations = t;
  res.beta_hat = beta;
  res.final_loglik = obj;
  res.final_penalized_loglik = obj;
  out.cells = cells;
  return out;
}

}  // namespace pxlogit
