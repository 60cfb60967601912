#include "pxlogit/penalty.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pxlogit {

std::string to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::none: return "none";
    case PenaltyKind::l1: return "l1";
    case PenaltyKind::l2: return "l2";
    case PenaltyKind::elastic_net: return "elastic_net";
    case PenaltyKind::scad: return "scad";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(const std::string& name) {
  if (name == "none") return PenaltyKind::none;
  if (name == "l1" || name == "lasso") return PenaltyKind::l1;
  if (name == "l2" || name == "ridge") return PenaltyKind::l2;
  if (name == "elastic_net" || name == "enet") return PenaltyKind::elastic_net;
  if (name == "scad") return PenaltyKind::scad;
  throw InvalidInput("unknown penalty '" + name + "'");
}

namespace {
void check_nonneg(double v, const char* what) {
  if (!(v >= 0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be finite and nonnegative");
}
}  // namespace

Penalty Penalty::none() { return {}; }

Penalty Penalty::l1(double lambda1) {
  check_nonneg(lambda1, "lambda1");
  return Penalty(PenaltyKind::l1, lambda1, 0.0, 3.7);
}

Penalty Penalty::l2(double lambda2) {
  check_nonneg(lambda2, "lambda2");
  return Penalty(PenaltyKind::l2, 0.0, lambda2, 3.7);
}

Penalty Penalty::elastic_net(double lambda1, double lambda2) {
  check_nonneg(lambda1, "lambda1");
  check_nonneg(lambda2, "lambda2");
  return Penalty(PenaltyKind::elastic_net, lambda1, lambda2, 3.7);
}

Penalty Penalty::scad(double lambda, double a) {
  check_nonneg(lambda, "lambda");
  if (!(a > 2) || !std::isfinite(a)) throw InvalidInput("SCAD shape a must exceed 2");
  return Penalty(PenaltyKind::scad, lambda, 0.0, a);
}

Penalty Penalty::with_exempt(std::vector<Index> idx) const {
  Penalty out = *this;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (!idx.empty() && idx.front() < 0) throw InvalidInput("exempt index must be nonnegative");
  out.exempt_ = std::move(idx);
  return out;
}

bool Penalty::is_exempt(Index j) const { return std::binary_search(exempt_.begin(), exempt_.end(), j); }

bool Penalty::is_quadratic() const {
  return kind_ == PenaltyKind::none || kind_ == PenaltyKind::l2 ||
         (kind_ == PenaltyKind::elastic_net && lambda1_ == 0.0);
}

double Penalty::ridge(Index j) const {
  if (is_exempt(j)) return 0.0;
  return (kind_ == PenaltyKind::l2 || kind_ == PenaltyKind::elastic_net) ? lambda2_ : 0.0;
}

Vector Penalty::ridge_diagonal(Index p) const {
  Vector r(p);
  for (Index j = 0; j < p; ++j) r[j] = ridge(j);
  return r;
}

double Penalty::component(Index j, double b) const {
  if (is_exempt(j)) return 0.0;
  const double a = std::abs(b);
  switch (kind_) {
    case PenaltyKind::none: return 0.0;
    case PenaltyKind::l1: return lambda1_ * a;
    case PenaltyKind::l2: return 0.5 * lambda2_ * b * b;
    case PenaltyKind::elastic_net: return lambda1_ * a + 0.5 * lambda2_ * b * b;
    case PenaltyKind::scad: {
      const double lam = lambda1_;
      if (a <= lam) return lam * a;
      if (a <= a_ * lam) return (2.0 * a_ * lam * a - a * a - lam * lam) / (2.0 * (a_ - 1.0));
      return 0.5 * lam * lam * (a_ + 1.0);
    }
  }
  return 0.0;
}

double Penalty::slope_unchecked(double b) const {
  const double sg = (b > 0) - (b < 0);
  const double a = std::abs(b);
  switch (kind_) {
    case PenaltyKind::none: return 0.0;
    case PenaltyKind::l1: return lambda1_ * sg;
    case PenaltyKind::l2: return lambda2_ * b;
    case PenaltyKind::elastic_net: return lambda1_ * sg + lambda2_ * b;
    case PenaltyKind::scad: {
      const double lam = lambda1_;
      if (a <= lam) return lam * sg;
      if (a <= a_ * lam) return sg * (a_ * lam - a) / (a_ - 1.0);
      return 0.0;
    }
  }
  return 0.0;
}

double Penalty::component_slope(Index j, double b) const { return is_exempt(j) ? 0.0 : slope_unchecked(b); }

double Penalty::kink(Index j) const {
  if (is_exempt(j)) return 0.0;
  switch (kind_) {
    case PenaltyKind::l1:
    case PenaltyKind::elastic_net:
    case PenaltyKind::scad: return lambda1_;
    default: return 0.0;
  }
}

double Penalty::value(const Vector& beta) const {
  if (kind_ == PenaltyKind::none) return 0.0;
  double acc = 0.0;
  for (Index j = 0; j < beta.size(); ++j) acc += component(j, beta[j]);
  return acc;
}

double Penalty::ray_value(const Vector& beta, double rho) const { return value(rho * beta); }

double Penalty::ray_slope(const Vector& beta, double rho) const {
  if (kind_ == PenaltyKind::none) return 0.0;
  double acc = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    if (is_exempt(j) || beta[j] == 0.0) continue;
    acc += beta[j] * slope_unchecked(rho * beta[j]);
  }
  return acc;
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double Penalty::scalar_quadratic_penalized_min(Index j, double q, double l) const {
  if (!(q > 0) || !std::isfinite(q)) throw InvalidInput("curvature must be positive");
  if (is_exempt(j)) return l / q;
  switch (kind_) {
    case PenaltyKind::none: return l / q;
    case PenaltyKind::l1: return soft_threshold(l, lambda1_) / q;
    case PenaltyKind::l2: return l / (q + lambda2_);
    case PenaltyKind::elastic_net: return soft_threshold(l, lambda1_) / (q + lambda2_);
    case PenaltyKind::scad: break;
  }

  // SCAD: solve on t = |b| >= 0 with L = |l|, then restore the sign of l.
  const double lam = lambda1_, L = std::abs(l), sg = l < 0 ? -1.0 : 1.0;
  auto obj = [&](double t) { return 0.5 * q * t * t - L * t + component(j, t); };
  std::array<double, 8> cand{};
  int nc = 0;
  cand[nc++] = 0.0;
  cand[nc++] = lam;
  cand[nc++] = a_ * lam;
  cand[nc++] = std::clamp((L - lam) / q, 0.0, lam);
  const double curv = q - 1.0 / (a_ - 1.0);
  if (curv > 0) cand[nc++] = std::clamp((L - a_ * lam / (a_ - 1.0)) / curv, lam, a_ * lam);
  cand[nc++] = std::max(L / q, a_ * lam);
  double best = 0.0, fbest = obj(0.0);
  for (int c = 1; c < nc; ++c) {
    const double f = obj(cand[c]);
    if (f < fbest) {
      fbest = f;
      best = cand[c];
    }
  }
  return sg * best;
}

double penalized_loglik(const Dataset& d, const Coefficients& beta, const Penalty& pen) {
  return weighted_loglik(d, beta) - pen.value(beta);
}

}  // namespace pxlogit
