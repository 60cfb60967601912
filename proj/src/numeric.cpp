#include "pxlogit/numeric.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>

namespace pxlogit {

namespace {

double relative_residual(const Matrix& A, const Vector& x, const Vector& b) {
  const double bn = b.norm();
  const double r = (A * x - b).norm();
  return bn > 0 ? r / bn : r;
}

}  // namespace

SpdSolution solve_spd_report(const Matrix& A, const Vector& b) {
  const Index p = A.rows();
  if (A.cols() != p || b.size() != p) throw InvalidInput("solve_spd: dimension mismatch");
  if (p == 0) return {Vector(), 0.0};

  Eigen::LLT<Matrix> llt(A);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(b);
    if (x.allFinite()) return {std::move(x), 0.0};
  }

  const double scale = A.trace() / static_cast<double>(p);
  double residual = std::numeric_limits<double>::infinity();
  if (std::isfinite(scale) && scale > 0) {
    for (double f : {1e-10, 1e-8, 1e-6}) {
      const double delta = f * scale;
      Matrix J = A;
      J.diagonal().array() += delta;
      Eigen::LLT<Matrix> jl(J);
      if (jl.info() != Eigen::Success) continue;
      Vector x = jl.solve(b);
      if (!x.allFinite()) continue;
      return {std::move(x), delta};
    }
  }
  Eigen::LDLT<Matrix> ldlt(A);
  Vector x = ldlt.solve(b);
  if (x.allFinite()) residual = relative_residual(A, x, b);
  throw SingularSystem("symmetric system is singular after jitter (relative residual " + std::to_string(residual) + ")",
                       residual);
}

Vector solve_spd(const Matrix& A, const Vector& b) { return solve_spd_report(A, b).x; }

double max_eigenvalue(const Matrix& A) {
  const Index p = A.rows();
  if (A.cols() != p) throw InvalidInput("max_eigenvalue: matrix must be square");
  if (p == 0) return 0.0;
  if (!A.allFinite()) throw InvalidInput("max_eigenvalue: non-finite entries");

  // Fixed, non-symmetric start so it is unlikely to be orthogonal to the top
  // eigenvector.
  Vector v(p);
  for (Index i = 0; i < p; ++i) v[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(p + 1);
  v.normalize();

  double theta = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = A * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = v.dot(w);
    const double resid = (w - next * v).norm();
    v = w / nw;
    if (it > 0 && (std::abs(next - theta) <= 1e-12 * std::abs(next) || resid <= 1e-10 * std::abs(next))) {
      // Rayleigh quotient at the refined vector
      return std::max(0.0, v.dot(A * v));
    }
    theta = next;
  }
  throw NonConvergence("power iteration did not converge in 10000 iterations");
}

namespace {

struct Tracker {
  RayOptimum best;
  void offer(double rho, double v) {
    if (v > best.value) best = {rho, v};
  }
};

RayOptimum ray_search(const ScalarFn& f_raw, const ScalarFn* slope, const RaySearchConfig& cfg) {
  auto f = [&](double r) {
    const double v = f_raw(r);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  const double h = cfg.initial_bracket_halfwidth;
  Tracker tr;
  tr.best = {1.0, f(1.0)};
  const double f1 = tr.best.value;
  const double fl = f(1.0 - h), fr = f(1.0 + h);
  tr.offer(1.0 - h, fl);
  tr.offer(1.0 + h, fr);

  double a, b, c;
  if (f1 >= fl && f1 >= fr) {
    a = 1.0 - h;
    b = 1.0;
    c = 1.0 + h;
  } else {
    const double dir = fr > fl ? 1.0 : -1.0;
    double prev = 1.0, cur = 1.0 + dir * h, fcur = std::max(fl, fr);
    double step = h, next = cur, fnext = fcur;
    bool closed = false;
    for (int k = 0; k < cfg.max_expansions; ++k) {
      step *= 2.0;
      next = 1.0 + dir * step;
      fnext = f(next);
      tr.offer(next, fnext);
      if (!(fnext > fcur)) {
        closed = true;
        break;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
    }
    if (!closed) return tr.best;
    a = std::min(prev, next);
    b = cur;
    c = std::max(prev, next);
  }

  double cand = b;
  bool refined = false;
  if (slope != nullptr) {
    const double sa = (*slope)(a), sc = (*slope)(c);
    if (sa > 0 && sc < 0) {
      auto tol = [&](double lo, double hi) { return std::abs(hi - lo) <= 0.5 * cfg.tol; };
      boost::uintmax_t iters = static_cast<boost::uintmax_t>(cfg.max_iters);
      const auto br = boost::math::tools::toms748_solve(*slope, a, c, sa, sc, tol, iters);
      const double s1 = std::abs((*slope)(br.first)), s2 = std::abs((*slope)(br.second));
      cand = s1 <= s2 ? br.first : br.second;
      refined = true;
    }
  }
  if (!refined) {
    const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(cfg.tol))), 8,
                                std::numeric_limits<double>::digits / 2);
    boost::uintmax_t iters = static_cast<boost::uintmax_t>(cfg.max_iters);
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, a, c, bits, iters);
    cand = r.first;
  }
  tr.offer(cand, f(cand));
  return tr.best;
}

}  // namespace

RayOptimum ray_maximize(const ScalarFn& f, const RaySearchConfig& cfg) { return ray_search(f, nullptr, cfg); }

RayOptimum ray_maximize(const ScalarFn& f, const ScalarFn& slope, const RaySearchConfig& cfg) {
  return ray_search(f, &slope, cfg);
}

}  // namespace pxlogit
