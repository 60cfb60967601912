#include <gtest/gtest.h>

#include <cmath>

#include "pxlogit/bench/rng.hpp"
#include "pxlogit/penalty.hpp"

using namespace pxlogit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double quad_obj(const Penalty& pen, double q, double l, double b) { return 0.5 * q * b * b - l * b + pen.component(0, b); }

Penalty random_penalty(bench::Rng& rng) {
  const double lam = 3.0 * rng.uniform();
  switch (static_cast<int>(rng.uniform() * 5)) {
    case 0: return Penalty::none();
    case 1: return Penalty::l1(lam);
    case 2: return Penalty::l2(lam);
    case 3: return Penalty::elastic_net(lam, 3.0 * rng.uniform());
    default: return Penalty::scad(lam, 2.05 + 3.0 * rng.uniform());
  }
}

}  // namespace

TEST(PenaltyValue, Examples) {
  EXPECT_DOUBLE_EQ(Penalty::elastic_net(1, 2).value(vec({1, -1})), 4.0);
  EXPECT_EQ(Penalty::none().value(vec({3, -8})), 0.0);
  EXPECT_DOUBLE_EQ(Penalty::scad(1, 3.7).value(vec({0.5})), 0.5);
  EXPECT_DOUBLE_EQ(Penalty::l1(1).value(vec({-3, 0.5})), 3.5);
  EXPECT_DOUBLE_EQ(Penalty::l2(2).value(vec({1, 1})), 2.0);
}

TEST(PenaltyValue, ScadPiecesAreContinuous) {
  const Penalty p = Penalty::scad(1.2, 3.7);
  for (double knot : {1.2, 1.2 * 3.7}) {
    EXPECT_NEAR(p.component(0, knot - 1e-9), p.component(0, knot + 1e-9), 1e-8);
  }
  EXPECT_DOUBLE_EQ(p.component(0, 100.0), 0.5 * 1.2 * 1.2 * 4.7);
}

TEST(PenaltyValue, ExemptCoordinatesAreFree) {
  const Penalty p = Penalty::elastic_net(1, 1).with_exempt({0});
  EXPECT_DOUBLE_EQ(p.value(vec({5, 1})), 1.5);
  EXPECT_DOUBLE_EQ(p.scalar_quadratic_penalized_min(0, 2.0, 3.0), 1.5);
  EXPECT_DOUBLE_EQ(p.ridge(0), 0.0);
  EXPECT_DOUBLE_EQ(p.ridge(1), 1.0);
}

TEST(PenaltyValue, ZeroAtOriginAndNonnegative) {
  bench::Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const Penalty p = random_penalty(rng);
    EXPECT_EQ(p.value(Vector::Zero(4)), 0.0);
    Vector b(4);
    for (Index j = 0; j < 4; ++j) b[j] = 5 * rng.normal();
    EXPECT_GE(p.value(b), 0.0);
  }
}

TEST(PenaltyValue, RejectsBadParameters) {
  EXPECT_THROW(Penalty::l1(-1), InvalidInput);
  EXPECT_THROW(Penalty::scad(1, 2.0), InvalidInput);
  EXPECT_THROW(Penalty::none().scalar_quadratic_penalized_min(0, 0.0, 1.0), InvalidInput);
}

TEST(RayValue, Examples) {
  const Vector b = vec({1, 1});
  EXPECT_EQ(Penalty::l1(2).ray_value(b, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(Penalty::elastic_net(1, 3).ray_value(b, 1.0), Penalty::elastic_net(1, 3).value(b));
  EXPECT_DOUBLE_EQ(Penalty::l2(2).ray_value(b, 3.0), 18.0);
  EXPECT_DOUBLE_EQ(Penalty::l1(2).ray_value(b, -1.5), 6.0);
}

TEST(RayValue, SlopeMatchesFiniteDifference) {
  bench::Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    const Penalty p = random_penalty(rng);
    Vector b(3);
    for (Index j = 0; j < 3; ++j) b[j] = 3 * rng.normal();
    const double rho = 0.1 + 2 * rng.uniform();
    const double h = 1e-6;
    const double fd = (p.ray_value(b, rho + h) - p.ray_value(b, rho - h)) / (2 * h);
    // skip the few draws that straddle a SCAD knot
    if (p.kind() == PenaltyKind::scad) {
      bool near_knot = false;
      for (Index j = 0; j < 3; ++j) {
        const double a = std::abs(rho * b[j]);
        near_knot |= std::abs(a - p.lambda1()) < 1e-4 || std::abs(a - p.scad_a() * p.lambda1()) < 1e-4;
      }
      if (near_knot) continue;
    }
    ASSERT_NEAR(p.ray_slope(b, rho), fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(ScalarMin, Examples) {
  for (double l : {-1.0, 0.0, 0.3, 1.0}) EXPECT_EQ(Penalty::l1(1).scalar_quadratic_penalized_min(0, 1.0, l), 0.0);
  EXPECT_DOUBLE_EQ(Penalty::none().scalar_quadratic_penalized_min(0, 2.0, 3.0), 1.5);
  EXPECT_DOUBLE_EQ(Penalty::elastic_net(1, 1).scalar_quadratic_penalized_min(0, 1.0, 3.0), 1.0);
}

TEST(ScalarMin, ElasticNetExampleFineGrid) {
  const Penalty p = Penalty::elastic_net(1, 1);
  double best = 0.0, fbest = quad_obj(p, 1.0, 3.0, 0.0);
  for (long k = -5000000; k <= 5000000; ++k) {
    const double b = k * 1e-6;
    const double f = quad_obj(p, 1.0, 3.0, b);
    if (f < fbest) {
      fbest = f;
      best = b;
    }
  }
  EXPECT_NEAR(best, 1.0, 1e-6);
  EXPECT_NEAR(p.scalar_quadratic_penalized_min(0, 1.0, 3.0), best, 1e-6);
}

TEST(ScalarMin, RandomDrawsAgainstGridOracle) {
  bench::Rng rng(2024);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const Penalty p = random_penalty(rng);
    const double q = 0.05 + 5 * rng.uniform();
    const double l = 20 * (rng.uniform() - 0.5);
    const double b = p.scalar_quadratic_penalized_min(0, q, l);
    const double fb = quad_obj(p, q, l, b);
    ASSERT_LE(fb, quad_obj(p, q, l, b + 1e-4) + 1e-12) << t;
    ASSERT_LE(fb, quad_obj(p, q, l, b - 1e-4) + 1e-12) << t;
    double grid = INFINITY;
    for (int k = -20000; k <= 20000; ++k) grid = std::min(grid, quad_obj(p, q, l, k * 1e-3));
    ASSERT_LE(fb, grid + 1e-8) << "draw " << t << " kind " << to_string(p.kind()) << " q=" << q << " l=" << l;
    if (p.kind() == PenaltyKind::l1 || p.kind() == PenaltyKind::elastic_net) {
      ASSERT_TRUE(b == 0.0 || (b > 0) == (l > 0));
    }
  }
}
