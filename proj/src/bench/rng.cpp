#include "pxlogit/bench/rng.hpp"

#include <cmath>

namespace pxlogit::bench {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  return u * f;
}

double Rng::exponential() { return -std::log1p(-uniform()); }

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::student_t3() {
  const double z = normal();
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double g = normal();
    chi2 += g * g;
  }
  return z / std::sqrt(chi2 / 3.0);
}

}  // namespace pxlogit::bench
