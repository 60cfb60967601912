#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace pxlogit::bench {

// Portable variate generation on top of std::mt19937_64, whose output
// sequence is fixed by the standard. The library distributions in <random>
// are implementation-defined, so all transforms are done here:
//   uniform      (x >> 11) * 2^-53, in [0, 1)
//   normal       Marsaglia polar method, second variate cached
//   exponential  -log(1 - U)
//   bernoulli    U < p
//   t(3)         Z / sqrt(chi2_3 / 3), chi2_3 a sum of three squared normals
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform();
  double normal();
  double exponential();
  bool bernoulli(double p);
  double student_t3();

 private:
  std::mt19937_64 eng_;
  std::optional<double> spare_;
};

}  // namespace pxlogit::bench
