#include <doctest.h>

#include "pathspace/rng.hpp"

#include <cmath>
#include <vector>

using namespace pathspace::rng;

// Reference blocks computed with numpy.random.Philox (which advances its
// counter once before the first block, so it was seeded with ctr - 1).
TEST_CASE("philox4x64-10 known answers") {
  CHECK(philox4x64({0, 0, 0, 0}, {0, 0}) ==
        Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
                0x7e68b68aec7ba23bULL});
  CHECK(philox4x64({41, 7, 3, 9}, {0x123456789abcdef0ULL, 0x0fedcba987654321ULL}) ==
        Counter{0x6cf830a76e20effbULL, 0xb5eb4a0b81cacc90ULL, 0x58730e59b3a206fdULL,
                0x01ee5a31989dc959ULL});
  const std::uint64_t max = ~std::uint64_t{0};
  CHECK(philox4x64({max - 1, max, max, max}, {max, max}) ==
        Counter{0xe04b9b661f278c4eULL, 0x1f8a609cc4b945a2ULL, 0x5f2c27a8617dcd6bULL,
                0x9f1ac32d03d7e359ULL});
}

TEST_CASE("open unit interval never hits the ends") {
  CHECK(to_open_unit(0) > 0.0);
  CHECK(to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("streams are pure functions of their coordinates") {
  std::vector<double> a(7), b(7), c(7);
  standard_normals({5, 11}, 3, channel::driver, a);
  standard_normals({5, 11}, 3, channel::driver, b);
  standard_normals({5, 12}, 3, channel::driver, c);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("normal moments") {
  const int n = 200000;
  std::vector<double> z(n);
  double s1 = 0, s2 = 0, s4 = 0;
  for (int k = 0; k < n / 4; ++k) standard_normals({1, 2}, k, channel::driver, {z.data() + 4 * k, 4});
  for (double v : z) {
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}
