#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "depcov/exact_sum.hpp"
#include "depcov/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace depcov;

TEST_CASE("exact sum survives catastrophic cancellation") {
  CHECK(exact_sum(std::vector<double>{1e100, 1.0, -1e100}) == 1.0);
  // the binary values of 0.1 + 0.2 + 0.3 - 0.6 sum to 2^-55 exactly
  CHECK(exact_sum(std::vector<double>{0.1, 0.2, 0.3, -0.6}) == std::ldexp(1.0, -55));
  CHECK(exact_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("exact sum rounds to the nearest double") {
  // 1 + 2^-53 + 2^-53: naive left-to-right gives 1, the exact sum is 1 + 2^-52
  const double tiny = std::ldexp(1.0, -53);
  CHECK(exact_sum(std::vector<double>{1.0, tiny, tiny}) == 1.0 + std::ldexp(1.0, -52));
  // half-way case 1 + 2^-53 rounds to even (1.0)
  CHECK(exact_sum(std::vector<double>{1.0, tiny}) == 1.0);
  // slightly above half-way rounds up
  CHECK(exact_sum(std::vector<double>{1.0, tiny, std::ldexp(1.0, -80)}) == 1.0 + std::ldexp(1.0, -52));
}

TEST_CASE("exact sum is independent of summation order") {
  Engine engine = stream(7, "exact-sum", 0);
  std::lognormal_distribution<double> mag(0.0, 6.0);
  std::vector<double> values(2000);
  for (auto& v : values) v = (engine() & 1 ? 1.0 : -1.0) * mag(engine);
  const double reference = exact_sum(values);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(values.begin(), values.end(), engine);
    CHECK(exact_sum(values) == reference);
  }
}

TEST_CASE("exact sum propagates non-finite terms") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(exact_sum(std::vector<double>{1.0, inf, 2.0}) == inf);
  CHECK(std::isnan(exact_sum(std::vector<double>{inf, -inf})));
}
