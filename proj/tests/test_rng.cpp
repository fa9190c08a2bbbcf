#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "leap/rng.hpp"

using namespace leap;

TEST_CASE("streams are deterministic and tag-separated") {
  auto a = rng::substream(42, {rng::tag::drop, 7});
  auto b = rng::substream(42, {rng::tag::drop, 7});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  auto c = rng::substream(42, {rng::tag::drop, 8});
  auto d = rng::substream(43, {rng::tag::drop, 7});
  CHECK(rng::substream(42, {rng::tag::drop, 7}).next_u64() != c.next_u64());
  CHECK(rng::substream(42, {rng::tag::drop, 7}).next_u64() != d.next_u64());
}

TEST_CASE("u01 stays in [0,1)") {
  auto s = rng::substream(1, {1});
  for (int i = 0; i < 10000; ++i) {
    const double u = s.next_u01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  auto s = rng::substream(2, {2});
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("poisson mean at small and large rates") {
  auto s = rng::substream(3, {3});
  double total = 0.0;
  const int reps = 2000;
  for (int i = 0; i < reps; ++i) total += static_cast<double>(s.next_poisson(3.5));
  CHECK(total / reps == doctest::Approx(3.5).epsilon(0.05));

  // Chunked path for large rates.
  double big = 0.0;
  for (int i = 0; i < 50; ++i) big += static_cast<double>(s.next_poisson(4050.0));
  CHECK(big / 50 == doctest::Approx(4050.0).epsilon(0.01));
}

TEST_CASE("next_below is in range") {
  auto s = rng::substream(4, {4});
  for (int i = 0; i < 1000; ++i) {
    CHECK(s.next_below(7) < 7);
  }
  CHECK(s.next_below(1) == 0);
  CHECK(s.next_below(0) == 0);
}
