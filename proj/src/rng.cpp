#include "leap/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace leap::rng {

namespace {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Stream::next_u64() { return splitmix64_step(state_); }

double Stream::next_u01() {
  // 53 random mantissa bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_normal() {
  // Two fresh uniforms per draw keeps the stream position independent of
  // call history.
  double u1 = 1.0 - next_u01();  // (0, 1]
  double u2 = next_u01();
  double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Stream::next_below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;
  std::uint64_t x = next_u64();
  while (x > limit) x = next_u64();
  return x % n;
}

long long Stream::next_poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  long long total = 0;
  // Knuth's product method underflows past mean ~700; draw in chunks.
  while (mean > 400.0) {
    const double limit = std::exp(-400.0);
    long long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= 1.0 - next_u01();
    } while (p > limit);
    total += k - 1;
    mean -= 400.0;
  }
  const double limit = std::exp(-mean);
  long long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= 1.0 - next_u01();
  } while (p > limit);
  return total + k - 1;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  std::uint64_t s = h;
  return splitmix64_step(s);
}

Stream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix(0x6c656170ull, seed);
  for (std::uint64_t t : tags) h = mix(h, t);
  return Stream(h);
}

}  // namespace leap::rng
