#pragma once

#include <cstdint>
#include <initializer_list>

namespace leap::rng {

// Counter-derived SplitMix64 stream. A (seed, tag path) pair yields the same
// sequence on every platform, so parallel callers can derive independent
// per-entity streams without sharing mutable state.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64();
  double next_u01();                           // uniform in [0, 1)
  double next_normal();                        // standard normal, Box-Muller
  std::uint64_t next_below(std::uint64_t n);   // uniform in [0, n), unbiased
  long long next_poisson(double mean);

 private:
  std::uint64_t state_;
};

std::uint64_t mix(std::uint64_t h, std::uint64_t v);

// Named substream: hashes the tag path into the seed.
Stream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

// Stage tags used to derive named substreams from the global seed.
namespace tag {
inline constexpr std::uint64_t topology = 0x746f706f6c6f6779ull;
inline constexpr std::uint64_t pico = 0x7069636f00000000ull;
inline constexpr std::uint64_t drop = 0x64726f7075650000ull;
inline constexpr std::uint64_t shadow = 0x736861646f770000ull;
inline constexpr std::uint64_t subsample = 0x73756273616d70ull;
inline constexpr std::uint64_t solver_draw = 0x736c5f6472617773ull;
inline constexpr std::uint64_t solver_diag = 0x736c5f6469616700ull;
inline constexpr std::uint64_t mc_oracle = 0x6d635f6f7261636cull;
}  // namespace tag

}  // namespace leap::rng
