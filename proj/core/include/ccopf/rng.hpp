#pragma once

#include <cstdint>
#include <initializer_list>

#include "ccopf/normal.hpp"

namespace ccopf {

// SplitMix64 run in pure counter mode: the n-th output is mix(key + n*gamma),
// so a stream is a function of (key, n) alone. Substreams are derived by
// folding identifying integers (trial, scenario, ...) into the key with the
// same mixer, which keeps every (seed, ids...) tuple on an independent
// stream. Fast, stateless to fork, and reproducible across platforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key), counter_(0) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Deterministic key for a labelled substream of `seed`.
  static std::uint64_t derive_key(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> ids) {
    std::uint64_t k = mix(seed);
    for (std::uint64_t id : ids) k = mix(k ^ (id + 0x9e3779b97f4a7c15ULL));
    return k;
  }

  static CounterRng substream(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> ids) {
    return CounterRng(derive_key(seed, ids));
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on the open interval (0,1); 53-bit mantissa, offset keeps the
  // endpoints out so quantile transforms stay finite.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inverse CDF; one uniform per variate, which keeps
  // substream consumption counts easy to reason about.
  double next_gaussian() { return norm_ppf(next_uniform()); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace ccopf
