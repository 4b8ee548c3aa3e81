#pragma once

// Counter-based random numbers. Every variate is a pure function of a key and
// one or two counters, so results do not depend on evaluation order or on the
// number of threads.

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace kcap {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Top 53 bits of a hash as a double in [0,1).
constexpr double to_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Keyed hash of an ordered pair. (a,b) and (b,a) give unrelated outputs.
class PairHash {
 public:
  constexpr explicit PairHash(std::uint64_t key) noexcept
      : key_(mix64(key + 0x9e3779b97f4a7c15ULL)) {}

  constexpr std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const noexcept { return finish(row(a), b); }

  /// The hash split in two: row(a) can be reused across many b.
  constexpr std::uint64_t row(std::uint64_t a) const noexcept {
    return mix64(key_ ^ (a * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  }
  static constexpr std::uint64_t finish(std::uint64_t row, std::uint64_t b) noexcept {
    return mix64(row ^ (b * 0xaef17502108ef2d9ULL + 0x632be59bd9b4e019ULL));
  }

  constexpr double uniform(std::uint64_t a, std::uint64_t b) const noexcept {
    return to_unit((*this)(a, b));
  }

 private:
  std::uint64_t key_;
};

/// Derives an independent 64-bit seed from (seed, a, b).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return PairHash(seed)(a, b);
}

/// Sequential SplitMix64 stream.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  constexpr double uniform() noexcept { return to_unit(next()); }

  /// Uniform integer in [0, range); range must be positive. Lemire's method.
  std::uint64_t bounded(std::uint64_t range) noexcept {
    __uint128_t m = static_cast<__uint128_t>(next()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t floor = (0 - range) % range;
      while (low < floor) {
        m = static_cast<__uint128_t>(next()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Uniform m-subset of {0,...,population-1} (Floyd's algorithm), sorted.
inline std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t m,
                                                             Stream& stream) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(m * 2);
  for (std::uint64_t j = population - m; j < population; ++j) {
    const std::uint64_t t = stream.bounded(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kcap
