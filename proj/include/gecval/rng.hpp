#ifndef GECVAL_RNG_HPP
#define GECVAL_RNG_HPP

#include <cstdint>

namespace gecval {

// SplitMix64. Scores sampled with it must reproduce bit-for-bit across
// implementations, so the generator is part of the file-format contract
// (see docs/FORMATS.md) rather than an implementation detail.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform pick in [0, n); n >= 1. Plain modulo, documented as such: the
  // bias at these ranges is irrelevant and the arithmetic is portable.
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

// Finalizer of SplitMix64, used to derive independent per-iteration seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline SplitMix64 iteration_stream(std::uint64_t seed, std::uint64_t iteration) {
  return SplitMix64(mix64(seed ^ (iteration + 1)));
}

}  // namespace gecval

#endif  // GECVAL_RNG_HPP
