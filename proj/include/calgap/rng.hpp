#pragma once

#include <array>
#include <cstdint>

namespace calgap {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Pure: the output depends only on counter and key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer; used to derive independent seeds from (seed, tag).
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Counter-based generator. A (seed, stream) pair names an independent
/// sequence, so disjoint streams can be generated in any order or in parallel
/// with identical results. Distributions are implemented here rather than via
/// <random> so the bits are the same on every standard library.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Uniform integer in [0, bound), unbiased; bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace calgap
