#pragma once

#include <cstdint>

namespace hpaudit {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based pseudo-random stream.
///
/// A stream is identified by (seed, stream, substream). The n-th draw is a
/// pure function of that identity and n, so work split into fixed-size
/// chunks gives identical results no matter how many threads process the
/// chunks or in which order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0,
                        std::uint64_t substream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;

  /// +1 or -1 with equal probability.
  int sign() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hpaudit
