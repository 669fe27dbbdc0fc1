#include "hpaudit/random_stream.hpp"

namespace hpaudit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t substream) noexcept
    : key_(mix64(mix64(mix64(seed + kGolden) ^ (stream * kGolden + 1)) ^
                 (substream * 0xD1B54A32D192ED03ULL + 3))) {}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RandomStream::sign() noexcept { return (next_u64() >> 63) != 0 ? 1 : -1; }

}  // namespace hpaudit
