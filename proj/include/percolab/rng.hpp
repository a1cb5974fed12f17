#pragma once

#include <cstdint>
#include <string_view>

namespace percolab {

// Counter-based random streams.
//
// The generator is the SplitMix64 output function applied to a 64-bit
// counter walking a Weyl sequence from a per-stream key:
//
//   out_i = mix64(key + (i+1) * 0x9E3779B97F4A7C15)
//
// Streams are values; copying one forks its position. Identical
// (master_seed, tag, trial_index) gives the identical output sequence on
// every platform and under any degree of parallelism.

inline constexpr std::uint64_t kWeylIncrement = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kWeylIncrement);
  }

  // Uniform on [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  // Independent child stream for trial i; insensitive to this stream's
  // position, so fan-out order never matters.
  Stream substream(std::uint64_t i) const { return Stream(mix64(key_ + mix64(i + 1) * kWeylIncrement)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline Stream derive_stream(std::uint64_t master_seed, std::string_view tag,
                            std::uint64_t trial_index) {
  std::uint64_t k = mix64(master_seed ^ fnv1a64(tag));
  k = mix64(k + trial_index * kWeylIncrement);
  return Stream(k);
}

// Stateless per-edge uniform used by the re-thresholdable edge fields.
inline double unit_from_hash(std::uint64_t seed, std::uint64_t id) {
  return static_cast<double>(mix64(seed + mix64(id) * kWeylIncrement) >> 11) * 0x1.0p-53;
}

}  // namespace percolab
