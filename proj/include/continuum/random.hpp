#pragma once

// Counter-based random streams. A stream is a key plus a counter; the key is
// derived from (seed, device, sequence, purpose) so every device and task gets
// draws that do not depend on what other devices did.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace continuum {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ULL));
}

// Draw purposes; each keys an independent family of streams.
enum class StreamPurpose : std::uint64_t {
  Arrivals = 1,
  TaskAttributes = 2,
  TaskRouting = 3,
  Synthetic = 4,
};

class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t key) : key_(key) {}

  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t key = splitmix64(seed);
    for (auto p : parts) key = hash_combine(key, p);
    return RandomStream(key);
  }

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  // [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  // Inversion on (0, 1]; never returns infinity.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace continuum
