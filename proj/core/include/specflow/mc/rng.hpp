#pragma once

#include <cstdint>

namespace specflow::mc {

enum class Purpose : std::uint64_t { Init = 1, Move = 2, Accept = 3, Exchange = 4 };

/// Coordinates of one random stream. Equal keys give equal streams whatever
/// the thread or evaluation order.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t iteration = 0;
  std::uint64_t domain = 0;
  Purpose purpose = Purpose::Move;
};

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: value n of the stream is a hash of (key, n).
class KeyedStream {
 public:
  explicit constexpr KeyedStream(const RngKey& key) : base_(hash_key(key)) {}

  constexpr std::uint64_t next() { return splitmix64(base_ ^ splitmix64(counter_++)); }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t hash_key(const RngKey& k) {
    std::uint64_t h = splitmix64(k.seed);
    h = splitmix64(h ^ k.replica);
    h = splitmix64(h ^ k.iteration);
    h = splitmix64(h ^ k.domain);
    return splitmix64(h ^ static_cast<std::uint64_t>(k.purpose));
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace specflow::mc
