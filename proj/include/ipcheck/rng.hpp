#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ipcheck {

/// Seeded PRNG: std::mt19937_64 (output fully specified by the standard)
/// with distribution code of our own, so a seed reproduces the same stream
/// on every platform. State is explicit; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // rejection on the top of the range keeps it exactly uniform
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % bound;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Uniform in [0, bound) for big integers.
  boost::multiprecision::cpp_int below(const boost::multiprecision::cpp_int& bound) {
    using boost::multiprecision::cpp_int;
    const std::size_t bits = boost::multiprecision::msb(bound) + 1;
    while (true) {
      cpp_int x = 0;
      std::size_t have = 0;
      while (have < bits) {
        std::uint64_t word = engine_();
        std::size_t take = std::min<std::size_t>(64, bits - have);
        if (take < 64) word &= (std::uint64_t{1} << take) - 1;
        x |= cpp_int(word) << have;
        have += take;
      }
      if (x < bound) return x;
    }
  }

  /// Independent stream derived from a base seed and a stream index.
  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL))); }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// FNV-1a, for seeding from text.
  static std::uint64_t hash_text(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace ipcheck
