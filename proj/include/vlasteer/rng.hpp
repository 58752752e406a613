#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vlasteer {

/// SplitMix64 finalizer. Used to mix seed components into independent streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Named sub-streams. Every consumer of randomness draws from its own stream
/// so that adding draws in one place never shifts another.
enum class Stream : std::uint64_t {
  scene = 1,
  plan = 2,
  candidate = 3,
  verifier = 4,
  dynamics = 5,
  fallback = 6,
  vanilla = 7,
  trial = 8,
  demo = 9,
};

/// Seeded random stream with platform-stable draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std distributions are not (their algorithms are
/// implementation-defined), so the mappings to doubles and indices live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// True with probability p; p <= 0 never, p >= 1 always.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  return Rng(derive_seed({seed, static_cast<std::uint64_t>(stream), a, b}));
}

}  // namespace vlasteer
