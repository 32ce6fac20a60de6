#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace sdmest {

/// Deterministic random stream. All randomness in the project flows through
/// explicitly seeded instances of this class; there is no ambient RNG.
///
/// Gaussian variates are produced by Box-Muller on top of the raw engine so
/// that sequences are reproducible independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal N(0, 1).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard complex normal, E|z|^2 = 1.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

namespace seed_tag {
// Stream namespaces. Seeds derived under different tags never collide by
// construction, which keeps e.g. evaluation channels disjoint from training
// channels.
inline constexpr std::uint64_t kTrainChannels = 0x11;
inline constexpr std::uint64_t kEvalGrid = 0x22;
inline constexpr std::uint64_t kOracle = 0x33;
inline constexpr std::uint64_t kSplit = 0x44;
inline constexpr std::uint64_t kMlpInit = 0x55;
inline constexpr std::uint64_t kMlpShuffle = 0x66;
inline constexpr std::uint64_t kCalibration = 0x77;
}  // namespace seed_tag

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a master seed and a path of stream identifiers
/// (tag, indices...). Distinct paths give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t w : path) {
    h = splitmix64(h ^ splitmix64(w));
  }
  return h;
}

}  // namespace sdmest
