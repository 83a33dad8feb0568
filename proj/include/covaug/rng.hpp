#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace covaug {

/// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for stream `index` of a master seed.  Counter-based: the result
/// depends only on (master, index), so any subset of streams can be drawn
/// in any order -- or on any number of workers -- with identical output.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index + 0x632be59bd9b4e019ull));
}

/// Two-level derivation, e.g. (sample index, replica index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return derive_seed(derive_seed(master, a), b);
}

/// Deterministic random stream.  std::mt19937_64 output is fully specified
/// by the standard; the distributions below are hand-rolled because the
/// std::*_distribution adapters are implementation-defined and would break
/// bit-reproducibility across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; draws two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();  // keep the log finite
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace covaug
