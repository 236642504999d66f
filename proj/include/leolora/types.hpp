#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace leolora {

enum class Phase : std::uint8_t { Sun, Eclipse };

constexpr std::string_view to_string(Phase p) noexcept {
  return p == Phase::Sun ? "sun" : "eclipse";
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kSecondsPerHour = 3600.0;

/// Seeded stream with a portable uniform/exponential mapping; std::*_distribution
/// output differs between standard libraries, which would break byte-identical runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser, used to derive independent per-node stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace leolora
