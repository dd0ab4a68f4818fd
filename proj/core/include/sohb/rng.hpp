#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sohb {

/// splitmix64 step; used to derive well-separated seeds for substreams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// A seeded random stream with portable transforms on top of mt19937_64.
/// The uniform/normal/exponential mappings are written out explicitly so a
/// given seed yields the same draw sequence on every standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  /// Stream `id` derived from `seed`; distinct ids give independent streams.
  static RngStream substream(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (id + 1));
    (void)splitmix64(s);
    return RngStream(splitmix64(s));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    return -std::log(uniform_pos()) / rate;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t uniform_int(std::uint64_t bound) {
    // rejection to kill modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % bound;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sohb
