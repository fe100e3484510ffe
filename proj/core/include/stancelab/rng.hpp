#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stancelab {

// Deterministic seeded generator. std::mt19937_64 for the raw stream, with
// hand-rolled uniform/categorical draws so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed)) {}

  std::uint64_t next_u64() {
    // xorshift* keeps the whole generator self-contained and portable.
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  // Uniform in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Index drawn proportionally to the (non-negative) weights.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = next_double() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Stable child seed for a named stream (per unit, per run, ...).
  static std::uint64_t derive(std::uint64_t seed, const std::string& tag) {
    std::uint64_t h = 1469598103934665603ULL ^ splitmix(seed);
    for (unsigned char c : tag) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return splitmix(h);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    return splitmix(seed ^ (0x9E3779B97F4A7C15ULL + (salt << 1)));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x = x ^ (x >> 31);
    return x == 0 ? 0x4D595DF4D0F33173ULL : x;
  }

  std::uint64_t state_;
};

}  // namespace stancelab
