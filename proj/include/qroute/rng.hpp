#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace qroute {

/// Mixes a 64-bit value into a well-distributed seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Wraps std::mt19937_64 (whose raw output is
/// pinned by the standard) and implements bounded draws directly, so a fixed
/// seed yields identical streams on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_below(
                    static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1).
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fisher-Yates shuffle using this stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_below(i)]);
    }
  }

  /// Independent child stream keyed on `stream`. Used to hand parallel
  /// workers their own generators while keeping results independent of
  /// thread count.
  Rng derive(std::uint64_t stream) {
    return Rng(mix_seed(next_u64() ^ mix_seed(stream)));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qroute
