#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace omdp {

/// Deterministic random stream. All draws are derived from raw engine output
/// through fixed bit manipulation, so sequences are reproducible across
/// platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, no spare caching).
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, n).
  int below(int n) {
    const int k = static_cast<int>(uniform() * n);
    return k < n ? k : n - 1;
  }

  /// Index drawn proportionally to a nonnegative weight row.
  template <typename Derived>
  int categorical(const Eigen::DenseBase<Derived>& weights) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) total += weights(i);
    const double x = uniform() * total;
    double cum = 0.0;
    int last_positive = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights(i) > 0.0) last_positive = static_cast<int>(i);
      cum += weights(i);
      if (x < cum) return static_cast<int>(i);
    }
    return last_positive;  // rounding pushed x past the final cumulative sum
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace omdp
