#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sparsebench {

/// Seeded random stream with reproducible sub-stream derivation.
///
/// The generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard, and all floating-point draws are derived from raw 64-bit
/// words with explicit arithmetic (no std::*_distribution, whose output is
/// implementation-defined). Normals use the Marsaglia polar method.
/// Child streams are derived from the parent's seed with a splitmix64-style
/// hash, so any stream in the tree is reachable without consuming draws
/// from its ancestors; repetitions and restarts can be evaluated in any
/// order, or concurrently, without changing results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : seed_(seed), gen_(mix(seed)) {}

  /// Independent sub-stream; (seed, index) -> child seed is a fixed hash.
  RngStream child(std::uint64_t index) const {
    return RngStream(mix(seed_ ^ mix(index + 0x9E3779B97F4A7C15ull)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via the polar method (rejection; caches the spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd normals(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sparsebench
