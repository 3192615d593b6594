#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace longae {

using Index = Eigen::Index;

// Dense storage templated on scalar: float for training speed, double where
// tests need finite-difference headroom.
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXf = MatrixX<float>;
using VectorXf = VectorX<float>;
using MatrixXd = MatrixX<double>;
using VectorXd = VectorX<double>;

// Seeded 64-bit PRNG around std::mt19937_64. All uniform draws are derived
// from the raw bit stream rather than <random> distributions, so a seed pins
// the exact sequence independently of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n); rejection sampling avoids modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    if (rem == 0) return engine_() % n;
    const std::uint64_t bound = max - rem;
    std::uint64_t draw = engine_();
    while (draw > bound) draw = engine_();
    return draw % n;
  }

  // Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[static_cast<std::size_t>(below(i))]);
    }
  }

  // Independent deterministic stream for a (seed, stream) pair; the seed is
  // scrambled with a splitmix64 round so streams never share draw sequences.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace longae
