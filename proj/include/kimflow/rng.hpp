#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "kimflow/common.hpp"

namespace kimflow {

// (seed, stream) pair: the same pair always reproduces the same draw
// sequence, and distinct streams derived from one seed are independent
// enough for Monte Carlo work (splitmix64 whitening between them).
struct SamplerSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic generator. Normals use the Box-Muller cosine branch with
// explicitly constructed uniforms rather than std::normal_distribution,
// whose output is implementation-defined; this keeps sampled values
// bit-for-bit stable across standard libraries.
class Rng {
 public:
  explicit Rng(SamplerSeed s)
      : engine_(detail::splitmix64(detail::splitmix64(s.seed) ^
                                   detail::splitmix64(~s.stream))) {}

  // Uniform on [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal. Consumes exactly two uniforms per call; the sine
  // partner is discarded so call sequences stay trivially predictable.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vec(Eigen::Index d) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  void normal_vec_into(Eigen::Ref<Eigen::VectorXd> z) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kimflow
