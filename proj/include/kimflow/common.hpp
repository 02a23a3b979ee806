#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kimflow {

inline constexpr const char* kVersion = "0.1.0";

// Identifies the exact sampling recipe baked into Rng; recorded in report
// provenance so a byte-identical report implies an identical draw sequence.
inline constexpr const char* kRngId = "mt19937_64/box-muller-v1";

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematically invalid input (negative time, non-SPD covariance, ...).
struct DomainError : Error {
  using Error::Error;
};

// A valid object asked to do something its family does not support.
struct UnsupportedError : Error {
  using Error::Error;
};

// ODE state stopped being finite; carries the time at which it happened.
struct DivergenceError : Error {
  DivergenceError(const std::string& msg, double t, int point = -1)
      : Error(msg), time(t), point_index(point) {}
  double time;
  int point_index;
};

// Grid-doubling quadrature failed to reach the requested tolerance,
// or a dual-route evaluation disagreed beyond tolerance.
struct QuadratureError : Error {
  using Error::Error;
};

// Config-file problem; message already carries file:line context.
struct ConfigError : Error {
  using Error::Error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Pairwise (cascade) summation: error grows O(log n) instead of O(n),
// and the result is independent of chunking decisions made by callers.
inline double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

inline MeanSe mean_with_se(const std::vector<double>& v) {
  MeanSe out;
  out.n = v.size();
  if (v.empty()) return out;
  out.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

// 64-bit FNV-1a; used for config provenance hashes (not cryptographic).
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace kimflow
