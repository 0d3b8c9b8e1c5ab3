#pragma once

#include <cstdint>
#include <cmath>
#include <utility>

namespace turbmimo {

// Counter-based random numbers (Philox-2x64, 10 rounds).  Every draw is a pure
// function of (key, counter), so Monte Carlo realizations can be generated in
// any order, on any number of workers, and still come out bit-identical.
namespace philox {

inline constexpr std::uint64_t kMult = 0xD2B74407B1CE6E93ULL;
inline constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t key,
                                                     std::uint64_t ctr_hi,
                                                     std::uint64_t ctr_lo) {
  std::uint64_t x0 = ctr_hi;
  std::uint64_t x1 = ctr_lo;
  std::uint64_t k = key;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(kMult) * x0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ k ^ x1;
    x1 = lo;
    k += kWeyl;
  }
  return {x0, x1};
}

}  // namespace philox

// splitmix64 finalizer; used to fold stream indices into a single 64-bit key.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Identifies one Monte Carlo stream.  The tuple (master seed, index of the
// turbulence-strength point, index of the mode-count point, realization index)
// pins every random draw of a realization.
struct StreamKey {
  std::uint64_t master = 0;
  std::uint64_t cn2_index = 0;
  std::uint64_t n_index = 0;
  std::uint64_t mc_index = 0;

  std::uint64_t fold() const {
    std::uint64_t k = mix64(master ^ 0x7475726275ULL);
    k = mix64(k ^ (cn2_index + 0x100000001ULL));
    k = mix64(k ^ (n_index + 0x200000003ULL));
    k = mix64(k ^ (mc_index + 0x400000007ULL));
    return k;
  }
};

// Maps 64 random bits to (0,1); never returns 0 or 1 exactly.
inline double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

// One standard complex Gaussian draw: real and imaginary parts are iid
// N(0,1), so E|z|^2 = 2.  Box-Muller on a single counter block keeps the
// draw layout stable (counter -> value) regardless of evaluation order.
inline std::pair<double, double> gaussian_pair(std::uint64_t key,
                                               std::uint64_t ctr_hi,
                                               std::uint64_t ctr_lo) {
  const auto [b0, b1] = philox::block(key, ctr_hi, ctr_lo);
  const double u1 = to_unit(b0);
  const double u2 = to_unit(b1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace turbmimo
