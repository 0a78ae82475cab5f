#pragma once

#include <cstdint>
#include <random>

#include "spherimax/core.hpp"

namespace spherimax::detail {

/// splitmix64 step; used to derive independent streams from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + 0x51ed2701ULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

/// Standard Gaussian direction, normalized and scaled to squared norm r.
inline Vector random_sphere_point(std::mt19937_64& eng, int n, double r) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (;;) {
    for (int i = 0; i < n; ++i) v[i] = gauss(eng);
    const double ns = v.squaredNorm();
    if (ns > 1e-24) return v * std::sqrt(r / ns);
  }
}

/// Uniform point of the ball of squared-norm radius rho.
inline Vector random_ball_point(std::mt19937_64& eng, int n, double rho) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(eng);
  const double t = rho * std::pow(u, 2.0 / n);  // squared norm of a uniform draw
  if (t <= 0.0) return Vector::Zero(n);
  return random_sphere_point(eng, n, t);
}

}  // namespace spherimax::detail
