#pragma once

#include <cmath>
#include <cstdint>

#include "phs/math_util.hpp"

namespace phs {

// splitmix64 step; used both as a seed mixer and for sub-stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-mode sub-seed derivation: independent streams for (master, index)
// pairs, stable across thread counts and execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x517cc1b727220a95ULL * (index + 1));
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b ^ 0xd1342543de82ef95ULL);
}

// Small deterministic generator (xoshiro-free: splitmix64 stream) with the
// handful of samplers this project needs. All samplers are hand-rolled so
// output is bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed) ^ seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n); n >= 1.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Standard normal via Box-Muller (one value per call, deterministic).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double gaussian(double stddev) { return stddev * normal(); }

  // Laplace(0, scale) via inverse CDF.
  double laplace(double scale) {
    double v = uniform() - 0.5;
    return -scale * (v < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::fabs(v));
  }

  // Laplace(0, scale) conditioned on [-t, t] via inverse CDF on the
  // truncated mass.
  double truncated_laplace(double scale, double t) {
    double mass = 1.0 - std::exp(-t / scale);  // one-sided truncated mass
    double w = 2.0 * uniform() - 1.0;          // (-1, 1)
    double mag = -scale * std::log(1.0 - std::fabs(w) * mass);
    return w < 0 ? -mag : mag;
  }

 private:
  std::uint64_t state_;
};

}  // namespace phs
