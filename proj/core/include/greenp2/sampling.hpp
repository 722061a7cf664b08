#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "greenp2/linalg.hpp"
#include "greenp2/types.hpp"

namespace greenp2 {

/// splitmix64 finalizer, used to derive independent sub-seeds by counter.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t index) : engine_(mix_seed(seed, index)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  /// Standard complex Gaussian, E|z|^2 = 1.
  Complex complex_normal();
  /// Uniform in the unit disk.
  Complex unit_disk();
  Complex unit_circle();
  /// Fubini-Study uniform point of P^2 as a unit vector.
  Vec3 fs_point();
  /// Uniform on the unit sphere of C^2.
  Pair sphere2();
  /// Uniform in the unit ball of C^2.
  Pair ball2();
  /// Haar-random unitary 3x3 matrix.
  Mat3 unitary3();

 private:
  std::mt19937_64 engine_;
};

/// Pairwise summation, fixed order.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

/// Calls fn(i) for i in [0, n) on up to `threads` workers. fn must only write
/// per-index output so results do not depend on the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace greenp2
