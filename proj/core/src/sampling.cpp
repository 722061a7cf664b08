#include "greenp2/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace greenp2 {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Complex Rng::complex_normal() {
  const double a = normal(), b = normal();
  return {a * std::numbers::sqrt2 / 2.0, b * std::numbers::sqrt2 / 2.0};
}

Complex Rng::unit_disk() {
  const double r = std::sqrt(uniform());
  return std::polar(r, 2.0 * std::numbers::pi * uniform());
}

Complex Rng::unit_circle() { return std::polar(1.0, 2.0 * std::numbers::pi * uniform()); }

Vec3 Rng::fs_point() {
  Vec3 x{complex_normal(), complex_normal(), complex_normal()};
  const double n = norm3(x);
  for (auto& c : x) c /= n;
  return x;
}

Pair Rng::sphere2() {
  Complex a = complex_normal(), b = complex_normal();
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return {a / n, b / n};
}

Pair Rng::ball2() {
  const auto [a, b] = sphere2();
  const double r = std::pow(uniform(), 0.25);
  return {a * r, b * r};
}

Mat3 Rng::unitary3() {
  Mat3 m{};
  for (auto& row : m)
    for (auto& c : row) c = complex_normal();
  // Gram-Schmidt on columns
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < j; ++k) {
      Complex proj{};
      for (int i = 0; i < 3; ++i) proj += std::conj(m[i][k]) * m[i][j];
      for (int i = 0; i < 3; ++i) m[i][j] -= proj * m[i][k];
    }
    double n = 0.0;
    for (int i = 0; i < 3; ++i) n += std::norm(m[i][j]);
    n = std::sqrt(n);
    for (int i = 0; i < 3; ++i) m[i][j] /= n;
  }
  return m;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        if (failed) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace greenp2
