#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace greenp2 {

using Complex = std::complex<double>;
using Vec3 = std::array<Complex, 3>;
using Pair = std::pair<Complex, Complex>;

inline constexpr double kCoefEps = 1e-9;
inline constexpr double kClusterRadius = 1e-6;

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

inline double norm3(const Vec3& x) {
  return std::sqrt(std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2]));
}

/// Hermitian product, conjugate-linear in the first slot.
inline Complex inner(const Vec3& a, const Vec3& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

/// The two affine coordinate indices of a chart, in increasing order.
inline std::pair<int, int> chart_axes(int chart) {
  switch (chart) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

}  // namespace greenp2
