#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "greenp2/types.hpp"

namespace greenp2 {

/// Row-major dense complex matrix.
struct CMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Complex> data;

  CMatrix() = default;
  CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  Complex& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Determinant by partial-pivot LU.
Complex determinant(CMatrix a);
/// Product of row 2-norms (Hadamard bound on |det|).
double hadamard_bound(const CMatrix& a);
/// Solves a x = b for square a; returns false if singular.
bool solve_linear(CMatrix a, std::vector<Complex>& b);
/// Least-squares solution of the overdetermined system a x = b with
/// Levenberg damping lambda (normal equations).
std::vector<Complex> damped_least_squares(const CMatrix& a, const std::vector<Complex>& b, double lambda);

using Mat3 = std::array<std::array<Complex, 3>, 3>;

Vec3 mat_vec(const Mat3& m, const Vec3& x);
Mat3 adjoint(const Mat3& m);

}  // namespace greenp2
