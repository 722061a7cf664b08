#include "greenp2/linalg.hpp"

#include <cmath>

namespace greenp2 {

Complex determinant(CMatrix a) {
  const std::size_t n = a.rows;
  Complex det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      if (f == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

double hadamard_bound(const CMatrix& a) {
  double prod = 1.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += std::norm(a(i, j));
    prod *= std::sqrt(s);
  }
  return prod;
}

bool solve_linear(CMatrix a, std::vector<Complex>& b) {
  const std::size_t n = a.rows;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best == 0.0) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    Complex s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * b[j];
    b[k] = s / a(k, k);
  }
  return true;
}

std::vector<Complex> damped_least_squares(const CMatrix& a, const std::vector<Complex>& b, double lambda) {
  const std::size_t n = a.cols;
  CMatrix n_mat(n, n);
  std::vector<Complex> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t r = 0; r < a.rows; ++r) s += std::conj(a(r, i)) * a(r, j);
      n_mat(i, j) = s;
    }
    Complex s{};
    for (std::size_t r = 0; r < a.rows; ++r) s += std::conj(a(r, i)) * b[r];
    rhs[i] = s;
  }
  for (std::size_t i = 0; i < n; ++i) n_mat(i, i) += lambda * (1.0 + std::abs(n_mat(i, i)));
  if (!solve_linear(n_mat, rhs)) return std::vector<Complex>(n);
  return rhs;
}

Vec3 mat_vec(const Mat3& m, const Vec3& x) {
  Vec3 y{};
  for (int i = 0; i < 3; ++i) y[i] = m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2];
  return y;
}

Mat3 adjoint(const Mat3& m) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = std::conj(m[j][i]);
  return r;
}

}  // namespace greenp2
