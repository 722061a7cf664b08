#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "greenp2/types.hpp"

namespace greenp2 {

/// Homogeneous polynomial in (z, w, t), dense graded-lex storage.
///
/// Terms of degree d are ordered by decreasing z-exponent, then decreasing
/// w-exponent: z^d, z^{d-1}w, z^{d-1}t, z^{d-2}w^2, ...
class HomogPoly3 {
 public:
  HomogPoly3() : HomogPoly3(0) {}
  explicit HomogPoly3(int degree);
  HomogPoly3(int degree, std::vector<Complex> coeffs);

  static HomogPoly3 constant(Complex c);
  static HomogPoly3 variable(int var);
  static HomogPoly3 monomial(int i, int j, int k, Complex c = 1.0);
  /// a0 z + a1 w + a2 t
  static HomogPoly3 linear(const Vec3& a);

  static std::size_t size_for(int degree) {
    return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  }
  static std::size_t index(int degree, int i, int j) {
    const int m = degree - i;
    return static_cast<std::size_t>(m * (m + 1) / 2 + (m - j));
  }

  int degree() const { return degree_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex coeff(int i, int j, int k) const;
  void set_coeff(int i, int j, int k, Complex c);
  void add_coeff(int i, int j, int k, Complex c);
  /// Max coefficient magnitude.
  double coeff_norm() const;
  bool is_zero(double rel_tol = 0.0, double reference = 0.0) const;

  Complex operator()(const Vec3& x) const;

  template <class Fn>
  void for_each_term(Fn&& fn) const {
    std::size_t idx = 0;
    for (int i = degree_; i >= 0; --i)
      for (int j = degree_ - i; j >= 0; --j, ++idx) fn(i, j, degree_ - i - j, coeffs_[idx]);
  }

  HomogPoly3 derivative(int var) const;
  /// p(q0, q1, q2); all substitutions must share one degree.
  HomogPoly3 compose(const std::array<HomogPoly3, 3>& subs) const;
  HomogPoly3 pow(int n) const;
  /// Drops coefficients below rel_tol * coeff_norm.
  HomogPoly3 cleaned(double rel_tol = kCoefEps) const;

  HomogPoly3& operator+=(const HomogPoly3& o);
  HomogPoly3& operator-=(const HomogPoly3& o);
  HomogPoly3& operator*=(Complex s);

  friend HomogPoly3 operator+(HomogPoly3 a, const HomogPoly3& b) { return a += b; }
  friend HomogPoly3 operator-(HomogPoly3 a, const HomogPoly3& b) { return a -= b; }
  friend HomogPoly3 operator*(HomogPoly3 a, Complex s) { return a *= s; }
  friend HomogPoly3 operator*(Complex s, HomogPoly3 a) { return a *= s; }
  friend HomogPoly3 operator-(HomogPoly3 a) { return a *= -1.0; }
  friend HomogPoly3 operator*(const HomogPoly3& a, const HomogPoly3& b);
  friend bool operator==(const HomogPoly3& a, const HomogPoly3& b) = default;

 private:
  int degree_;
  std::vector<Complex> coeffs_;
};

Complex evaluate_homog(const HomogPoly3& p, const Vec3& x);

/// Jacobian determinant of the lift (P, Q, R), degree 3(d-1).
HomogPoly3 jacobian_determinant(const std::array<HomogPoly3, 3>& f);

}  // namespace greenp2
