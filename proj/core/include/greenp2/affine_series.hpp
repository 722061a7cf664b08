#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "greenp2/homog_poly.hpp"
#include "greenp2/types.hpp"

namespace greenp2 {

/// Truncated power series in two affine variables (u, v) around base_point.
/// Coefficients beyond the truncation degree are unknown, not zero.
class AffineSeries2 {
 public:
  AffineSeries2() : AffineSeries2(0) {}
  explicit AffineSeries2(int trunc, Pair base = {});
  AffineSeries2(int trunc, std::vector<Complex> coeffs, Pair base = {});

  static std::size_t size_for(int trunc) {
    return static_cast<std::size_t>((trunc + 1) * (trunc + 2) / 2);
  }
  static std::size_t index(int i, int j) {
    const int n = i + j;
    return static_cast<std::size_t>(n * (n + 1) / 2 + j);
  }

  /// The series u (var 0) or v (var 1).
  static AffineSeries2 variable(int var, int trunc);
  static AffineSeries2 constant(Complex c, int trunc);

  int truncation() const { return trunc_; }
  const Pair& base_point() const { return base_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex coeff(int i, int j) const;
  void set_coeff(int i, int j, Complex c);
  double max_abs() const;
  /// Highest total degree carrying a coefficient above rel_tol * max_abs.
  int effective_degree(double rel_tol = kCoefEps) const;

  Complex operator()(Complex u, Complex v) const;

  AffineSeries2 truncated(int trunc) const;
  AffineSeries2 abs_coeffs() const;
  AffineSeries2 derivative(int var) const;

  AffineSeries2& operator+=(const AffineSeries2& o);
  AffineSeries2& operator-=(const AffineSeries2& o);
  AffineSeries2& operator*=(Complex s);
  friend AffineSeries2 operator+(AffineSeries2 a, const AffineSeries2& b) { return a += b; }
  friend AffineSeries2 operator-(AffineSeries2 a, const AffineSeries2& b) { return a -= b; }
  friend AffineSeries2 operator*(AffineSeries2 a, Complex s) { return a *= s; }
  friend AffineSeries2 operator*(const AffineSeries2& a, const AffineSeries2& b);

 private:
  int trunc_;
  Pair base_;
  std::vector<Complex> coeffs_;
};

/// 1/s; requires a nonzero constant term.
AffineSeries2 reciprocal(const AffineSeries2& s);
/// Coefficientwise bound for 1/s built from |s| (positive coefficients).
AffineSeries2 reciprocal_majorant(const AffineSeries2& s);
/// g(h1, h2) where h1, h2 have zero constant term.
AffineSeries2 compose(const AffineSeries2& g, const AffineSeries2& h1, const AffineSeries2& h2);
AffineSeries2 jacobian_det(const AffineSeries2& g1, const AffineSeries2& g2);

/// Taylor expansion of p dehomogenized in `chart` around the affine point `center`.
AffineSeries2 recenter_taylor(const HomogPoly3& p, int chart, Pair center, int trunc);
/// Dehomogenized polynomial, exact (truncation = degree).
AffineSeries2 dehomogenize(const HomogPoly3& p, int chart);

/// min{i+j : |c_ij| > rel_tol * max|c|}.
int vanishing_order(const AffineSeries2& s, double rel_tol = kCoefEps);
/// Order with the zero test made against a majorant series: c_ij counts as
/// zero when |c_ij| <= rel_tol * m_ij.
int vanishing_order(const AffineSeries2& s, const AffineSeries2& majorant, double rel_tol);

}  // namespace greenp2
