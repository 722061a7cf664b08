#include "greenp2/affine_series.hpp"

#include <algorithm>
#include <cmath>

#include "greenp2/error.hpp"

namespace greenp2 {

AffineSeries2::AffineSeries2(int trunc, Pair base) : trunc_(trunc), base_(base) {
  if (trunc < 0) throw Error(ErrorCode::InvalidArgument, "negative truncation");
  coeffs_.assign(size_for(trunc), Complex{});
}

AffineSeries2::AffineSeries2(int trunc, std::vector<Complex> coeffs, Pair base)
    : trunc_(trunc), base_(base), coeffs_(std::move(coeffs)) {
  if (trunc < 0) throw Error(ErrorCode::InvalidArgument, "negative truncation");
  if (coeffs_.size() != size_for(trunc))
    throw Error(ErrorCode::InvalidArgument, "series coefficient array has wrong length");
}

AffineSeries2 AffineSeries2::variable(int var, int trunc) {
  AffineSeries2 s(trunc);
  if (trunc >= 1) s.set_coeff(var == 0 ? 1 : 0, var == 0 ? 0 : 1, 1.0);
  return s;
}

AffineSeries2 AffineSeries2::constant(Complex c, int trunc) {
  AffineSeries2 s(trunc);
  s.coeffs_[0] = c;
  return s;
}

Complex AffineSeries2::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > trunc_) return {};
  return coeffs_[index(i, j)];
}

void AffineSeries2::set_coeff(int i, int j, Complex c) {
  if (i < 0 || j < 0 || i + j > trunc_) throw Error(ErrorCode::InvalidArgument, "index beyond truncation");
  coeffs_[index(i, j)] = c;
}

double AffineSeries2::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

int AffineSeries2::effective_degree(double rel_tol) const {
  const double bound = rel_tol * max_abs();
  for (int n = trunc_; n >= 0; --n)
    for (int j = 0; j <= n; ++j)
      if (std::abs(coeffs_[index(n - j, j)]) > bound) return n;
  return -1;
}

Complex AffineSeries2::operator()(Complex u, Complex v) const {
  // Horner in u over each fixed v-power.
  Complex acc{};
  Complex vp = 1.0;
  for (int j = 0; j <= trunc_; ++j) {
    Complex row{};
    for (int i = trunc_ - j; i >= 0; --i) row = row * u + coeffs_[index(i, j)];
    acc += row * vp;
    vp *= v;
  }
  return acc;
}

AffineSeries2 AffineSeries2::truncated(int trunc) const {
  AffineSeries2 r(trunc, base_);
  const int m = std::min(trunc, trunc_);
  std::copy_n(coeffs_.begin(), size_for(m), r.coeffs_.begin());
  return r;
}

AffineSeries2 AffineSeries2::abs_coeffs() const {
  AffineSeries2 r = *this;
  for (auto& c : r.coeffs_) c = std::abs(c);
  return r;
}

AffineSeries2 AffineSeries2::derivative(int var) const {
  AffineSeries2 r(std::max(trunc_ - 1, 0), base_);
  if (trunc_ == 0) return r;
  for (int n = 1; n <= trunc_; ++n)
    for (int j = 0; j <= n; ++j) {
      const int i = n - j;
      const Complex c = coeffs_[index(i, j)];
      if (var == 0 && i > 0) r.coeffs_[index(i - 1, j)] += c * static_cast<double>(i);
      if (var == 1 && j > 0) r.coeffs_[index(i, j - 1)] += c * static_cast<double>(j);
    }
  return r;
}

AffineSeries2& AffineSeries2::operator+=(const AffineSeries2& o) {
  if (o.trunc_ < trunc_) *this = truncated(o.trunc_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

AffineSeries2& AffineSeries2::operator-=(const AffineSeries2& o) {
  if (o.trunc_ < trunc_) *this = truncated(o.trunc_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

AffineSeries2& AffineSeries2::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

AffineSeries2 operator*(const AffineSeries2& a, const AffineSeries2& b) {
  const int T = std::min(a.trunc_, b.trunc_);
  AffineSeries2 r(T, a.base_);
  for (int n1 = 0; n1 <= T; ++n1)
    for (int j1 = 0; j1 <= n1; ++j1) {
      const Complex c1 = a.coeffs_[AffineSeries2::index(n1 - j1, j1)];
      if (c1 == Complex{}) continue;
      for (int n2 = 0; n1 + n2 <= T; ++n2)
        for (int j2 = 0; j2 <= n2; ++j2) {
          const Complex c2 = b.coeffs_[AffineSeries2::index(n2 - j2, j2)];
          if (c2 == Complex{}) continue;
          r.coeffs_[AffineSeries2::index(n1 - j1 + n2 - j2, j1 + j2)] += c1 * c2;
        }
    }
  return r;
}

namespace {

// Coefficient recursion for r = 1/s: sum over (a,b) of s_ab r_{i-a,j-b} = [i=j=0].
AffineSeries2 reciprocal_impl(const AffineSeries2& s, bool majorant) {
  const Complex c0 = majorant ? Complex(std::abs(s.coeff(0, 0))) : s.coeff(0, 0);
  if (c0 == Complex{}) throw Error(ErrorCode::InvalidArgument, "reciprocal of a series with zero constant term");
  const int T = s.truncation();
  const Complex inv = 1.0 / c0;
  AffineSeries2 r(T, s.base_point());
  r.set_coeff(0, 0, inv);
  for (int n = 1; n <= T; ++n)
    for (int j = 0; j <= n; ++j) {
      const int i = n - j;
      Complex acc{};
      for (int m = 1; m <= n; ++m)
        for (int b = 0; b <= m; ++b) {
          const int a = m - b;
          if (a > i || b > j) continue;
          const Complex sc = majorant ? Complex(std::abs(s.coeff(a, b))) : s.coeff(a, b);
          if (sc == Complex{}) continue;
          acc += sc * r.coeff(i - a, j - b);
        }
      r.set_coeff(i, j, majorant ? acc * inv : -acc * inv);
    }
  return r;
}

}  // namespace

AffineSeries2 reciprocal(const AffineSeries2& s) { return reciprocal_impl(s, false); }

AffineSeries2 reciprocal_majorant(const AffineSeries2& s) { return reciprocal_impl(s, true); }

AffineSeries2 compose(const AffineSeries2& g, const AffineSeries2& h1, const AffineSeries2& h2) {
  const int T = std::min({g.truncation(), h1.truncation(), h2.truncation()});
  if (h1.coeff(0, 0) != Complex{} || h2.coeff(0, 0) != Complex{})
    throw Error(ErrorCode::InvalidArgument, "inner series must vanish at the origin");
  std::vector<AffineSeries2> p1{AffineSeries2::constant(1.0, T)};
  std::vector<AffineSeries2> p2{AffineSeries2::constant(1.0, T)};
  const AffineSeries2 a = h1.truncated(T), b = h2.truncated(T);
  for (int k = 1; k <= T; ++k) {
    p1.push_back(p1.back() * a);
    p2.push_back(p2.back() * b);
  }
  AffineSeries2 result(T, h1.base_point());
  for (int i = 0; i <= T; ++i) {
    // inner = sum_j g_ij h2^j, needed only up to order T - i
    AffineSeries2 inner(T - i);
    bool any = false;
    for (int j = 0; i + j <= T; ++j) {
      const Complex c = g.coeff(i, j);
      if (c == Complex{}) continue;
      inner += p2[static_cast<std::size_t>(j)].truncated(T - i) * c;
      any = true;
    }
    if (!any) continue;
    AffineSeries2 prod = p1[static_cast<std::size_t>(i)] * inner.truncated(T);
    // inner's unknown tail beyond T-i only meets terms of order > T
    result += prod.truncated(T);
  }
  return result;
}

AffineSeries2 jacobian_det(const AffineSeries2& g1, const AffineSeries2& g2) {
  return g1.derivative(0) * g2.derivative(1) - g1.derivative(1) * g2.derivative(0);
}

AffineSeries2 dehomogenize(const HomogPoly3& p, int chart) {
  const int d = p.degree();
  AffineSeries2 s(d);
  const auto [a, b] = chart_axes(chart);
  p.for_each_term([&](int i, int j, int k, Complex c) {
    const int e[3] = {i, j, k};
    const int eu = e[a], ev = e[b];
    s.set_coeff(eu, ev, s.coeff(eu, ev) + c);
  });
  return s;
}

AffineSeries2 recenter_taylor(const HomogPoly3& p, int chart, Pair center, int trunc) {
  if (chart < 0 || chart > 2) throw Error(ErrorCode::InvalidArgument, "chart index out of range");
  if (!is_finite(center.first) || !is_finite(center.second))
    throw Error(ErrorCode::ChartUndefined, "center lies on the hyperplane at infinity of the chart");
  if (trunc < 0) throw Error(ErrorCode::InvalidArgument, "negative truncation");
  const AffineSeries2 q = dehomogenize(p, chart);
  const int d = p.degree();
  const int T = std::min(trunc, d);
  // binomial re-expansion of (u0 + u)^i (v0 + v)^j
  std::vector<std::vector<double>> binom(static_cast<std::size_t>(d + 1));
  for (int n = 0; n <= d; ++n) {
    binom[n].assign(static_cast<std::size_t>(n + 1), 1.0);
    for (int k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
  }
  std::vector<Complex> up(static_cast<std::size_t>(d + 1)), vp(static_cast<std::size_t>(d + 1));
  up[0] = vp[0] = 1.0;
  for (int k = 1; k <= d; ++k) {
    up[k] = up[k - 1] * center.first;
    vp[k] = vp[k - 1] * center.second;
  }
  AffineSeries2 r(trunc, center);
  for (int n = 0; n <= d; ++n)
    for (int j = 0; j <= n; ++j) {
      const int i = n - j;
      const Complex c = q.coeff(i, j);
      if (c == Complex{}) continue;
      for (int a = 0; a <= i; ++a)
        for (int b = 0; b <= j && a + b <= T; ++b)
          r.set_coeff(a, b, r.coeff(a, b) + c * binom[i][a] * binom[j][b] * up[i - a] * vp[j - b]);
    }
  return r;
}

int vanishing_order(const AffineSeries2& s, double rel_tol) {
  const double bound = rel_tol * s.max_abs();
  const int T = s.truncation();
  for (int n = 0; n <= T; ++n)
    for (int j = 0; j <= n; ++j)
      if (std::abs(s.coeff(n - j, j)) > bound && std::abs(s.coeff(n - j, j)) > 0.0) return n;
  throw Error(ErrorCode::OrderExceedsTruncation, "all retained coefficients vanish at tolerance");
}

int vanishing_order(const AffineSeries2& s, const AffineSeries2& majorant, double rel_tol) {
  const int T = std::min(s.truncation(), majorant.truncation());
  for (int n = 0; n <= T; ++n)
    for (int j = 0; j <= n; ++j) {
      const double c = std::abs(s.coeff(n - j, j));
      if (c > 0.0 && c > rel_tol * std::abs(majorant.coeff(n - j, j))) return n;
    }
  throw Error(ErrorCode::OrderExceedsTruncation, "all retained coefficients vanish at tolerance");
}

}  // namespace greenp2
