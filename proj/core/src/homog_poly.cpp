#include "greenp2/homog_poly.hpp"

#include <algorithm>
#include <string>

#include "greenp2/error.hpp"

namespace greenp2 {

HomogPoly3::HomogPoly3(int degree) : degree_(degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
  coeffs_.assign(size_for(degree), Complex{});
}

HomogPoly3::HomogPoly3(int degree, std::vector<Complex> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
  if (coeffs_.size() != size_for(degree))
    throw Error(ErrorCode::InvalidArgument,
                "coefficient array of length " + std::to_string(coeffs_.size()) + " for degree " +
                    std::to_string(degree));
  for (const auto& c : coeffs_)
    if (!is_finite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
}

HomogPoly3 HomogPoly3::constant(Complex c) { return HomogPoly3(0, {c}); }

HomogPoly3 HomogPoly3::variable(int var) {
  HomogPoly3 p(1);
  p.coeffs_[static_cast<std::size_t>(var)] = 1.0;
  return p;
}

HomogPoly3 HomogPoly3::monomial(int i, int j, int k, Complex c) {
  HomogPoly3 p(i + j + k);
  p.set_coeff(i, j, k, c);
  return p;
}

HomogPoly3 HomogPoly3::linear(const Vec3& a) { return HomogPoly3(1, {a[0], a[1], a[2]}); }

Complex HomogPoly3::coeff(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i + j + k != degree_) return {};
  return coeffs_[index(degree_, i, j)];
}

void HomogPoly3::set_coeff(int i, int j, int k, Complex c) {
  if (i < 0 || j < 0 || k < 0 || i + j + k != degree_)
    throw Error(ErrorCode::DegreeMismatch, "exponent triple does not match degree");
  coeffs_[index(degree_, i, j)] = c;
}

void HomogPoly3::add_coeff(int i, int j, int k, Complex c) {
  if (i < 0 || j < 0 || k < 0 || i + j + k != degree_)
    throw Error(ErrorCode::DegreeMismatch, "exponent triple does not match degree");
  coeffs_[index(degree_, i, j)] += c;
}

double HomogPoly3::coeff_norm() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool HomogPoly3::is_zero(double rel_tol, double reference) const {
  const double bound = rel_tol * reference;
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [&](Complex c) { return std::abs(c) <= bound; });
}

Complex HomogPoly3::operator()(const Vec3& x) const {
  const int d = degree_;
  std::vector<Complex> tpow(static_cast<std::size_t>(d + 1));
  tpow[0] = 1.0;
  for (int k = 1; k <= d; ++k) tpow[static_cast<std::size_t>(k)] = tpow[k - 1] * x[2];
  // Horner in z over blocks of fixed z-exponent, Horner in w inside each block.
  Complex acc{};
  for (int i = d; i >= 0; --i) {
    const int m = d - i;
    const std::size_t base = static_cast<std::size_t>(m * (m + 1) / 2);
    Complex inner_acc{};
    for (int j = m; j >= 0; --j)
      inner_acc = inner_acc * x[1] + coeffs_[base + static_cast<std::size_t>(m - j)] * tpow[m - j];
    acc = (i == d) ? inner_acc : acc * x[0] + inner_acc;
  }
  return acc;
}

Complex evaluate_homog(const HomogPoly3& p, const Vec3& x) { return p(x); }

HomogPoly3 HomogPoly3::derivative(int var) const {
  if (degree_ == 0) return HomogPoly3(0);
  HomogPoly3 r(degree_ - 1);
  for_each_term([&](int i, int j, int k, Complex c) {
    if (c == Complex{}) return;
    const int e[3] = {i, j, k};
    if (e[var] == 0) return;
    int ne[3] = {i, j, k};
    --ne[var];
    r.add_coeff(ne[0], ne[1], ne[2], c * static_cast<double>(e[var]));
  });
  return r;
}

HomogPoly3& HomogPoly3::operator+=(const HomogPoly3& o) {
  if (o.degree_ != degree_) throw Error(ErrorCode::DegreeMismatch, "sum of different degrees");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

HomogPoly3& HomogPoly3::operator-=(const HomogPoly3& o) {
  if (o.degree_ != degree_) throw Error(ErrorCode::DegreeMismatch, "difference of different degrees");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

HomogPoly3& HomogPoly3::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

HomogPoly3 operator*(const HomogPoly3& a, const HomogPoly3& b) {
  HomogPoly3 r(a.degree_ + b.degree_);
  a.for_each_term([&](int i1, int j1, int k1, Complex c1) {
    if (c1 == Complex{}) return;
    b.for_each_term([&](int i2, int j2, int k2, Complex c2) {
      if (c2 == Complex{}) return;
      r.coeffs_[HomogPoly3::index(r.degree_, i1 + i2, j1 + j2)] += c1 * c2;
      (void)k1;
      (void)k2;
    });
  });
  return r;
}

HomogPoly3 HomogPoly3::pow(int n) const {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative power");
  HomogPoly3 result = constant(1.0);
  HomogPoly3 base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

HomogPoly3 HomogPoly3::compose(const std::array<HomogPoly3, 3>& subs) const {
  const int e = subs[0].degree();
  if (subs[1].degree() != e || subs[2].degree() != e)
    throw Error(ErrorCode::DegreeMismatch, "substitutions of different degrees");
  const int d = degree_;
  std::array<std::vector<HomogPoly3>, 3> powers;
  for (int v = 0; v < 3; ++v) {
    powers[v].reserve(static_cast<std::size_t>(d + 1));
    powers[v].push_back(constant(1.0));
    for (int m = 1; m <= d; ++m) powers[v].push_back(powers[v].back() * subs[v]);
  }
  HomogPoly3 r(d * e);
  for_each_term([&](int i, int j, int k, Complex c) {
    if (c == Complex{}) return;
    r += (powers[0][i] * powers[1][j] * powers[2][k]) * c;
  });
  return r;
}

HomogPoly3 HomogPoly3::cleaned(double rel_tol) const {
  HomogPoly3 r = *this;
  const double bound = rel_tol * coeff_norm();
  for (auto& c : r.coeffs_)
    if (std::abs(c) <= bound) c = Complex{};
  return r;
}

HomogPoly3 jacobian_determinant(const std::array<HomogPoly3, 3>& f) {
  std::array<std::array<HomogPoly3, 3>, 3> m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = f[r].derivative(c);
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace greenp2
