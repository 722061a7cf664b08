#include "greenp2/system_solve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greenp2/error.hpp"
#include "greenp2/linalg.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2 {

namespace {

// Coefficients of x^i as polynomials in y: rows[i][j] = coeff of x^i y^j.
using Bivariate = std::vector<std::vector<Complex>>;

Bivariate split_by_x(const AffineSeries2& s, int deg) {
  Bivariate out(static_cast<std::size_t>(deg + 1));
  for (int i = 0; i <= deg; ++i) {
    out[i].resize(static_cast<std::size_t>(deg - i + 1));
    for (int j = 0; i + j <= deg; ++j) out[i][j] = s.coeff(i, j);
  }
  return out;
}

std::vector<Complex> at_y(const Bivariate& p, Complex y) {
  std::vector<Complex> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    Complex acc{};
    for (auto it = p[i].rbegin(); it != p[i].rend(); ++it) acc = acc * y + *it;
    out[i] = acc;
  }
  return out;
}

CMatrix sylvester(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const int da = static_cast<int>(a.size()) - 1, db = static_cast<int>(b.size()) - 1;
  const std::size_t n = static_cast<std::size_t>(da + db);
  CMatrix s(n, n);
  for (int r = 0; r < db; ++r)
    for (int k = 0; k <= da; ++k) s(r, r + k) = a[da - k];
  for (int r = 0; r < da; ++r)
    for (int k = 0; k <= db; ++k) s(db + r, r + k) = b[db - k];
  return s;
}

// |value| relative to coefficient norm and point size, as for univariate roots.
double point_residual(const AffineSeries2& s, Pair p) {
  const int deg = std::max(s.effective_degree(), 0);
  const double size = std::max({1.0, std::abs(p.first), std::abs(p.second)});
  const double scale = s.max_abs() * std::pow(size, deg);
  return scale > 0 ? std::abs(s(p.first, p.second)) / scale : 0.0;
}

double pair_residual(const AffineSeries2& a, const AffineSeries2& b, Pair p) {
  return point_residual(a, p) + point_residual(b, p);
}

Pair newton_polish(const AffineSeries2& a, const AffineSeries2& b, Pair p) {
  const AffineSeries2 au = a.derivative(0), av = a.derivative(1);
  const AffineSeries2 bu = b.derivative(0), bv = b.derivative(1);
  double best = pair_residual(a, b, p);
  for (int it = 0; it < 6 && best > 0.0; ++it) {
    const Complex fa = a(p.first, p.second), fb = b(p.first, p.second);
    const Complex j11 = au(p.first, p.second), j12 = av(p.first, p.second);
    const Complex j21 = bu(p.first, p.second), j22 = bv(p.first, p.second);
    const Complex det = j11 * j22 - j12 * j21;
    if (det == Complex{}) break;
    const Pair next{p.first - (j22 * fa - j12 * fb) / det, p.second - (-j21 * fa + j11 * fb) / det};
    if (!is_finite(next.first) || !is_finite(next.second)) break;
    const double r = pair_residual(a, b, next);
    if (r >= best) break;
    best = r;
    p = next;
  }
  return p;
}

}  // namespace

std::vector<SystemRoot> solve_affine_system(const AffineSeries2& a, const AffineSeries2& b,
                                            const SolveOptions& opts) {
  const int da = a.effective_degree(), db = b.effective_degree();
  if (da < 0 || db < 0) throw Error(ErrorCode::PositiveDimensional, "an equation vanishes identically");
  if (da == 0 || db == 0) return {};

  Rng rng(opts.rotation_seed, 0xA11CE);
  const double theta = 0.3 + 0.9 * rng.uniform();
  const Complex c = std::cos(theta);
  const Complex s = std::polar(std::sin(theta), 2.0 * std::numbers::pi * rng.uniform());
  // (u, v) = (c x + s y, -conj(s) x + c y)
  auto rotate = [&](const AffineSeries2& p, int deg) {
    AffineSeries2 h1(deg), h2(deg);
    if (deg >= 1) {
      h1.set_coeff(1, 0, c);
      h1.set_coeff(0, 1, s);
      h2.set_coeff(1, 0, -std::conj(s));
      h2.set_coeff(0, 1, c);
    }
    return compose(p.truncated(deg), h1, h2);
  };
  const AffineSeries2 A = rotate(a, da), B = rotate(b, db);
  const Bivariate Ax = split_by_x(A, da), Bx = split_by_x(B, db);

  const int M = da * db + 1;
  std::vector<Complex> values(static_cast<std::size_t>(M));
  double worst_ratio = 0.0;
  for (int k = 0; k < M; ++k) {
    const Complex y = std::polar(1.0, 2.0 * std::numbers::pi * k / M);
    const CMatrix S = sylvester(at_y(Ax, y), at_y(Bx, y));
    values[k] = determinant(S);
    const double h = hadamard_bound(S);
    if (h > 0) worst_ratio = std::max(worst_ratio, std::abs(values[k]) / h);
  }
  if (worst_ratio <= 1e-11)
    throw Error(ErrorCode::PositiveDimensional, "eliminant vanishes identically");
  std::vector<Complex> rc(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    Complex acc{};
    for (int k = 0; k < M; ++k) acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * k * m / M);
    rc[m] = acc / static_cast<double>(M);
  }
  const UnivariatePoly R(rc);
  if (R.degree() < 1) return {};
  const RootSet ys = roots_univariate(R, opts.roots);

  std::vector<SystemRoot> out;
  for (const auto& yr : ys.roots) {
    const Complex y = yr.value;
    const auto ca = at_y(Ax, y), cb = at_y(Bx, y);
    std::vector<Complex> cands;
    for (const auto* coeffs : {&ca, &cb}) {
      const UnivariatePoly q(*coeffs);
      if (q.degree() < 1) continue;
      for (const auto& r : roots_univariate(q, opts.roots).roots) cands.push_back(r.value);
    }
    if (cands.empty()) throw Error(ErrorCode::IllConditioned, "no back-substitution candidate");
    std::vector<std::pair<double, Complex>> scored;
    for (const auto& x : cands) scored.push_back({pair_residual(A, B, {x, y}), x});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& p, const auto& q) { return p.first < q.first; });
    const auto [best_res, best_x] = scored.front();
    if (best_res > opts.accept_tol)
      throw Error(ErrorCode::IllConditioned, "eliminant root without a common solution");
    for (std::size_t k = 1; k < scored.size(); ++k) {
      const double sep = std::abs(scored[k].second - best_x) / std::max(1.0, std::abs(best_x));
      if (scored[k].first <= opts.accept_tol && sep > 1e-3)
        throw Error(ErrorCode::IllConditioned, "two solutions share one projection");
    }
    Pair uv{c * best_x + s * y, -std::conj(s) * best_x + c * y};
    if (yr.multiplicity == 1) uv = newton_polish(a, b, uv);
    out.push_back({uv, yr.multiplicity, pair_residual(a, b, uv)});
  }
  // dedupe
  std::vector<SystemRoot> merged;
  for (const auto& r : out) {
    bool found = false;
    for (auto& m : merged) {
      const double scale = std::max({1.0, std::abs(m.point.first), std::abs(m.point.second)});
      const double dist = std::hypot(std::abs(m.point.first - r.point.first), std::abs(m.point.second - r.point.second));
      if (dist <= opts.roots.cluster_radius * scale) {
        m.multiplicity += r.multiplicity;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(r);
  }
  return merged;
}

}  // namespace greenp2
