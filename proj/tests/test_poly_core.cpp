#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "greenp2/affine_series.hpp"
#include "greenp2/error.hpp"
#include "greenp2/homog_poly.hpp"
#include "greenp2/sampling.hpp"
#include "greenp2/system_solve.hpp"
#include "greenp2/univariate.hpp"

using namespace greenp2;

namespace {

HomogPoly3 random_poly(int d, Rng& rng) {
  std::vector<Complex> c(HomogPoly3::size_for(d));
  for (auto& x : c) x = rng.complex_normal();
  return HomogPoly3(d, c);
}

// Independent expansion of p(u0+u, v0+v) by substituting shifted linear forms.
Complex brute_coeff(const HomogPoly3& p, Pair center, int a, int b) {
  // Dehomogenized chart t: p(z, w, 1). Coefficient of u^a v^b equals
  // (1/a!b!) d^a/du^a d^b/dv^b p at center.
  HomogPoly3 q = p;
  for (int k = 0; k < a; ++k) q = q.derivative(0);
  for (int k = 0; k < b; ++k) q = q.derivative(1);
  double fact = 1.0;
  for (int k = 2; k <= a; ++k) fact *= k;
  for (int k = 2; k <= b; ++k) fact *= k;
  return q({center.first, center.second, 1.0}) / fact;
}

std::vector<Complex> companion_eigenvalues(const std::vector<Complex>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

}  // namespace

TEST(HomogPoly3, MonomialEvaluation) {
  const auto p = HomogPoly3::monomial(2, 1, 0);
  EXPECT_NEAR(std::abs(evaluate_homog(p, {2.0, 3.0, 1.0}) - 12.0), 0.0, 1e-14);
}

TEST(HomogPoly3, VanishesAtOrigin) {
  Rng rng(3);
  const auto p = random_poly(4, rng);
  EXPECT_EQ(p({0.0, 0.0, 0.0}), Complex{});
}

TEST(HomogPoly3, SumOfSquaresIsotropicVector) {
  const auto p = HomogPoly3::monomial(2, 0, 0) + HomogPoly3::monomial(0, 2, 0) + HomogPoly3::monomial(0, 0, 2);
  EXPECT_LT(std::abs(p({1.0, Complex(0, 1), 0.0})), 1e-15);
}

TEST(HomogPoly3, Homogeneity) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 6;
    const auto p = random_poly(d, rng);
    const Vec3 x{rng.complex_normal() * 3.0, rng.complex_normal(), rng.complex_normal()};
    const Complex lambda = rng.complex_normal() * 2.0;
    const Complex lhs = p({lambda * x[0], lambda * x[1], lambda * x[2]});
    const Complex rhs = std::pow(lambda, d) * p(x);
    const double bound = 1e-10 * p.coeff_norm() * std::pow(std::abs(lambda), d) *
                         std::pow(std::max(1.0, norm3(x)), d);
    EXPECT_LE(std::abs(lhs - rhs), bound);
  }
}

TEST(HomogPoly3, LayoutIsGradedLex) {
  HomogPoly3 p(2, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  EXPECT_EQ(p.coeff(2, 0, 0), Complex(1.0));
  EXPECT_EQ(p.coeff(1, 1, 0), Complex(2.0));
  EXPECT_EQ(p.coeff(1, 0, 1), Complex(3.0));
  EXPECT_EQ(p.coeff(0, 2, 0), Complex(4.0));
  EXPECT_EQ(p.coeff(0, 1, 1), Complex(5.0));
  EXPECT_EQ(p.coeff(0, 0, 2), Complex(6.0));
}

TEST(HomogPoly3, ComposeMatchesEvaluation) {
  Rng rng(5);
  const auto p = random_poly(3, rng);
  const std::array<HomogPoly3, 3> s{random_poly(2, rng), random_poly(2, rng), random_poly(2, rng)};
  const auto q = p.compose(s);
  EXPECT_EQ(q.degree(), 6);
  const Vec3 x{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
  const Complex direct = p({s[0](x), s[1](x), s[2](x)});
  EXPECT_LT(std::abs(q(x) - direct), 1e-10 * std::abs(direct) + 1e-12);
}

TEST(HomogPoly3, DerivativeByFiniteDifference) {
  Rng rng(8);
  const auto p = random_poly(4, rng);
  const Vec3 x{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
  for (int v = 0; v < 3; ++v) {
    Vec3 xp = x, xm = x;
    const double h = 1e-5;
    xp[v] += h;
    xm[v] -= h;
    const Complex fd = (p(xp) - p(xm)) / (2 * h);
    EXPECT_LT(std::abs(fd - p.derivative(v)(x)), 1e-6 * (1 + std::abs(fd)));
  }
}

TEST(HomogPoly3, RejectsWrongLength) {
  EXPECT_THROW(HomogPoly3(2, std::vector<Complex>(5)), Error);
}

TEST(RecenterTaylor, ProductAtUnitPoint) {
  const auto p = HomogPoly3::monomial(1, 1, 0);  // zw
  const auto s = recenter_taylor(p, 2, {1.0, 0.0}, 2);
  // zw = (1+u) v = v + u v
  EXPECT_EQ(s.coeff(0, 0), Complex{});
  EXPECT_EQ(s.coeff(1, 0), Complex{});
  EXPECT_EQ(s.coeff(0, 1), Complex(1.0));
  EXPECT_EQ(s.coeff(1, 1), Complex(1.0));
  EXPECT_EQ(s.coeff(2, 0), Complex{});
  EXPECT_EQ(s.coeff(0, 2), Complex{});
}

TEST(RecenterTaylor, ChartVariableIsConstantOne) {
  const auto s = recenter_taylor(HomogPoly3::monomial(0, 0, 2), 2, {0.7, -2.0}, 3);
  EXPECT_EQ(s.coeff(0, 0), Complex(1.0));
  for (int n = 1; n <= 3; ++n)
    for (int j = 0; j <= n; ++j) EXPECT_EQ(s.coeff(n - j, j), Complex{});
}

TEST(RecenterTaylor, AlreadyCentered) {
  const auto s = recenter_taylor(HomogPoly3::monomial(2, 0, 0), 2, {0.0, 0.0}, 4);
  EXPECT_EQ(s.coeff(2, 0), Complex(1.0));
  EXPECT_EQ(s.coeff(0, 0), Complex{});
  EXPECT_EQ(s.coeff(1, 1), Complex{});
}

TEST(RecenterTaylor, MatchesDerivativeOracle) {
  Rng rng(21);
  const auto p = random_poly(4, rng);
  const Pair c{rng.complex_normal(), rng.complex_normal()};
  const auto s = recenter_taylor(p, 2, c, 4);
  for (int n = 0; n <= 4; ++n)
    for (int j = 0; j <= n; ++j) {
      const Complex want = brute_coeff(p, c, n - j, j);
      EXPECT_LT(std::abs(s.coeff(n - j, j) - want), 1e-10 * (1 + std::abs(want)));
    }
}

TEST(RecenterTaylor, RoundTripBackToOrigin) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(3 + trial % 3, rng);
    const int chart = trial % 3;
    const Pair c{rng.complex_normal(), rng.complex_normal()};
    const auto s = recenter_taylor(p, chart, c, p.degree());
    // re-expand the shifted polynomial at -c
    HomogPoly3 shifted(p.degree());
    for (int n = 0; n <= p.degree(); ++n)
      for (int j = 0; j <= n; ++j) {
        int e[3] = {0, 0, 0};
        const auto [a, b] = chart_axes(chart);
        e[a] = n - j;
        e[b] = j;
        e[chart] = p.degree() - n;
        shifted.set_coeff(e[0], e[1], e[2], s.coeff(n - j, j));
      }
    const auto back = recenter_taylor(shifted, chart, {-c.first, -c.second}, p.degree());
    const auto orig = dehomogenize(p, chart);
    for (std::size_t k = 0; k < orig.coeffs().size(); ++k)
      EXPECT_LT(std::abs(back.coeffs()[k] - orig.coeffs()[k]), 1e-9 * orig.max_abs());
  }
}

TEST(RecenterTaylor, InfiniteCenterIsChartUndefined) {
  try {
    recenter_taylor(HomogPoly3::monomial(1, 1, 0), 2, {INFINITY, 0.0}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChartUndefined);
  }
}

TEST(VanishingOrder, Inspection) {
  AffineSeries2 s(6);
  s.set_coeff(2, 1, 1.0);
  s.set_coeff(5, 0, 1.0);
  EXPECT_EQ(vanishing_order(s), 3);
  AffineSeries2 unit(2);
  unit.set_coeff(0, 0, 1.0);
  unit.set_coeff(1, 0, 1.0);
  EXPECT_EQ(vanishing_order(unit), 0);
}

TEST(VanishingOrder, JacobianOfExampleGerm) {
  // (2u + v^2, u^2): Jacobian -4uv
  const auto u = AffineSeries2::variable(0, 4), v = AffineSeries2::variable(1, 4);
  const auto g1 = u * 2.0 + v * v, g2 = u * u;
  const auto j = jacobian_det(g1, g2);
  EXPECT_EQ(j.coeff(1, 1), Complex(-4.0));
  EXPECT_EQ(vanishing_order(j), 2);
}

TEST(VanishingOrder, ZeroSeriesNeedsMoreTruncation) {
  try {
    vanishing_order(AffineSeries2(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderExceedsTruncation);
  }
}

TEST(AffineSeries2, ReciprocalAndComposition) {
  Rng rng(9);
  AffineSeries2 s(6);
  for (int n = 0; n <= 6; ++n)
    for (int j = 0; j <= n; ++j) s.set_coeff(n - j, j, rng.complex_normal() * std::pow(0.5, n));
  s.set_coeff(0, 0, 2.0);
  const auto prod = s * reciprocal(s);
  EXPECT_LT(std::abs(prod.coeff(0, 0) - 1.0), 1e-14);
  for (std::size_t k = 1; k < prod.coeffs().size(); ++k) EXPECT_LT(std::abs(prod.coeffs()[k]), 1e-13);
  // compose with (u + v^2, v): evaluate both ways at a small point
  const auto u = AffineSeries2::variable(0, 6), v = AffineSeries2::variable(1, 6);
  const auto c = compose(s, u + v * v, v);
  const Complex a = 0.01, b = -0.02;
  EXPECT_LT(std::abs(c(a, b) - s(a + b * b, b)), 1e-12);
}

TEST(Roots, SimplePair) {
  const auto r = roots_univariate(UnivariatePoly({-1.0, 0.0, 1.0}));
  ASSERT_EQ(r.roots.size(), 2u);
  EXPECT_NEAR(r.roots[0].value.real(), -1.0, 1e-14);
  EXPECT_NEAR(r.roots[1].value.real(), 1.0, 1e-14);
  EXPECT_EQ(r.roots[0].multiplicity, 1);
}

TEST(Roots, QuarticAtZero) {
  const auto r = roots_univariate(UnivariatePoly({0.0, 0.0, 0.0, 0.0, 1.0}));
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0].multiplicity, 4);
  EXPECT_EQ(r.roots[0].value, Complex{});
}

TEST(Roots, DoubleRootMatchesCompanionOracle) {
  const std::vector<Complex> c{1.0, -2.0, 1.0};
  const auto eig = companion_eigenvalues(c);
  const auto r = roots_univariate(UnivariatePoly(c));
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0].multiplicity, 2);
  for (const auto& e : eig) EXPECT_LT(std::abs(e - r.roots[0].value), 1e-6);
}

TEST(Roots, RandomAgainstCompanionAndVieta) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 20;
    std::vector<Complex> c(static_cast<std::size_t>(n + 1));
    for (auto& x : c) x = rng.complex_normal();
    const auto r = roots_univariate(UnivariatePoly(c));
    EXPECT_EQ(r.total_multiplicity(), n);
    Complex sum{};
    for (const auto& root : r.roots) {
      sum += root.value * static_cast<double>(root.multiplicity);
      EXPECT_LE(root.residual, 1e-8);
    }
    const Complex vieta = -c[n - 1] / c[n];
    EXPECT_LT(std::abs(sum - vieta), 1e-6 * std::max(1.0, std::abs(vieta)));
    for (const auto& e : companion_eigenvalues(c)) {
      double best = 1e300;
      for (const auto& root : r.roots) best = std::min(best, std::abs(root.value - e));
      EXPECT_LT(best, 1e-6 * std::max(1.0, std::abs(e)));
    }
  }
}

TEST(Roots, ClustersHighMultiplicity) {
  // (x - 0.3 - 0.1i)^6 (x + 2)^3
  std::vector<Complex> c{1.0};
  auto mul = [&](Complex r) {
    std::vector<Complex> out(c.size() + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      out[k + 1] += c[k];
      out[k] -= r * c[k];
    }
    c = out;
  };
  for (int k = 0; k < 6; ++k) mul({0.3, 0.1});
  for (int k = 0; k < 3; ++k) mul(-2.0);
  const auto r = roots_univariate(UnivariatePoly(c));
  ASSERT_EQ(r.roots.size(), 2u);
  EXPECT_EQ(r.roots[0].multiplicity, 3);
  EXPECT_EQ(r.roots[1].multiplicity, 6);
  EXPECT_LT(std::abs(r.roots[1].value - Complex(0.3, 0.1)), 1e-8);
}

TEST(SystemSolve, LineMeetsParabola) {
  AffineSeries2 a(2), b(2);
  a.set_coeff(2, 0, 1.0);
  a.set_coeff(0, 0, -1.0);
  b.set_coeff(0, 1, 1.0);
  b.set_coeff(1, 0, -1.0);
  auto sol = solve_affine_system(a, b);
  ASSERT_EQ(sol.size(), 2u);
  std::sort(sol.begin(), sol.end(), [](auto& x, auto& y) { return x.point.first.real() < y.point.first.real(); });
  EXPECT_LT(std::abs(sol[0].point.first + 1.0), 1e-10);
  EXPECT_LT(std::abs(sol[0].point.second + 1.0), 1e-10);
  EXPECT_LT(std::abs(sol[1].point.first - 1.0), 1e-10);
  EXPECT_LT(std::abs(sol[1].point.second - 1.0), 1e-10);
}

TEST(SystemSolve, FourfoldOrigin) {
  AffineSeries2 a(2), b(2);
  a.set_coeff(2, 0, 1.0);
  b.set_coeff(0, 2, 1.0);
  const auto sol = solve_affine_system(a, b);
  ASSERT_EQ(sol.size(), 1u);
  EXPECT_EQ(sol[0].multiplicity, 4);
  EXPECT_LT(std::abs(sol[0].point.first) + std::abs(sol[0].point.second), 1e-6);
}

TEST(SystemSolve, TwoParabolas) {
  AffineSeries2 a(2), b(2);
  a.set_coeff(2, 0, 1.0);
  a.set_coeff(0, 1, -1.0);
  b.set_coeff(0, 2, 1.0);
  b.set_coeff(1, 0, -1.0);
  const auto sol = solve_affine_system(a, b);
  int total = 0;
  for (const auto& s : sol) {
    total += s.multiplicity;
    // u^4 = u with v = u^2
    const Complex u = s.point.first;
    EXPECT_LT(std::abs(u * u * u * u - u), 1e-9);
    EXPECT_LT(std::abs(s.point.second - u * u), 1e-9);
  }
  EXPECT_EQ(total, 4);
  EXPECT_EQ(sol.size(), 4u);
}

TEST(SystemSolve, PositiveDimensional) {
  AffineSeries2 a(2), b(2);
  a.set_coeff(1, 1, 1.0);  // uv
  b.set_coeff(2, 0, 1.0);  // u^2
  try {
    solve_affine_system(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositiveDimensional);
  }
}

TEST(SystemSolve, GenericDenseQuadraticsHaveFourSolutions) {
  Rng rng(101);
  int good = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    AffineSeries2 a(2), b(2);
    for (int n = 0; n <= 2; ++n)
      for (int j = 0; j <= n; ++j) {
        a.set_coeff(n - j, j, rng.complex_normal());
        b.set_coeff(n - j, j, rng.complex_normal());
      }
    try {
      const auto sol = solve_affine_system(a, b);
      int total = 0;
      bool ok = true;
      for (const auto& s : sol) {
        total += s.multiplicity;
        ok = ok && s.residual < 1e-8;
      }
      if (total == 4 && ok) ++good;
    } catch (const Error&) {
    }
  }
  EXPECT_GE(good, trials * 95 / 100);
}
