#include "greenp2/proj_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenp2/error.hpp"
#include "greenp2/sampling.hpp"
#include "greenp2/system_solve.hpp"

namespace greenp2 {

namespace {

std::string describe(const Vec3& x) {
  std::string s = "[";
  for (int i = 0; i < 3; ++i) {
    if (i) s += " : ";
    s += std::to_string(x[i].real());
    if (x[i].imag() != 0.0) s += (x[i].imag() < 0 ? " - " : " + ") + std::to_string(std::abs(x[i].imag())) + "i";
  }
  return s + "]";
}

std::array<HomogPoly3, 3> linear_substitution(const Mat3& u) {
  std::array<HomogPoly3, 3> subs;
  for (int v = 0; v < 3; ++v) subs[v] = HomogPoly3::linear({u[v][0], u[v][1], u[v][2]});
  return subs;
}

}  // namespace

ProjPoint ProjPoint::from(const Vec3& x) {
  const double n = norm3(x);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::InvalidArgument, "zero or non-finite point");
  Vec3 y{x[0] / n, x[1] / n, x[2] / n};
  for (const auto& c : y)
    if (std::abs(c) > 1e-12) {
      const Complex phase = std::conj(c) / std::abs(c);
      for (auto& v : y) v *= phase;
      break;
    }
  return ProjPoint(y);
}

ProjPoint ProjPoint::from_chart(int chart, Pair uv) {
  Vec3 x{};
  const auto [a, b] = chart_axes(chart);
  x[chart] = 1.0;
  x[a] = uv.first;
  x[b] = uv.second;
  return from(x);
}

int ProjPoint::best_chart() const {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(coords_[i]) > std::abs(coords_[best])) best = i;
  return best;
}

Pair ProjPoint::chart_coords(int chart) const {
  const Complex c = coords_[static_cast<std::size_t>(chart)];
  if (c == Complex{}) throw Error(ErrorCode::ChartUndefined, "point on the hyperplane at infinity of the chart");
  const auto [a, b] = chart_axes(chart);
  return {coords_[a] / c, coords_[b] / c};
}

double fs_distance(const ProjPoint& a, const ProjPoint& b) {
  const Vec3& x = a.coords();
  const Vec3& y = b.coords();
  const Complex c = inner(y, x);
  const Vec3 r{x[0] - c * y[0], x[1] - c * y[1], x[2] - c * y[2]};
  return std::min(1.0, norm3(r));
}

double sphere_min_norm(const std::array<HomogPoly3, 3>& f, int samples) {
  Rng rng(0x5EED5EEDULL);
  double best = INFINITY;
  for (int k = 0; k < samples; ++k) {
    const Vec3 x = rng.fs_point();
    best = std::min(best, norm3({f[0](x), f[1](x), f[2](x)}));
  }
  return best;
}

ProjMap::ProjMap(std::array<HomogPoly3, 3> f, double residual)
    : degree_(f[0].degree()), f_(std::move(f)), jac_(jacobian_determinant(f_)), residual_(residual) {}

double ProjMap::coeff_norm() const {
  return std::max({f_[0].coeff_norm(), f_[1].coeff_norm(), f_[2].coeff_norm()});
}

ProjMap ProjMap::validate(std::array<HomogPoly3, 3> f) {
  const int d = f[0].degree();
  if (f[1].degree() != d || f[2].degree() != d)
    throw Error(ErrorCode::DegreeMismatch, "components have degrees " + std::to_string(f[0].degree()) + ", " +
                                               std::to_string(f[1].degree()) + ", " + std::to_string(f[2].degree()));
  if (d < 2) throw Error(ErrorCode::DegreeMismatch, "degree must be at least 2");
  const double scale = std::max({f[0].coeff_norm(), f[1].coeff_norm(), f[2].coeff_norm()});
  if (scale == 0.0) throw Error(ErrorCode::DegenerateMap, "all components vanish identically");

  // Common zeros of F lie among those of two generic combinations.
  Rng rng(0xC0FFEEULL);
  bool solved = false;
  int curves = 0;
  for (int attempt = 0; attempt < 4 && !solved; ++attempt) {
    const Complex alpha = rng.complex_normal(), beta = rng.complex_normal();
    const HomogPoly3 g1 = f[0] + f[2] * alpha, g2 = f[1] + f[2] * beta;
    try {
      const PointSet zs = solve_projective(g1, g2, d * d, 0xBADC0DEULL + static_cast<std::uint64_t>(attempt));
      for (const auto& z : zs.points) {
        const Vec3& x = z.point.coords();
        const double r = norm3({f[0](x), f[1](x), f[2](x)});
        if (r <= 1e-8 * scale) throw Error(ErrorCode::DegenerateMap, "common zero at " + describe(x));
      }
      solved = zs.complete();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateMap) throw;
      if (e.code() != ErrorCode::PositiveDimensional && e.code() != ErrorCode::IllConditioned) throw;
      if (e.code() == ErrorCode::PositiveDimensional) ++curves;
    }
  }
  if (curves == 4) throw Error(ErrorCode::DegenerateMap, "components share a common zero curve");
  const double residual = sphere_min_norm(f);
  if (!solved && residual <= 1e-6 * scale)
    throw Error(ErrorCode::DegenerateMap, "components share a common zero curve");
  if (residual <= 1e-12 * scale) throw Error(ErrorCode::DegenerateMap, "lift vanishes on the sphere sample");
  return ProjMap(std::move(f), residual);
}

ProjPoint ProjMap::apply(const ProjPoint& x) const { return ProjPoint::from(lift(x.coords())); }

std::array<HomogPoly3, 3> ProjMap::conjugated(const Mat3& u) const {
  const auto subs = linear_substitution(u);
  std::array<HomogPoly3, 3> fu{f_[0].compose(subs), f_[1].compose(subs), f_[2].compose(subs)};
  std::array<HomogPoly3, 3> out{HomogPoly3(degree_), HomogPoly3(degree_), HomogPoly3(degree_)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += fu[j] * std::conj(u[j][i]);
  return out;
}

ProjMap compose(const ProjMap& f, const ProjMap& g) {
  std::array<HomogPoly3, 3> h{f.f_[0].compose(g.f_), f.f_[1].compose(g.f_), f.f_[2].compose(g.f_)};
  const double r = sphere_min_norm(h);
  return ProjMap(std::move(h), r);
}

ProjMap iterate(const ProjMap& f, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "iterate needs n >= 1");
  ProjMap g = f;
  for (int k = 1; k < n; ++k) g = compose(f, g);
  return g;
}

ProjPoint apply(const ProjMap& f, const ProjPoint& x) { return f.apply(x); }

LogOrbit iterate_lognorm(const ProjMap& f, const ProjPoint& x0, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative iteration count");
  LogOrbit o;
  o.points.reserve(static_cast<std::size_t>(n + 1));
  o.lognorms.reserve(static_cast<std::size_t>(n + 1));
  o.points.push_back(x0);
  o.lognorms.push_back(0.0);
  const double d = f.degree();
  for (int k = 0; k < n; ++k) {
    const Vec3 y = f.lift(o.points.back().coords());
    o.lognorms.push_back(d * o.lognorms.back() + std::log(norm3(y)));
    o.points.push_back(ProjPoint::from(y));
  }
  return o;
}

PointSet solve_projective(const HomogPoly3& g1, const HomogPoly3& g2, int expected, std::uint64_t seed,
                          int attempts) {
  PointSet best;
  best.expected = expected;
  bool have = false;
  Error last(ErrorCode::SolverFailure, "no attempt made");
  int positive_dim = 0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Rng rng(seed, static_cast<std::uint64_t>(attempt));
    const Mat3 u = rng.unitary3();
    const auto subs = linear_substitution(u);
    const AffineSeries2 a = dehomogenize(g1.compose(subs), 2);
    const AffineSeries2 b = dehomogenize(g2.compose(subs), 2);
    SolveOptions opts;
    opts.rotation_seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(attempt));
    std::vector<SystemRoot> roots;
    try {
      roots = solve_affine_system(a, b, opts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PositiveDimensional) ++positive_dim;
      last = e;
      continue;
    }
    PointSet ps;
    ps.expected = expected;
    for (const auto& r : roots) {
      const ProjPoint p = ProjPoint::from(mat_vec(u, Vec3{r.point.first, r.point.second, 1.0}));
      bool merged = false;
      for (auto& q : ps.points)
        if (fs_distance(q.point, p) < kClusterRadius) {
          q.multiplicity += r.multiplicity;
          merged = true;
          break;
        }
      if (!merged) ps.points.push_back({p, r.multiplicity});
      ps.total_multiplicity += r.multiplicity;
    }
    if (!have || ps.total_multiplicity > best.total_multiplicity) {
      best = ps;
      have = true;
    }
    if (best.complete()) break;
  }
  if (!have) {
    if (positive_dim * 2 > attempts)
      throw Error(ErrorCode::PositiveDimensional, "solution set is positive dimensional");
    throw Error(ErrorCode::SolverFailure, last.what());
  }
  return best;
}

PointSet fixed_points(const ProjMap& f) {
  const int d = f.degree();
  const auto z = HomogPoly3::variable(0), w = HomogPoly3::variable(1), t = HomogPoly3::variable(2);
  // x is fixed iff the 2x2 minors of (x, F(x)) vanish; two generic combinations
  // of the minors cut out the fixed points plus spurious points removed below.
  const HomogPoly3 g1 = f[0] * t - z * f[2];
  const HomogPoly3 g2 = f[1] * t - w * f[2];
  const HomogPoly3 g3 = f[0] * w - z * f[1];
  Rng rng(0xF1ED0ULL);
  const Complex a = rng.complex_normal(), b = rng.complex_normal(), c = rng.complex_normal();
  const HomogPoly3 h1 = g1 + g3 * a;
  const HomogPoly3 h2 = g2 + g3 * b + g1 * c;
  PointSet raw = solve_projective(h1, h2, (d + 1) * (d + 1), 0xF1ED);
  PointSet out;
  out.expected = d * d + d + 1;
  const double scale = f.coeff_norm();
  for (const auto& p : raw.points) {
    const Vec3& x = p.point.coords();
    const Vec3 y = f.lift(x);
    const Complex lam = inner(x, y);
    const double off = norm3({y[0] - lam * x[0], y[1] - lam * x[1], y[2] - lam * x[2]});
    if (off <= 1e-6 * scale) {
      out.points.push_back(p);
      out.total_multiplicity += p.multiplicity;
    }
  }
  return out;
}

Fiber preimages(const ProjMap& f, const ProjPoint& q) {
  const int d = f.degree();
  int m = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(q[i]) > std::abs(q[m])) m = i;
  int others[2], k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != m) others[k++] = i;
  const HomogPoly3 g1 = f[others[0]] * q[m] - f[m] * q[others[0]];
  const HomogPoly3 g2 = f[others[1]] * q[m] - f[m] * q[others[1]];
  const PointSet ps = solve_projective(g1, g2, d * d, 0xF1BE);
  Fiber fib;
  fib.target = q;
  fib.preimages = ps.points;
  fib.total_multiplicity = ps.total_multiplicity;
  fib.expected = d * d;
  return fib;
}

}  // namespace greenp2
