#include "greenp2/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "greenp2/error.hpp"
#include "greenp2/linalg.hpp"
#include "greenp2/multiplicity.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2 {

namespace {

using Binary = std::vector<Complex>;  // index k holds the coefficient of s^{n-k} r^k

double stacked_norm(const std::array<HomogPoly3, 3>& f) {
  double s = 0.0;
  for (const auto& p : f)
    for (Complex c : p.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

double abs_sum(const HomogPoly3& p) {
  double s = 0.0;
  for (Complex c : p.coeffs()) s += std::abs(c);
  return s;
}

double vec_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (Complex c : v) s += std::norm(c);
  return std::sqrt(s);
}

Vec3 cross(const Vec3& x, const Vec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

Vec3 normalized(Vec3 v) {
  const double n = norm3(v);
  for (auto& c : v) c /= n;
  return v;
}

Complex dot(const Vec3& l, const Vec3& x) { return l[0] * x[0] + l[1] * x[1] + l[2] * x[2]; }

Binary binary_ds(const Binary& a) {
  const int n = static_cast<int>(a.size()) - 1;
  if (n == 0) return {0.0};
  Binary r(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) r[k] = static_cast<double>(n - k) * a[k];
  return r;
}

Binary binary_dr(const Binary& a) {
  const int n = static_cast<int>(a.size()) - 1;
  if (n == 0) return {0.0};
  Binary r(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) r[k - 1] = static_cast<double>(k) * a[k];
  return r;
}

Binary binary_mul(const Binary& a, const Binary& b) {
  Binary r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Binary binary_sub(Binary a, const Binary& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

/// Orthonormal basis of {x : l . x = 0}.
std::pair<Vec3, Vec3> line_basis(const Vec3& l) {
  const Vec3 n = normalized({std::conj(l[0]), std::conj(l[1]), std::conj(l[2])});
  std::array<Vec3, 3> cand{};
  for (int i = 0; i < 3; ++i) {
    Vec3 e{};
    e[i] = 1.0;
    const Complex c = inner(n, e);
    for (int k = 0; k < 3; ++k) e[k] -= c * n[k];
    cand[i] = e;
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return norm3(cand[a]) > norm3(cand[b]); });
  const Vec3 a = normalized(cand[order[0]]);
  Vec3 b = cand[order[1]];
  const Complex c = inner(a, b);
  for (int k = 0; k < 3; ++k) b[k] -= c * a[k];
  return {a, normalized(b)};
}

Vec3 line_coeffs(const HomogPoly3& line) {
  return {line.coeff(1, 0, 0), line.coeff(0, 1, 0), line.coeff(0, 0, 1)};
}

/// Unit-norm canonical form of a line, tiny coefficients set to zero.
HomogPoly3 canonical_line(const Vec3& l) {
  Vec3 v = ProjPoint::from(l).coords();
  bool changed = false;
  for (auto& c : v)
    if (c != 0.0 && std::abs(c) < 1e-13) {
      c = 0.0;
      changed = true;
    }
  if (changed) v = ProjPoint::from(v).coords();
  return HomogPoly3::linear(v);
}

std::vector<Complex> combination(const std::array<HomogPoly3, 3>& f, const Vec3& l) {
  std::vector<Complex> r(f[0].coeffs().size());
  for (int i = 0; i < 3; ++i) {
    auto c = f[static_cast<std::size_t>(i)].coeffs();
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += l[i] * c[k];
  }
  return r;
}

struct LineEval {
  std::vector<Complex> residual;
  HomogPoly3 pow_d1, pow_d;
};

LineEval eval_line(const std::array<HomogPoly3, 3>& f, int d, const Vec3& l, Complex lam) {
  LineEval e;
  const HomogPoly3 lin = HomogPoly3::linear(l);
  e.pow_d1 = lin.pow(d - 1);
  e.pow_d = e.pow_d1 * lin;
  e.residual = combination(f, l);
  auto pd = e.pow_d.coeffs();
  for (std::size_t k = 0; k < e.residual.size(); ++k) e.residual[k] -= lam * pd[k];
  return e;
}

Complex fit_lambda(const std::array<HomogPoly3, 3>& f, const Vec3& l, int d) {
  const HomogPoly3 pd = HomogPoly3::linear(l).pow(d);
  const std::vector<Complex> lf = combination(f, l);
  Complex num{};
  double den = 0.0;
  auto c = pd.coeffs();
  for (std::size_t k = 0; k < lf.size(); ++k) {
    num += std::conj(c[k]) * lf[k];
    den += std::norm(c[k]);
  }
  return den > 0.0 ? num / den : Complex{};
}

struct LineFit {
  Vec3 l;
  Complex lambda;
  double residual;
};

/// Damped Gauss-Newton on l o F = lambda l^d with l[chart] = 1.
LineFit fit_line(const std::array<HomogPoly3, 3>& f, int d, int chart, Rng& rng, int max_iter) {
  Vec3 l{};
  for (int i = 0; i < 3; ++i) l[i] = i == chart ? Complex(1.0) : rng.complex_normal();
  Complex lam = fit_lambda(f, l, d);
  int free_idx[2], k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != chart) free_idx[k++] = i;

  LineEval cur = eval_line(f, d, l, lam);
  double rn = vec_norm(cur.residual);
  double mu = 1e-3;
  const std::size_t rows = cur.residual.size();
  for (int it = 0; it < max_iter && rn > 1e-15; ++it) {
    CMatrix jac(rows, 3);
    for (int c = 0; c < 2; ++c) {
      const int i = free_idx[c];
      const HomogPoly3 xi = HomogPoly3::variable(i) * cur.pow_d1;
      auto fc = f[static_cast<std::size_t>(i)].coeffs();
      auto xc = xi.coeffs();
      for (std::size_t r = 0; r < rows; ++r) jac(r, c) = fc[r] - lam * static_cast<double>(d) * xc[r];
    }
    auto pd = cur.pow_d.coeffs();
    for (std::size_t r = 0; r < rows; ++r) jac(r, 2) = -pd[r];
    std::vector<Complex> rhs(rows);
    for (std::size_t r = 0; r < rows; ++r) rhs[r] = -cur.residual[r];

    bool accepted = false;
    while (!accepted && mu < 1e10) {
      const std::vector<Complex> step = damped_least_squares(jac, rhs, mu);
      Vec3 l2 = l;
      l2[free_idx[0]] += step[0];
      l2[free_idx[1]] += step[1];
      const Complex lam2 = lam + step[2];
      LineEval trial = eval_line(f, d, l2, lam2);
      const double rn2 = vec_norm(trial.residual);
      if (rn2 < rn) {
        const double step_size = std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]);
        l = l2;
        lam = lam2;
        cur = std::move(trial);
        rn = rn2;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        if (step_size < 1e-15 * (1.0 + norm3(l))) it = max_iter;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted || norm3(l) > 1e6) break;
  }
  return {l, lam, rn};
}

/// Residual of a unit line against F scaled to unit stacked norm.
std::pair<Complex, double> line_residual(const std::array<HomogPoly3, 3>& fn, int d, const Vec3& l) {
  const Complex lam = fit_lambda(fn, l, d);
  return {lam, vec_norm(eval_line(fn, d, l, lam).residual)};
}

double rel_value(const HomogPoly3& h, const Vec3& x) {
  const double s = abs_sum(h);
  return s > 0.0 ? std::abs(h(normalized(x))) / s : 0.0;
}

bool is_critical(const ProjMap& f, const ProjPoint& p) {
  return rel_value(f.lift_jacobian(), p.coords()) <= 1e-6;
}

/// Smallest k <= max_period with f^k p = p, or 0.
int period_of(const ProjMap& f, const ProjPoint& p, int max_period, double tol = 1e-6) {
  ProjPoint cur = p;
  for (int k = 1; k <= max_period; ++k) {
    cur = f.apply(cur);
    if (fs_distance(cur, p) < tol) return k;
  }
  return 0;
}

bool contains(const std::vector<ProjPoint>& pts, const ProjPoint& p, double tol) {
  return std::any_of(pts.begin(), pts.end(), [&](const ProjPoint& q) { return fs_distance(p, q) < tol; });
}

std::vector<ProjPoint> points_on_curve(const HomogPoly3& phi, Rng& rng, int lines) {
  std::vector<ProjPoint> out;
  for (int s = 0; s < lines; ++s) {
    const Vec3 base = rng.fs_point(), dir = rng.fs_point();
    const UnivariatePoly u = restrict_poly(phi, base, dir);
    if (u.degree() < 1) continue;
    const RootSet rs = roots_univariate(u);
    for (const auto& r : rs.roots) {
      const Vec3 x{base[0] + r.value * dir[0], base[1] + r.value * dir[1], base[2] + r.value * dir[2]};
      const ProjPoint p = ProjPoint::from(x);
      if (!contains(out, p, 1e-6)) out.push_back(p);
    }
  }
  return out;
}

Vec3 gradient(const HomogPoly3& h, const Vec3& x) {
  return {h.derivative(0)(x), h.derivative(1)(x), h.derivative(2)(x)};
}

bool lines_equal(const HomogPoly3& a, const HomogPoly3& b) {
  return fs_distance(ProjPoint::from(line_coeffs(a)), ProjPoint::from(line_coeffs(b))) < 1e-6;
}

std::vector<std::array<HomogPoly3, 3>> derivative_matrix(const ProjMap& f) {
  std::vector<std::array<HomogPoly3, 3>> rows;
  for (int i = 0; i < 3; ++i) rows.push_back({f[i].derivative(0), f[i].derivative(1), f[i].derivative(2)});
  return rows;
}

std::vector<HomogPoly3> derivative_minors(const ProjMap& f) {
  const auto dm = derivative_matrix(f);
  std::vector<HomogPoly3> minors;
  for (int r1 = 0; r1 < 3; ++r1)
    for (int r2 = r1 + 1; r2 < 3; ++r2)
      for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = c1 + 1; c2 < 3; ++c2)
          minors.push_back(dm[r1][c1] * dm[r2][c2] - dm[r1][c2] * dm[r2][c1]);
  return minors;
}

}  // namespace

UnivariatePoly restrict_poly(const HomogPoly3& h, const Vec3& base, const Vec3& dir) {
  std::array<HomogPoly3, 3> subs{HomogPoly3::linear({dir[0], base[0], 0.0}),
                                 HomogPoly3::linear({dir[1], base[1], 0.0}),
                                 HomogPoly3::linear({dir[2], base[2], 0.0})};
  const int m = h.degree();
  if (m == 0) return UnivariatePoly({h.coeff(0, 0, 0)});
  const HomogPoly3 g = h.compose(subs);
  std::vector<Complex> c(static_cast<std::size_t>(m + 1));
  for (int k = 0; k <= m; ++k) c[k] = g.coeff(k, m - k, 0);
  return UnivariatePoly(std::move(c));
}

std::vector<InvariantLine> invariant_lines(const ProjMap& f, const LineSearchOptions& opts) {
  const int d = f.degree();
  const double scale = stacked_norm(f.components());
  std::array<HomogPoly3, 3> fn = f.components();
  for (auto& p : fn) p *= 1.0 / scale;

  std::vector<InvariantLine> found;
  for (int chart = 0; chart < 3; ++chart) {
    for (int s = 0; s < opts.starts; ++s) {
      if (static_cast<int>(found.size()) >= opts.max_lines) return found;
      Rng rng(opts.seed, static_cast<std::uint64_t>(chart * opts.starts + s));
      const LineFit fit = fit_line(fn, d, chart, rng, opts.max_iter);
      if (!is_finite(fit.lambda) || norm3(fit.l) > 1e6) continue;
      const HomogPoly3 form = canonical_line(fit.l);
      const Vec3 lc = line_coeffs(form);
      const auto [lam, res] = line_residual(fn, d, lc);
      if (res > opts.line_tol) continue;
      auto same = std::find_if(found.begin(), found.end(),
                               [&](const InvariantLine& l) { return lines_equal(l.form, form); });
      if (same != found.end()) {
        if (res < same->residual) *same = {form, lam * scale, res};
        continue;
      }
      found.push_back({form, lam * scale, res});
    }
  }
  return found;
}

Vec3 LineRestriction::point(Complex s, Complex r) const {
  return {s * a[0] + r * b[0], s * a[1] + r * b[1], s * a[2] + r * b[2]};
}

LineRestriction restrict_to_line(const ProjMap& f, const HomogPoly3& line, std::uint64_t seed) {
  if (line.degree() != 1) throw Error(ErrorCode::InvalidArgument, "restriction needs a linear form");
  auto [a, b] = line_basis(line_coeffs(line));
  Rng rng(seed);
  Complex al = rng.complex_normal(), be = rng.complex_normal();
  const double n = std::sqrt(std::norm(al) + std::norm(be));
  al /= n;
  be /= n;
  LineRestriction res;
  for (int k = 0; k < 3; ++k) {
    res.a[k] = al * a[k] + be * b[k];
    res.b[k] = -std::conj(be) * a[k] + std::conj(al) * b[k];
  }
  const int d = f.degree();
  std::array<HomogPoly3, 3> subs{HomogPoly3::linear({res.a[0], res.b[0], 0.0}),
                                 HomogPoly3::linear({res.a[1], res.b[1], 0.0}),
                                 HomogPoly3::linear({res.a[2], res.b[2], 0.0})};
  res.first.assign(static_cast<std::size_t>(d + 1), 0.0);
  res.second.assign(static_cast<std::size_t>(d + 1), 0.0);
  for (int i = 0; i < 3; ++i) {
    const HomogPoly3 g = f[i].compose(subs);
    for (int k = 0; k <= d; ++k) {
      res.first[k] += std::conj(res.a[i]) * g.coeff(d - k, k, 0);
      res.second[k] += std::conj(res.b[i]) * g.coeff(d - k, k, 0);
    }
  }
  return res;
}

std::vector<std::vector<ProjPoint>> line_invariant_orbits(const ProjMap& f, const HomogPoly3& line, int max_period) {
  const int d = f.degree();
  const LineRestriction lr = restrict_to_line(f, line);
  const Binary w = binary_sub(binary_mul(binary_ds(lr.first), binary_dr(lr.second)),
                              binary_mul(binary_dr(lr.first), binary_ds(lr.second)));
  const int n = static_cast<int>(w.size()) - 1;
  std::vector<Complex> u(w.size());
  for (int m = 0; m <= n; ++m) u[m] = w[n - m];
  const RootSet rs = roots_univariate(UnivariatePoly(std::move(u)));

  std::vector<ProjPoint> ramified;
  for (const auto& r : rs.roots)
    if (r.multiplicity >= d - 1) ramified.push_back(ProjPoint::from(lr.point(r.value, 1.0)));

  std::vector<std::vector<ProjPoint>> orbits;
  std::vector<bool> used(ramified.size(), false);
  for (std::size_t i = 0; i < ramified.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> idx{i};
    ProjPoint cur = ramified[i];
    for (int step = 1; step <= max_period; ++step) {
      cur = f.apply(cur);
      std::size_t j = ramified.size();
      for (std::size_t k = 0; k < ramified.size(); ++k)
        if (fs_distance(cur, ramified[k]) < 1e-6) j = k;
      if (j == ramified.size()) break;
      if (j == i) {
        std::vector<ProjPoint> orbit;
        for (std::size_t k : idx) {
          used[k] = true;
          orbit.push_back(ramified[k]);
        }
        orbits.push_back(std::move(orbit));
        break;
      }
      idx.push_back(j);
      cur = ramified[j];
    }
  }
  return orbits;
}

bool fiber_collapses(const ProjMap& f, const ProjPoint& p) {
  const int dd = f.degree() * f.degree();
  const Fiber fib = preimages(f, f.apply(p));
  if (fib.total_multiplicity != dd) return false;
  int near = 0;
  for (const auto& w : fib.preimages)
    if (fs_distance(w.point, p) < 1e-5) near += w.multiplicity;
  return near == dd;
}

PointSearch invariant_orbits(const ProjMap& f, const std::vector<InvariantLine>& lines, const PointSearchOptions& opts) {
  const int d = f.degree();
  PointSearch out;
  std::vector<ProjPoint> candidates;

  const PointSet fixed = fixed_points(f);
  if (!fixed.complete()) {
    out.complete = false;
    out.notes.push_back("fixed point count " + std::to_string(fixed.total_multiplicity) + " of " +
                        std::to_string(fixed.expected));
  }
  for (const auto& w : fixed.points)
    if (is_critical(f, w.point)) candidates.push_back(w.point);

  // Points where the lift derivative has rank one: the chart derivative vanishes.
  try {
    const std::vector<HomogPoly3> minors = derivative_minors(f);
    Rng rng(opts.seed);
    HomogPoly3 g1(2 * d - 2), g2(2 * d - 2);
    for (const auto& m : minors) {
      g1 += m * rng.complex_normal();
      g2 += m * rng.complex_normal();
    }
    const PointSet ps = solve_projective(g1, g2, (2 * d - 2) * (2 * d - 2), opts.seed + 1);
    for (const auto& w : ps.points) {
      const bool rank_one = std::all_of(minors.begin(), minors.end(), [&](const HomogPoly3& m) {
        return m.is_zero() || rel_value(m, w.point.coords()) <= 1e-6;
      });
      if (!rank_one) continue;
      const int k = period_of(f, w.point, opts.max_period, 1e-4);
      if (k == 0) continue;
      ProjPoint p = w.point;
      for (int it = 0; it < 8; ++it) p = apply(iterate(f, k), p);
      candidates.push_back(p);
    }
  } catch (const Error& e) {
    out.complete = false;
    out.notes.push_back(std::string("rank search: ") + e.what());
  }

  for (const auto& line : lines)
    for (const auto& orbit : line_invariant_orbits(f, line.form, opts.max_period))
      candidates.insert(candidates.end(), orbit.begin(), orbit.end());

  std::vector<ProjPoint> accepted, rejected;
  for (const auto& p : candidates) {
    if (contains(accepted, p, 1e-6) || contains(rejected, p, 1e-6)) continue;
    const int k = period_of(f, p, opts.max_period);
    if (k == 0) {
      rejected.push_back(p);
      continue;
    }
    std::vector<ProjPoint> orbit{p};
    for (int j = 1; j < k; ++j) orbit.push_back(f.apply(orbit.back()));
    const bool ok = std::all_of(orbit.begin(), orbit.end(),
                                [&](const ProjPoint& q) { return is_critical(f, q) && fiber_collapses(f, q); });
    if (ok) {
      accepted.insert(accepted.end(), orbit.begin(), orbit.end());
      out.orbits.push_back(std::move(orbit));
    } else {
      rejected.push_back(p);
    }
  }
  return out;
}

std::vector<ProjPoint> invariant_points(const ProjMap& f, const PointSearchOptions& opts) {
  const PointSearch s = invariant_orbits(f, invariant_lines(f), opts);
  std::vector<ProjPoint> pts;
  for (const auto& o : s.orbits) pts.insert(pts.end(), o.begin(), o.end());
  return pts;
}

std::vector<HomogPoly3> critical_lines(const ProjMap& f, std::uint64_t seed) {
  const HomogPoly3& jac = f.lift_jacobian();
  Rng rng(seed);
  const std::vector<ProjPoint> samples = points_on_curve(jac, rng, 4);
  std::vector<HomogPoly3> lines;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const Vec3 n = cross(samples[i].coords(), samples[j].coords());
      if (norm3(n) < 1e-8) continue;
      const HomogPoly3 form = canonical_line(n);
      if (std::any_of(lines.begin(), lines.end(), [&](const HomogPoly3& l) { return lines_equal(l, form); }))
        continue;
      const Vec3& x = samples[i].coords();
      const Vec3& y = samples[j].coords();
      bool vanishes = true;
      for (int k = 0; k < 4 && vanishes; ++k) {
        const Complex s = rng.complex_normal(), r = rng.complex_normal();
        vanishes = rel_value(jac, {s * x[0] + r * y[0], s * x[1] + r * y[1], s * x[2] + r * y[2]}) <= 1e-7;
      }
      if (vanishes) lines.push_back(form);
    }
  }
  auto key = [](const HomogPoly3& l) {
    const Vec3 c = line_coeffs(l);
    int m = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(c[i]) > std::abs(c[m]) + 1e-9) m = i;
    return std::make_tuple(m, c[0].real(), c[1].real(), c[2].real());
  };
  std::sort(lines.begin(), lines.end(), [&](const HomogPoly3& a, const HomogPoly3& b) { return key(a) < key(b); });
  return lines;
}

TransitionMatrix transition_matrix(const ProjMap& f, const std::optional<std::vector<HomogPoly3>>& components,
                                   std::uint64_t seed) {
  TransitionMatrix tm;
  tm.components = components ? *components : critical_lines(f, seed);
  const auto& comps = tm.components;
  const std::size_t k = comps.size();
  const HomogPoly3& jac = f.lift_jacobian();
  Rng rng(seed ^ 0x5A5A5A5AULL);

  for (std::size_t i = 0; i < k; ++i) {
    if (comps[i].degree() < 1 || comps[i].is_zero())
      throw Error(ErrorCode::ComponentInvalid, "component " + std::to_string(i) + " is constant");
    for (std::size_t j = 0; j < i; ++j) {
      if (comps[j].degree() != comps[i].degree()) continue;
      auto a = comps[i].coeffs(), b = comps[j].coeffs();
      Complex ip{};
      for (std::size_t m = 0; m < a.size(); ++m) ip += std::conj(a[m]) * b[m];
      if (std::abs(ip) >= (1.0 - 1e-10) * vec_norm(a) * vec_norm(b))
        throw Error(ErrorCode::ComponentInvalid,
                    "components " + std::to_string(j) + " and " + std::to_string(i) + " are proportional");
    }
  }

  std::vector<ProjPoint> smooth(k);
  std::vector<Vec3> normal(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::vector<ProjPoint> pts = points_on_curve(comps[j], rng, 2);
    const double scale = abs_sum(comps[j]);
    bool have = false;
    for (const auto& p : pts) {
      if (rel_value(jac, p.coords()) > 1e-7)
        throw Error(ErrorCode::ComponentInvalid,
                    "Jacobian does not vanish on component " + std::to_string(j));
      if (have) continue;
      const Vec3 g = gradient(comps[j], p.coords());
      if (norm3(g) <= 1e-6 * scale) continue;
      Vec3 n{std::conj(g[0]), std::conj(g[1]), std::conj(g[2])};
      const Complex c = inner(p.coords(), n);
      for (int m = 0; m < 3; ++m) n[m] -= c * p[m];
      smooth[j] = p;
      normal[j] = normalized(n);
      have = true;
    }
    if (!have) throw Error(ErrorCode::ComponentInvalid, "no smooth point found on component " + std::to_string(j));
  }

  tm.t.assign(k, std::vector<int>(k, 0));
  tm.slopes.assign(k, std::vector<double>(k, 0.0));
  const double theta = 2.0 * M_PI * rng.uniform();
  for (std::size_t i = 0; i < k; ++i) {
    const HomogPoly3 pulled = comps[i].compose(f.components());
    for (std::size_t j = 0; j < k; ++j) {
      const UnivariatePoly raw = restrict_poly(pulled, smooth[j].coords(), normal[j]);
      std::vector<Complex> c(raw.coeffs().begin(), raw.coeffs().end());
      for (auto& v : c)
        if (std::abs(v) < 1e-10 * raw.coeff_norm()) v = 0.0;
      const UnivariatePoly g(c);
      std::vector<double> xs, ys;
      for (int m = 0; m < 5; ++m) {
        const double s = std::pow(10.0, -3.0 - 0.5 * m);
        const double v = std::abs(g(std::polar(s, theta)));
        if (v <= 0.0) throw Error(ErrorCode::NonIntegerOrder, "pullback vanishes along the transverse arc");
        xs.push_back(std::log(s));
        ys.push_back(std::log(v));
      }
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / 5.0;
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / 5.0;
      double sxy = 0.0, sxx = 0.0;
      for (int m = 0; m < 5; ++m) {
        sxy += (xs[m] - mx) * (ys[m] - my);
        sxx += (xs[m] - mx) * (xs[m] - mx);
      }
      const double slope = sxy / sxx;
      const double rounded = std::round(slope);
      if (std::abs(slope - rounded) > 0.1)
        throw Error(ErrorCode::NonIntegerOrder, "slope " + std::to_string(slope) + " for components " +
                                                    std::to_string(i) + ", " + std::to_string(j));
      tm.slopes[i][j] = slope;
      tm.t[i][j] = static_cast<int>(rounded);
    }
  }

  // Power iteration on t^T + I.
  std::vector<double> v(k, 1.0);
  double lam = 0.0;
  for (int it = 0; it < 100000 && k > 0; ++it) {
    std::vector<double> w(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      w[a] = v[a];
      for (std::size_t b = 0; b < k; ++b) w[a] += tm.t[b][a] * v[b];
    }
    lam = *std::max_element(w.begin(), w.end());
    double change = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      w[a] /= lam;
      change = std::max(change, std::abs(w[a] - v[a]));
    }
    v = std::move(w);
    if (change < 1e-12) break;
  }
  tm.rho = k > 0 ? lam - 1.0 : 0.0;
  tm.perron = v;
  return tm;
}

std::string to_string(E2Kind kind) {
  switch (kind) {
    case E2Kind::OnE1: return "on_E1";
    case E2Kind::Homogeneous: return "homogeneous";
    default: return "undetermined";
  }
}

ExceptionalSets exceptional_sets(const ProjMap& f, int horizon) {
  if (horizon < 2) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 2");
  const int d = f.degree();
  ExceptionalSets out;
  Rng rng(0xE1E2ULL);
  for (const auto& line : invariant_lines(f)) {
    const auto [a, b] = line_basis(line_coeffs(line.form));
    bool ok = true;
    for (int s = 0; s < 2 && ok; ++s) {
      const Complex u = rng.complex_normal(), v = rng.complex_normal();
      const ProjPoint p = ProjPoint::from({u * a[0] + v * b[0], u * a[1] + v * b[1], u * a[2] + v * b[2]});
      ok = mu_order(f, p, 1) == d - 1;
    }
    (ok ? out.e1_lines : out.rejected_lines).push_back(line);
  }

  const PointSearch search = invariant_orbits(f, out.e1_lines);
  out.invariant_orbits = search.orbits;
  out.notes = search.notes;
  if (!search.complete) out.assumption_flag = true;

  for (const auto& orbit : search.orbits) {
    const int k = static_cast<int>(orbit.size());
    const bool on_line = std::any_of(out.e1_lines.begin(), out.e1_lines.end(), [&](const InvariantLine& l) {
      return std::abs(l.form(orbit[0].coords())) <= 1e-7;
    });
    E2Kind kind = E2Kind::OnE1;
    if (!on_line) {
      int dk = 1;
      for (int j = 0; j < k; ++j) dk *= d;
      try {
        if (c_order(f, orbit[0], k) == dk) {
          kind = E2Kind::Homogeneous;
        } else if (c_order(f, orbit[0], k * horizon) >= 2) {
          kind = E2Kind::Undetermined;
        } else {
          out.notes.push_back("totally invariant orbit of period " + std::to_string(k) + " is not superattracting");
          continue;
        }
      } catch (const Error& e) {
        kind = E2Kind::Undetermined;
        out.notes.push_back(std::string("contraction order: ") + e.what());
      }
    }
    if (kind == E2Kind::Undetermined) out.assumption_flag = true;
    for (const auto& p : orbit) out.e2_points.push_back({p, kind, k});
  }
  return out;
}

const std::vector<std::string>& table1_rows() {
  static const std::vector<std::string> rows{"1-0", "0-1", "1-1a", "1-1b", "1-2",
                                             "2-1", "2-2", "2-3",  "3-3",  "generic"};
  return rows;
}

std::string table1_label(const std::string& row) {
  static const std::map<std::string, std::string> labels{
      {"1-0", "[P:Q:t^d]"},           {"0-1", "[P(z,t):Q:R(z,t)]"},
      {"1-1a", "[P:w^d+tQ:t^d]"},     {"1-1b", "[P(z,w):Q(z,w):t^d]"},
      {"1-2", "[P(z,t):w^d+tQ:t^d]"}, {"2-1", "[P:w^d:t^d]"},
      {"2-2", "[z^d+tP:w^d:t^d]"},    {"2-3", "[z^d+wtP:w^d:t^d]"},
      {"3-3", "[z^d:w^d:t^d]"},       {"generic", "no exceptional set"}};
  const auto it = labels.find(row);
  return it == labels.end() ? std::string("unlisted") : it->second;
}

Configuration classify(const ExceptionalSets& sets) {
  Configuration c;
  c.lines = static_cast<int>(sets.e1_lines.size());
  c.points = static_cast<int>(sets.e2_points.size());
  for (const auto& p : sets.e2_points) {
    std::vector<int> on;
    for (int i = 0; i < c.lines; ++i)
      if (std::abs(sets.e1_lines[static_cast<std::size_t>(i)].form(p.point.coords())) <= 1e-7) on.push_back(i);
    c.incidence.push_back(std::move(on));
  }
  const std::pair<int, int> key{c.lines, c.points};
  if (key == std::pair{0, 0}) {
    c.row = "generic";
  } else if (key == std::pair{1, 1}) {
    c.row = c.incidence[0].empty() ? "1-1b" : "1-1a";
  } else if (key == std::pair{1, 0} || key == std::pair{0, 1} || key == std::pair{1, 2} || key == std::pair{2, 1} ||
             key == std::pair{2, 2} || key == std::pair{2, 3} || key == std::pair{3, 3}) {
    c.row = std::to_string(c.lines) + "-" + std::to_string(c.points);
  } else {
    c.row = "unlisted";
    c.listed = false;
  }
  c.label = table1_label(c.row);
  return c;
}

ConjugacyReport conjugacy_check(const ProjMap& f, const ProjPoint& p, int terms, std::uint64_t seed) {
  if (terms < 0 || terms > 30) throw Error(ErrorCode::InvalidArgument, "terms must lie in [0, 30]");
  const int d = f.degree();
  ConjugacyReport rep;
  rep.period = period_of(f, p, 3, 1e-8);
  if (rep.period == 0) throw Error(ErrorCode::NotSuperattracting, "point is not periodic with period <= 3");
  const int k = rep.period;
  int dk = 1;
  for (int j = 0; j < k; ++j) dk *= d;
  if (c_order(f, p, 2 * k) < 2) throw Error(ErrorCode::NotSuperattracting, "derivative of the return map is not nilpotent");
  rep.homogeneous = c_order(f, p, k) == dk;

  // Frame (e_z, e_w, p); in the skew case e_w is normal to an invariant line through p.
  const Vec3 pt = p.coords();
  Vec3 ew{};
  if (!rep.homogeneous) {
    bool found = false;
    for (const auto& line : invariant_lines(f)) {
      const Vec3 l = line_coeffs(line.form);
      if (std::abs(dot(l, pt)) > 1e-7) continue;
      ew = normalized({std::conj(l[0]), std::conj(l[1]), std::conj(l[2])});
      found = true;
      break;
    }
    if (!found)
      throw Error(ErrorCode::NotSuperattracting, "point is neither homogeneous nor on a totally invariant line");
  } else {
    ew = line_basis({std::conj(pt[0]), std::conj(pt[1]), std::conj(pt[2])}).first;
  }
  Vec3 ez = cross(pt, ew);
  ez = normalized({std::conj(ez[0]), std::conj(ez[1]), std::conj(ez[2])});
  Mat3 u{};
  for (int i = 0; i < 3; ++i) {
    u[i][0] = ez[i];
    u[i][1] = ew[i];
    u[i][2] = pt[i];
  }
  const ProjMap g = k == 1 ? f : iterate(f, k);
  const std::array<HomogPoly3, 3> h = g.conjugated(u);
  const int D = g.degree();
  const Complex r0 = h[2].coeff(0, 0, D);
  auto chart = [&](Complex z, Complex w, int i) { return h[static_cast<std::size_t>(i)]({z, w, 1.0}); };
  // Degree-D parts in (z, w) give the predicted normal form.
  HomogPoly3 na(D), nb(D);
  for (int i = D; i >= 0; --i) {
    na.set_coeff(i, D - i, 0, h[0].coeff(i, D - i, 0) / r0);
    nb.set_coeff(i, D - i, 0, h[1].coeff(i, D - i, 0) / r0);
  }

  Rng rng(seed);
  const double radius = 1e-2;
  const int samples = 32;
  std::vector<double> dev(static_cast<std::size_t>(terms + 1), 0.0);
  double ref = 0.0;
  for (int s = 0; s < samples; ++s) {
    Pair x0 = rng.ball2();
    x0.first *= radius;
    x0.second *= radius;
    const bool on_axis = !rep.homogeneous && s % 2 == 1;
    if (on_axis) x0.second = 0.0;
    std::vector<Pair> orbit{x0};
    std::vector<Complex> unit;  // 1 + eta along the orbit
    for (int j = 0; j <= terms; ++j) {
      const auto [z, w] = orbit.back();
      const Complex c = chart(z, w, 2);
      unit.push_back(r0 / c);
      orbit.push_back({chart(z, w, 0) / c, chart(z, w, 1) / c});
    }
    for (int T = 0; T <= terms; ++T) {
      Complex phi0 = 1.0, phi1 = 1.0;
      double e = 1.0 / D;
      for (int j = 0; j < T; ++j, e /= D) {
        phi0 *= std::pow(unit[j], e);
        phi1 *= std::pow(unit[j + 1], e);
      }
      const Complex y1 = x0.first * phi0, y2 = x0.second * phi0;
      const Complex g1 = orbit[1].first * phi1, g2 = orbit[1].second * phi1;
      const Complex n1 = na({y1, y2, 0.0}), n2 = nb({y1, y2, 0.0});
      double err;
      if (rep.homogeneous) {
        err = std::max(std::abs(g1 - n1), std::abs(g2 - n2));
      } else {
        err = std::abs(g2 - nb.coeff(0, D, 0) * std::pow(y2, D));
        if (on_axis) err = std::max(err, std::abs(g1 - na.coeff(D, 0, 0) * std::pow(y1, D)));
      }
      dev[T] = std::max(dev[T], err);
      if (T == 0) ref = std::max({ref, std::abs(n1), std::abs(n2)});
    }
  }
  for (auto& v : dev) v = ref > 0.0 ? v / ref : v;
  rep.deviations = dev;
  rep.deviation = dev.back();

  rep.alpha = 0.0;
  double dn = 1.0;
  for (int n = 1; n <= 5; ++n) {
    dn *= dk;
    try {
      const int c = c_order(f, p, k * n);
      rep.c_series.push_back(c);
      const double ratio = c / dn;
      rep.alpha = n == 1 ? ratio : std::min(rep.alpha, ratio);
    } catch (const Error&) {
      break;
    }
  }
  return rep;
}

}  // namespace greenp2
