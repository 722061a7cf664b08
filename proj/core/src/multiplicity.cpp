#include "greenp2/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "greenp2/error.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2 {

namespace {

struct ChartMap {
  SeriesPair map, majorant;
  ProjPoint image;
  int image_chart;
};

// Relative size below which a single-step coefficient is a numerical zero.
constexpr double kSnapTol = 1e-9;

// Coefficients of |p| re-expanded at |center|; with `widen`, each coefficient
// also absorbs its first-order change under a unit shift of the center.
AffineSeries2 term_majorant(const HomogPoly3& p, int chart, Pair center, int trunc, bool widen) {
  HomogPoly3 a(p.degree());
  p.for_each_term([&](int i, int j, int k, Complex c) { a.set_coeff(i, j, k, std::abs(c)); });
  const AffineSeries2 m = recenter_taylor(a, chart, {std::abs(center.first), std::abs(center.second)}, trunc + 1);
  AffineSeries2 out = m.truncated(trunc);
  if (widen) out += m.derivative(0) + m.derivative(1);
  return out;
}

// f near x written from `src` chart coordinates to the best chart of f(x).
ChartMap chart_map(const ProjMap& f, const ProjPoint& x, int src, int trunc) {
  const Pair center = x.chart_coords(src);
  std::array<AffineSeries2, 3> s;
  for (int i = 0; i < 3; ++i) s[i] = recenter_taylor(f[i], src, center, trunc);
  Vec3 image_lift{s[0].coeff(0, 0), s[1].coeff(0, 0), s[2].coeff(0, 0)};
  const ProjPoint image = ProjPoint::from(image_lift);
  const int dst = image.best_chart();
  const AffineSeries2 inv = reciprocal(s[dst]);
  const AffineSeries2 inv_major = reciprocal_majorant(s[dst]);
  const auto [a, b] = chart_axes(dst);
  ChartMap out;
  out.image = image;
  out.image_chart = dst;
  int k = 0;
  for (int axis : {a, b}) {
    AffineSeries2 m = s[axis] * inv;
    AffineSeries2 maj = term_majorant(f[axis], src, center, trunc, false) * inv_major;
    const AffineSeries2 wide = term_majorant(f[axis], src, center, trunc, true) * inv_major;
    m.set_coeff(0, 0, 0.0);
    maj.set_coeff(0, 0, 0.0);
    for (int n = 1; n <= trunc; ++n)
      for (int j = 0; j <= n; ++j)
        if (std::abs(m.coeff(n - j, j)) <= kSnapTol * std::abs(wide.coeff(n - j, j))) {
          m.set_coeff(n - j, j, 0.0);
          maj.set_coeff(n - j, j, 0.0);
        }
    out.map[k] = m;
    out.majorant[k] = maj;
    ++k;
  }
  return out;
}

SeriesPair identity_germ(int trunc) {
  return {AffineSeries2::variable(0, trunc), AffineSeries2::variable(1, trunc)};
}

AffineSeries2 jacobian_majorant(const SeriesPair& m) {
  return m[0].derivative(0) * m[1].derivative(1) + m[0].derivative(1) * m[1].derivative(0);
}

int cap_for(int d, int n) {
  double cap = 4.0 * std::pow(static_cast<double>(d), n);
  return static_cast<int>(std::min(cap, 96.0));
}

// Runs `body` with growing truncation until no order exceeds it.
int with_adaptive_truncation(int d, int n, const std::function<int(int)>& body) {
  const int cap = std::max(cap_for(d, n), 2 * d);
  for (int trunc = 2 * d;; trunc = std::min(2 * trunc, cap)) {
    try {
      return body(trunc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OrderExceedsTruncation || trunc >= cap) throw;
    }
  }
}

int pair_order(const SeriesPair& s, const SeriesPair& maj, double tol) {
  int best = -1;
  for (int k = 0; k < 2; ++k) {
    try {
      const int o = vanishing_order(s[k], maj[k], tol);
      best = best < 0 ? o : std::min(best, o);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OrderExceedsTruncation) throw;
    }
  }
  if (best < 0) throw Error(ErrorCode::OrderExceedsTruncation, "germ vanishes to the truncation order");
  return best;
}

}  // namespace

OrbitGerm orbit_germ(const ProjMap& f, const ProjPoint& p, int n, int trunc, std::optional<int> first_chart) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative orbit length");
  OrbitGerm g;
  g.truncation = trunc;
  g.orbit.push_back(p);
  g.charts.push_back(first_chart.value_or(p.best_chart()));
  g.partial.push_back(identity_germ(trunc));
  g.partial_majorants.push_back(identity_germ(trunc));
  for (int j = 0; j < n; ++j) {
    const ChartMap cm = chart_map(f, g.orbit.back(), g.charts.back(), trunc);
    const SeriesPair& prev = g.partial.back();
    const SeriesPair& prev_maj = g.partial_majorants.back();
    SeriesPair next{compose(cm.map[0], prev[0], prev[1]), compose(cm.map[1], prev[0], prev[1])};
    SeriesPair next_maj{compose(cm.majorant[0], prev_maj[0], prev_maj[1]),
                        compose(cm.majorant[1], prev_maj[0], prev_maj[1])};
    g.steps.push_back(cm.map);
    g.step_majorants.push_back(cm.majorant);
    g.partial.push_back(std::move(next));
    g.partial_majorants.push_back(std::move(next_maj));
    g.orbit.push_back(cm.image);
    g.charts.push_back(cm.image_chart);
  }
  return g;
}

int c_order(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "c_order needs n >= 1");
  return with_adaptive_truncation(f.degree(), n, [&](int trunc) {
    const OrbitGerm g = orbit_germ(f, p, n, trunc, opts.first_chart);
    return pair_order(g.partial[n], g.partial_majorants[n], opts.order_tol);
  });
}

int mu_after(const ProjMap& f, const ProjPoint& p, int n, int k, const MultiplicityOptions& opts) {
  if (n < 0 || k < 1) throw Error(ErrorCode::InvalidArgument, "mu_after needs n >= 0, k >= 1");
  return with_adaptive_truncation(f.degree(), n + k, [&](int trunc) {
    const OrbitGerm g = orbit_germ(f, p, n + k, trunc, opts.first_chart);
    // germ of f^k at f^n p, then composed with the germ of f^n at p
    SeriesPair gk = identity_germ(trunc), gk_maj = identity_germ(trunc);
    for (int j = n; j < n + k; ++j) {
      gk = {compose(g.steps[j][0], gk[0], gk[1]), compose(g.steps[j][1], gk[0], gk[1])};
      gk_maj = {compose(g.step_majorants[j][0], gk_maj[0], gk_maj[1]),
                compose(g.step_majorants[j][1], gk_maj[0], gk_maj[1])};
    }
    const AffineSeries2 jac = jacobian_det(gk[0], gk[1]);
    const AffineSeries2 jac_maj = jacobian_majorant(gk_maj);
    const auto& inner = g.partial[n];
    const auto& inner_maj = g.partial_majorants[n];
    const AffineSeries2 pulled = compose(jac, inner[0].truncated(trunc - 1), inner[1].truncated(trunc - 1));
    const AffineSeries2 pulled_maj =
        compose(jac_maj, inner_maj[0].truncated(trunc - 1), inner_maj[1].truncated(trunc - 1));
    return vanishing_order(pulled, pulled_maj, opts.order_tol);
  });
}

int mu_order(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mu_order needs n >= 1");
  return with_adaptive_truncation(f.degree(), n, [&](int trunc) {
    const OrbitGerm g = orbit_germ(f, p, n, trunc, opts.first_chart);
    int total = 0;
    for (int j = 0; j < n; ++j) {
      const AffineSeries2 jac = jacobian_det(g.steps[j][0], g.steps[j][1]);
      const AffineSeries2 jac_maj = jacobian_majorant(g.step_majorants[j]);
      const auto& in = g.partial[j];
      const auto& in_maj = g.partial_majorants[j];
      const AffineSeries2 pulled = compose(jac, in[0].truncated(trunc - 1), in[1].truncated(trunc - 1));
      const AffineSeries2 pulled_maj =
          compose(jac_maj, in_maj[0].truncated(trunc - 1), in_maj[1].truncated(trunc - 1));
      total += vanishing_order(pulled, pulled_maj, opts.order_tol);
    }
    return total;
  });
}

int mu_direct(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mu_direct needs n >= 1");
  return with_adaptive_truncation(f.degree(), n, [&](int trunc) {
    const OrbitGerm g = orbit_germ(f, p, n, trunc, opts.first_chart);
    const AffineSeries2 jac = jacobian_det(g.partial[n][0], g.partial[n][1]);
    return vanishing_order(jac, jacobian_majorant(g.partial_majorants[n]), opts.order_tol);
  });
}

namespace {

ProjPoint perturb(const ProjPoint& q, double delta, Rng& rng) {
  const int c = q.best_chart();
  const Pair uv = q.chart_coords(c);
  const Pair dir = rng.sphere2();
  return ProjPoint::from_chart(c, {uv.first + delta * dir.first, uv.second + delta * dir.second});
}

int count_near(const std::vector<WeightedPoint>& pts, const ProjPoint& p, double radius) {
  int m = 0;
  for (const auto& w : pts)
    if (fs_distance(w.point, p) <= radius) m += w.multiplicity;
  return m;
}

std::vector<WeightedPoint> nested_preimages(const ProjMap& f, const ProjPoint& q, int n) {
  std::vector<WeightedPoint> level{{q, 1}};
  for (int k = 0; k < n; ++k) {
    std::vector<WeightedPoint> next;
    for (const auto& w : level) {
      const Fiber fib = preimages(f, w.point);
      for (const auto& pre : fib.preimages) next.push_back({pre.point, pre.multiplicity * w.multiplicity});
    }
    level = std::move(next);
  }
  return level;
}

// Shared ladder: counts preimages near p of targets approaching f^n p.
LocalDegree ladder_count(const ProjMap& f, const ProjPoint& p, int n) {
  ProjPoint target = p;
  for (int k = 0; k < n; ++k) target = f.apply(target);
  const int d = f.degree();
  const double e_max = std::pow(static_cast<double>(d), 2 * n);
  LocalDegree out;
  const auto exact = nested_preimages(f, target, n);
  double sep = 1.0;
  const double near_tol = 1e-5;
  for (const auto& w : exact) {
    const double dist = fs_distance(w.point, p);
    if (dist <= near_tol) out.fiber_multiplicity += w.multiplicity;
    else sep = std::min(sep, dist);
  }
  Rng rng(0xE10CA1ULL);
  int run = 0, last = -1;
  for (int k = 2; k <= 9; ++k) {
    const double delta = std::pow(10.0, -k);
    const double radius = std::min(10.0 * std::pow(delta, 1.0 / e_max), 0.5 * sep);
    int c = 0;
    try {
      c = count_near(nested_preimages(f, perturb(target, delta, rng), n), p, radius);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SolverFailure && e.code() != ErrorCode::IllConditioned) throw;
      break;
    }
    out.ladder.push_back(c);
    run = (c == last) ? run + 1 : 1;
    last = c;
    if (run >= 3 && c > 0) {
      out.stabilized = true;
      out.value = c;
      return out;
    }
  }
  if (out.fiber_multiplicity > 0) {
    out.value = out.fiber_multiplicity;
    return out;
  }
  throw Error(ErrorCode::Unstable, "local degree counts did not stabilize");
}

}  // namespace

LocalDegree e_step(const ProjMap& f, const ProjPoint& p) { return ladder_count(f, p, 1); }

int e_local(const ProjMap& f, const ProjPoint& p, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "e_local needs n >= 1");
  int e = 1;
  ProjPoint x = p;
  for (int j = 0; j < n; ++j) {
    e *= e_step(f, x).value;
    x = f.apply(x);
  }
  return e;
}

int e_local_direct(const ProjMap& f, const ProjPoint& p, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "e_local_direct needs n >= 1");
  return ladder_count(f, p, n).value;
}

MultiplicityReport asymptotics(const ProjMap& f, const ProjPoint& p, int horizon, const MultiplicityOptions& opts) {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
  const int d = f.degree();
  MultiplicityReport r;
  r.point = p;
  r.degree = d;
  r.horizon = horizon;
  with_adaptive_truncation(d, horizon, [&](int trunc) {
    const OrbitGerm g = orbit_germ(f, p, horizon, trunc, opts.first_chart);
    MultiplicityReport t;
    int mu_total = 0;
    for (int j = 0; j < horizon; ++j) {
      const AffineSeries2 jac = jacobian_det(g.steps[j][0], g.steps[j][1]);
      const AffineSeries2 jac_maj = jacobian_majorant(g.step_majorants[j]);
      t.mu_step.push_back(vanishing_order(jac, jac_maj, opts.order_tol));
      t.c_step.push_back(pair_order(g.steps[j], g.step_majorants[j], opts.order_tol));
      const auto& in = g.partial[j];
      const auto& in_maj = g.partial_majorants[j];
      mu_total += vanishing_order(compose(jac, in[0].truncated(trunc - 1), in[1].truncated(trunc - 1)),
                                  compose(jac_maj, in_maj[0].truncated(trunc - 1), in_maj[1].truncated(trunc - 1)),
                                  opts.order_tol);
      t.mu_series.push_back(mu_total);
      const auto& gn = g.partial[j + 1];
      const auto& gn_maj = g.partial_majorants[j + 1];
      t.c_series.push_back(pair_order(gn, gn_maj, opts.order_tol));
      t.mu_direct_series.push_back(
          vanishing_order(jacobian_det(gn[0], gn[1]), jacobian_majorant(gn_maj), opts.order_tol));
    }
    r.mu_series = t.mu_series;
    r.mu_direct_series = t.mu_direct_series;
    r.c_series = t.c_series;
    r.mu_step = t.mu_step;
    r.c_step = t.c_step;
    return 0;
  });
  ProjPoint x = p;
  int e = 1;
  for (int j = 0; j < horizon; ++j) {
    const int step = e_step(f, x).value;
    r.e_step.push_back(step);
    e *= step;
    r.e_series.push_back(e);
    x = f.apply(x);
  }
  const double N = horizon;
  r.mu_inf_est = std::pow(3.0 + 2.0 * r.mu_series.back(), 1.0 / N);
  r.mu_inf_est_alt = std::pow(1.0 + r.mu_series.back(), 1.0 / N);
  r.e_inf_est = std::pow(static_cast<double>(r.e_series.back()), 1.0 / N);
  r.c_inf_est = std::pow(static_cast<double>(r.c_series.back()), 1.0 / N);
  r.verdicts = inequality_report(r, d);
  return r;
}

std::map<std::string, bool> inequality_report(const MultiplicityReport& r, int d) {
  std::map<std::string, bool> v;
  if (r.mu_series.empty() || r.e_series.empty() || r.c_series.empty()) return v;
  const int mu = r.mu_series[0], e = r.e_series[0], c = r.c_series[0];
  v["mu_lower_bound_by_c"] = 2 * (c - 1) <= mu;
  v["mu_upper_bound_by_e"] = mu <= 2 * (e - 1);
  v["c_le_sqrt_e"] = c * c <= e;
  v["mu_range"] = 0 <= mu && mu <= 3 * (d - 1);
  v["e_range"] = 1 <= e && e <= d * d;
  v["c_range"] = 1 <= c && c <= d;
  bool additive = r.mu_series.size() == r.mu_direct_series.size();
  bool multiplicative = true, super = true, sub = true, monotone = true;
  for (std::size_t n = 0; n < r.mu_series.size(); ++n) {
    additive = additive && r.mu_series[n] == r.mu_direct_series[n];
    if (n == 0) continue;
    const std::size_t prev = n - 1;
    multiplicative = multiplicative && r.e_series[n] == r.e_series[prev] * r.e_step[n];
    super = super && r.c_series[n] >= r.c_series[prev] * r.c_step[n];
    sub = sub && 3 + 2 * r.mu_series[n] <= (3 + 2 * r.mu_series[prev]) * (3 + 2 * r.mu_step[n]);
    monotone = monotone && r.mu_series[n] >= r.mu_series[prev] && r.e_series[n] >= r.e_series[prev];
  }
  v["mu_additive"] = additive;
  v["e_multiplicative"] = multiplicative;
  v["c_supermultiplicative"] = super;
  v["mu_hat_submultiplicative"] = sub;
  v["series_monotone"] = monotone;
  return v;
}

}  // namespace greenp2
