#include "greenp2/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "greenp2/error.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2 {

namespace {

double mean_of(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size()); }

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double fs_density(Pair z) { return std::pow(1.0 + std::norm(z.first) + std::norm(z.second), -3.0); }

Vec3 chart_lift(int chart, Pair uv) {
  Vec3 x{};
  const auto [a, b] = chart_axes(chart);
  x[chart] = 1.0;
  x[a] = uv.first;
  x[b] = uv.second;
  return x;
}

Vec3 unit(const Vec3& x) {
  const double n = norm3(x);
  return {x[0] / n, x[1] / n, x[2] / n};
}

/// Slope fit of the sup values against log r, dropping the largest radius and
/// weighting smaller radii more.
SlopeFit radial_fit(const std::vector<double>& r_grid, const std::vector<double>& sups) {
  std::vector<std::size_t> order(r_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r_grid[a] > r_grid[b]; });
  std::vector<double> x, y, w;
  for (std::size_t k = 1; k < order.size(); ++k) {
    x.push_back(std::log(r_grid[order[k]]));
    y.push_back(sups[order[k]]);
    w.push_back(static_cast<double>(k));
  }
  if (x.size() < 5) throw Error(ErrorCode::InvalidArgument, "slope fit needs at least 5 radii after dropping the largest");
  for (double v : y)
    if (!std::isfinite(v)) throw Error(ErrorCode::FitUnstable, "potential is not finite on a sampled circle");
  return fit_line(x, y, w);
}

}  // namespace

double green_sup_bound(const ProjMap& f, int samples) {
  Rng rng(0x5EED5EEDULL);
  double m = 0.0;
  for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(std::log(norm3(f.lift(rng.fs_point())))));
  return 1.5 * std::max(m, 1e-12);
}

GreenEvaluator::GreenEvaluator(const ProjMap& f) : GreenEvaluator(f, green_sup_bound(f)) {}

GreenEvaluator::GreenEvaluator(const ProjMap& f, double sup_bound) : f_(f), m_(sup_bound) {}

GreenEval GreenEvaluator::operator()(const ProjPoint& x, double tol) const {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const double d = f_.degree();
  GreenEval g;
  g.M = m_;
  g.tail_bound = m_ / (d - 1.0);
  Vec3 cur = x.coords();
  double scale = 1.0 / d;
  while (g.tail_bound > tol) {
    const Vec3 y = f_.lift(cur);
    const double n = norm3(y);
    g.value += scale * std::log(n);
    cur = {y[0] / n, y[1] / n, y[2] / n};
    scale /= d;
    ++g.n_used;
    g.tail_bound /= d;
  }
  return g;
}

double GreenEvaluator::lift(const Vec3& x, double tol) const {
  return std::log(norm3(x)) + (*this)(ProjPoint::from(x), tol).value;
}

GreenEval green(const ProjMap& f, const ProjPoint& x, double tol) { return GreenEvaluator(f)(x, tol); }

double curve_potential(const ProjMap& f, const HomogPoly3& phi, int n, const ProjPoint& x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative iterate");
  const int k = phi.degree();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "curve needs positive degree");
  const LogOrbit orb = iterate_lognorm(f, x, n);
  const double dn = std::pow(static_cast<double>(f.degree()), n);
  const double lg = std::log(std::abs(phi(orb.points[static_cast<std::size_t>(n)].coords())));
  if (!std::isfinite(lg)) throw Error(ErrorCode::OnCurve, "point lies on the pulled-back curve");
  return lg / (k * dn) + orb.lognorms[static_cast<std::size_t>(n)] / dn;
}

EquidistReport equidist_distance(const ProjMap& f, const HomogPoly3& phi, int n_max, int samples,
                                 std::uint64_t seed, int threads) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "negative n_max");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  if (phi.degree() < 1) throw Error(ErrorCode::InvalidArgument, "curve needs positive degree");
  EquidistReport rep;
  rep.curve = phi;
  rep.samples = samples;
  rep.seed = seed;
  const GreenEvaluator green_eval(f);
  const int k = phi.degree();
  const double d = f.degree();
  const std::size_t rows = static_cast<std::size_t>(n_max + 1);
  std::vector<double> diff(static_cast<std::size_t>(samples) * rows);
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const ProjPoint x = ProjPoint::from(rng.fs_point());
    const double g = green_eval(x, rep.green_tol).value;
    const LogOrbit orb = iterate_lognorm(f, x, n_max);
    double dn = 1.0;
    for (std::size_t n = 0; n < rows; ++n, dn *= d) {
      const double lg = std::log(std::abs(phi(orb.points[n].coords())));
      const double v = lg / (k * dn) + orb.lognorms[n] / dn;
      diff[i * rows + n] = std::isfinite(v) && v >= -rep.clip_floor ? std::abs(v - g)
                                                                     : std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (std::size_t n = 0; n < rows; ++n) {
    std::vector<double> kept;
    kept.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
      const double v = diff[static_cast<std::size_t>(i) * rows + n];
      if (!std::isnan(v)) kept.push_back(v);
    }
    EquidistRow row;
    row.n = static_cast<int>(n);
    row.l1_distance = mean_of(kept);
    row.stderr_ = stderr_of(kept, row.l1_distance);
    row.clip_fraction = 1.0 - static_cast<double>(kept.size()) / samples;
    rep.per_n.push_back(row);
  }
  rep.nonconvergence = !(rep.per_n.back().l1_distance < 0.5 * rep.per_n.front().l1_distance);
  return rep;
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int k = 4; k <= 14; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "line fit needs at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += wi * r * r;
  }
  fit.residual = std::sqrt(ss / sw);
  return fit;
}

LelongEstimate lelong_estimate(const ChartPotential& u, Pair p, const std::vector<double>& r_grid, int angular,
                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Pair> dirs(static_cast<std::size_t>(angular));
  for (auto& v : dirs) v = rng.sphere2();
  std::vector<double> sups;
  for (double r : r_grid) {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& v : dirs) s = std::max(s, u(p.first + r * v.first, p.second + r * v.second));
    sups.push_back(s);
  }
  const SlopeFit fit = radial_fit(r_grid, sups);
  LelongEstimate est{p, fit.slope, r_grid, fit.residual};
  if (fit.residual > 0.1) throw Error(ErrorCode::FitUnstable, "Lelong fit residual " + std::to_string(fit.residual));
  return est;
}

KiselmanEstimate kiselman_estimate(const ChartPotential& u, Pair p, std::pair<double, double> weights,
                                   const std::vector<double>& r_grid, int angular, std::uint64_t seed) {
  const auto [a1, a2] = weights;
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
  Rng rng(seed);
  std::vector<std::pair<Complex, Complex>> torus(static_cast<std::size_t>(angular));
  for (auto& t : torus) t = {rng.unit_circle(), rng.unit_circle()};
  // With r = s^amax the polydisk radii are s^{amax/a1} and s^{amax/a2}, both at most s.
  const double amax = std::max(a1, a2);
  std::vector<double> sups;
  for (double s : r_grid) {
    const double r1 = std::pow(s, amax / a1), r2 = std::pow(s, amax / a2);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [e1, e2] : torus) best = std::max(best, u(p.first + r1 * e1, p.second + r2 * e2));
    sups.push_back(a1 * a2 / amax * best);
  }
  const SlopeFit fit = radial_fit(r_grid, sups);
  if (fit.residual > 0.1) throw Error(ErrorCode::FitUnstable, "Kiselman fit residual " + std::to_string(fit.residual));
  return {p, weights, fit.slope, r_grid, fit.residual};
}

DecayTable kiselman_decay_scan(const ChartPotential& u, const std::vector<Pair>& line_points,
                               std::vector<double> alpha_grid) {
  std::sort(alpha_grid.begin(), alpha_grid.end());
  DecayTable table;
  table.alphas = alpha_grid;
  for (double a : alpha_grid) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : line_points) best = std::max(best, kiselman_estimate(u, p, {a, 1.0}).slope);
    table.values.push_back(best);
  }
  for (std::size_t i = 1; i < table.values.size(); ++i)
    if (table.values[i - 1] > table.values[i] + 0.05) table.monotone = false;
  return table;
}

SublevelTable sublevel_volume(const ChartPotential& u, const ChartBox& box, const std::vector<double>& t_grid,
                              int samples, std::uint64_t seed, int threads) {
  if (samples < 100000) throw Error(ErrorCode::InvalidArgument, "sublevel volumes need at least 1e5 samples");
  SublevelTable table;
  table.samples = samples;
  table.seed = seed;
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const Complex z = box.center.first + box.radius * rng.unit_disk();
    const Complex w = box.center.second + box.radius * rng.unit_disk();
    values[i] = u(z, w);
  });
  std::vector<double> x, y, wts;
  for (double t : t_grid) {
    const auto hits = std::count_if(values.begin(), values.end(), [&](double v) { return v <= -t; });
    SublevelRow row;
    row.t = t;
    row.fraction = static_cast<double>(hits) / samples;
    row.stderr_ = std::sqrt(row.fraction * (1.0 - row.fraction) / samples);
    table.rows.push_back(row);
    if (hits >= 20) {
      x.push_back(t);
      y.push_back(std::log(row.fraction));
      wts.push_back(static_cast<double>(hits));
    }
  }
  if (x.size() >= 2) {
    const SlopeFit fit = fit_line(x, y, wts);
    table.decay_rate = -fit.slope;
    table.fit_residual = fit.residual;
  }
  return table;
}

Complex chart_jacobian(const ProjMap& f, int chart, Pair uv) {
  const Vec3 x = chart_lift(chart, uv);
  const auto [a, b] = chart_axes(chart);
  const Complex fc = f[chart](x);
  Complex m[2][2];
  const int comps[2] = {a, b};
  const int vars[2] = {a, b};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const Complex num = f[comps[r]].derivative(vars[c])(x) * fc - f[comps[r]](x) * f[chart].derivative(vars[c])(x);
      m[r][c] = num / (fc * fc);
    }
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

VolumeDecay volume_decay(const ProjMap& f, const ChartBall& ball, int n, int samples, std::uint64_t seed,
                         int threads) {
  if (n < 0 || samples < 2) throw Error(ErrorCode::InvalidArgument, "volume decay needs n >= 0 and samples >= 2");
  VolumeDecay out;
  out.n = n;
  out.samples = samples;
  out.seed = seed;
  const double d = f.degree();
  const HomogPoly3& jac = f.lift_jacobian();
  std::vector<double> log_weight(static_cast<std::size_t>(samples)), density(static_cast<std::size_t>(samples));
  std::vector<Vec3> images(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const Pair b = rng.ball2();
    const Pair z{ball.center.first + ball.radius * b.first, ball.center.second + ball.radius * b.second};
    density[i] = fs_density(z);
    // Fubini-Study Jacobian of f at a unit x is |JF(x)|^2 / (d^2 |F(x)|^6).
    double lw = std::log(density[i]);
    Vec3 x = unit(chart_lift(ball.chart, z));
    for (int k = 0; k < n; ++k) {
      const Vec3 y = f.lift(x);
      const double ny = norm3(y);
      lw += 2.0 * std::log(std::abs(jac(x))) - 2.0 * std::log(d) - 6.0 * std::log(ny);
      x = {y[0] / ny, y[1] / ny, y[2] / ny};
    }
    log_weight[i] = lw;
    images[i] = x;
  });

  const double r4 = std::pow(ball.radius, 4.0);
  out.ball_volume = r4 * mean_of(density);
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_weight)
    if (std::isfinite(v)) top = std::max(top, v);
  std::vector<double> shifted(log_weight.size());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = std::isfinite(log_weight[i]) ? std::exp(log_weight[i] - top) : 0.0;
  const double m = mean_of(shifted);
  const double se = stderr_of(shifted, m);
  out.log_jacobian_bound = -2.0 * n * std::log(d) + std::log(r4) + top + std::log(m);
  out.jacobian_bound = std::exp(out.log_jacobian_bound);
  out.jacobian_stderr = m > 0 ? out.jacobian_bound * se / m : 0.0;

  // Occupancy: finest chart grid that still holds at least 4 image points per cell.
  using Key = std::tuple<int, long long, long long, long long, long long>;
  auto occupied = [&](double h, std::size_t lo, std::size_t hi) {
    std::map<Key, Pair> cells;
    for (std::size_t i = lo; i < hi; ++i) {
      const ProjPoint p = ProjPoint::from(images[i]);
      const int c = p.best_chart();
      const Pair uv = p.chart_coords(c);
      const auto cell = [&](double v) { return static_cast<long long>(std::floor(v / h)); };
      const Key key{c, cell(uv.first.real()), cell(uv.first.imag()), cell(uv.second.real()), cell(uv.second.imag())};
      cells.emplace(key, uv);
    }
    double vol = 0.0;
    for (const auto& [key, uv] : cells) {
      const Pair mid{Complex((std::get<1>(key) + 0.5) * h, (std::get<2>(key) + 0.5) * h),
                     Complex((std::get<3>(key) + 0.5) * h, (std::get<4>(key) + 0.5) * h)};
      vol += fs_density(mid) * h * h * h * h;
    }
    return std::make_pair(cells.size(), vol / (M_PI * M_PI / 2.0));
  };
  const std::size_t total = images.size();
  double h = 1.0;
  auto [cells, vol] = occupied(h, 0, total);
  for (int level = 0; level < 60; ++level) {
    const auto [c2, v2] = occupied(h / 2.0, 0, total);
    if (static_cast<double>(total) / static_cast<double>(c2) < 4.0) break;
    h /= 2.0;
    cells = c2;
    vol = v2;
  }
  out.occupancy = vol;
  const double v1 = occupied(h, 0, total / 2).second, v2 = occupied(h, total / 2, total).second;
  out.occupancy_stderr = std::abs(v1 - v2) / 2.0;
  return out;
}

double inner_decay_rate(const std::vector<double>& log_volumes) {
  std::vector<double> x, y;
  for (std::size_t n = 0; n < log_volumes.size(); ++n)
    if (log_volumes[n] < 0.0) {
      x.push_back(static_cast<double>(n));
      y.push_back(std::log(-log_volumes[n]));
    }
  if (x.size() < 2) return 0.0;
  return fit_line(x, y).slope;
}

}  // namespace greenp2
