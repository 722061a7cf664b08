#include "greenp2/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greenp2/error.hpp"

namespace greenp2 {

UnivariatePoly::UnivariatePoly(std::vector<Complex> coeffs, double rel_tol) : coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (!is_finite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
    norm_ = std::max(norm_, std::abs(c));
  }
  while (!coeffs_.empty() && std::abs(coeffs_.back()) <= rel_tol * norm_) coeffs_.pop_back();
}

Complex UnivariatePoly::operator()(Complex x) const {
  Complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

UnivariatePoly UnivariatePoly::derivative() const {
  std::vector<Complex> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<double>(k));
  return UnivariatePoly(std::move(d), 0.0);
}

std::vector<Complex> UnivariatePoly::taylor_at(Complex c) const {
  // repeated synthetic division
  std::vector<Complex> a = coeffs_;
  const int n = degree();
  std::vector<Complex> out;
  for (int j = 0; j <= n; ++j) {
    for (int k = n - 1; k >= j; --k) a[k] += a[k + 1] * c;
    out.push_back(a[j]);
  }
  return out;
}

int RootSet::total_multiplicity() const {
  int m = 0;
  for (const auto& r : roots) m += r.multiplicity;
  return m;
}

namespace {

double natural_scale(std::span<const Complex> c, int j, double r) {
  // sum_i |c_i| C(i,j) r^{i-j}
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(j); i < c.size(); ++i) {
    double binom = 1.0;
    for (int k = 1; k <= j; ++k) binom = binom * static_cast<double>(static_cast<int>(i) - j + k) / k;
    s += std::abs(c[i]) * binom * std::pow(r, static_cast<double>(static_cast<int>(i) - j));
  }
  return s;
}

// An m-fold root is a simple root of the (m-1)-th derivative; Newton there
// recovers the center far more accurately than the cluster centroid.
Complex refine_center(const UnivariatePoly& q, Complex c, int m, double reach) {
  UnivariatePoly g = q;
  for (int k = 1; k < m; ++k) g = g.derivative();
  if (g.degree() < 1) return c;
  const UnivariatePoly dg = g.derivative();
  Complex x = c;
  for (int it = 0; it < 20; ++it) {
    const Complex den = dg(x);
    if (den == Complex{}) break;
    const Complex step = g(x) / den;
    if (!is_finite(step)) break;
    x -= step;
    if (std::abs(x - c) > reach) return c;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

bool is_multiple_root(const UnivariatePoly& q, Complex c, int m, double tol) {
  if (m > q.degree()) return false;
  const auto t = q.taylor_at(c);
  const double r = std::max(1.0, std::abs(c));
  for (int j = 0; j < m; ++j)
    if (std::abs(t[static_cast<std::size_t>(j)]) > tol * natural_scale(q.coeffs(), j, r)) return false;
  return true;
}

double relative_residual(const UnivariatePoly& q, Complex x) {
  const double s = q.coeff_norm() * std::pow(std::max(1.0, std::abs(x)), q.degree());
  return s > 0 ? std::abs(q(x)) / s : 0.0;
}

struct Cluster {
  Complex sum;
  int count;
  double spread;
  Complex centroid() const { return sum / static_cast<double>(count); }
};

}  // namespace

std::vector<Root> cluster_roots(const UnivariatePoly& q, const std::vector<Complex>& values,
                                const RootOptions& opts) {
  std::vector<Cluster> cl;
  for (const auto& v : values) cl.push_back({v, 1, 0.0});
  bool merged = true;
  while (merged && cl.size() > 1) {
    merged = false;
    struct Cand {
      double dist;
      std::size_t a, b;
    };
    std::vector<Cand> cands;
    for (std::size_t a = 0; a < cl.size(); ++a)
      for (std::size_t b = a + 1; b < cl.size(); ++b) {
        const Complex ca = cl[a].centroid(), cb = cl[b].centroid();
        const double scale = std::max({1.0, std::abs(ca), std::abs(cb)});
        const double dist = std::abs(ca - cb);
        if (dist <= 0.5 * scale) cands.push_back({dist / scale, a, b});
      }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.dist < y.dist; });
    std::vector<bool> used(cl.size(), false);
    for (const auto& c : cands) {
      if (used[c.a] || used[c.b]) continue;
      const double scale = std::max({1.0, std::abs(cl[c.a].centroid()), std::abs(cl[c.b].centroid())});
      const Cluster joint{cl[c.a].sum + cl[c.b].sum, cl[c.a].count + cl[c.b].count,
                          std::max({cl[c.a].spread, cl[c.b].spread, c.dist * scale})};
      const Complex center = refine_center(q, joint.centroid(), joint.count, 2.0 * joint.spread + 1e-12);
      if (c.dist <= opts.cluster_radius || is_multiple_root(q, center, joint.count, opts.merge_tol)) {
        cl[c.a] = joint;
        cl[c.b].count = 0;
        used[c.a] = used[c.b] = true;
        merged = true;
      }
    }
    std::erase_if(cl, [](const Cluster& x) { return x.count == 0; });
  }
  std::vector<Root> out;
  for (const auto& c : cl) {
    const Complex center = refine_center(q, c.centroid(), c.count, 2.0 * c.spread + 1e-12);
    out.push_back({center, c.count, relative_residual(q, center)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Root& x, const Root& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

RootSet roots_univariate(const UnivariatePoly& q, const RootOptions& opts) {
  if (q.degree() < 1) throw Error(ErrorCode::InvalidArgument, "root finding needs degree >= 1");
  auto c = std::vector<Complex>(q.coeffs().begin(), q.coeffs().end());
  int zeros = 0;
  while (c[static_cast<std::size_t>(zeros)] == Complex{}) ++zeros;
  c.erase(c.begin(), c.begin() + zeros);
  const UnivariatePoly p(c, 0.0);
  const int n = p.degree();
  RootSet result;
  std::vector<Complex> z;
  if (n >= 1) {
    const UnivariatePoly dp = p.derivative();
    std::vector<double> absc(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) absc[k] = std::abs(c[k]);
    const double radius = std::pow(absc.front() / absc.back(), 1.0 / n);
    for (int k = 0; k < n; ++k) {
      const double ang = 2.0 * std::numbers::pi * k / n + 0.4;
      z.push_back(std::polar(radius, ang));
    }
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    const double eps = std::numeric_limits<double>::epsilon();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
      bool all_done = true;
      for (int k = 0; k < n; ++k) {
        if (done[k]) continue;
        const Complex pv = p(z[k]);
        double bound = 0.0, zp = 1.0;
        const double az = std::abs(z[k]);
        for (double a : absc) {
          bound += a * zp;
          zp *= az;
        }
        if (std::abs(pv) <= 8.0 * eps * bound) {
          done[k] = true;
          continue;
        }
        const Complex ratio = pv / dp(z[k]);
        Complex sum{};
        for (int j = 0; j < n; ++j)
          if (j != k) sum += 1.0 / (z[k] - z[j]);
        const Complex step = ratio / (1.0 - ratio * sum);
        if (!is_finite(step)) continue;
        z[k] -= step;
        if (std::abs(step) <= 4.0 * eps * std::abs(z[k])) done[k] = true;
        else all_done = false;
      }
      if (all_done) break;
    }
    result.iterations = it;
    result.converged = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  }
  for (int k = 0; k < zeros; ++k) z.push_back(0.0);
  result.roots = cluster_roots(q, z, opts);
  return result;
}

}  // namespace greenp2
