// Acceptance criteria 1-14; one PASS/FAIL line each, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "greenp2/error.hpp"
#include "greenp2/invariants.hpp"
#include "greenp2/multiplicity.hpp"
#include "greenp2/potentials.hpp"
#include "support.hpp"

using namespace greenp2;
using namespace greenp2::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Criterion = std::function<void(Verdict&)>;

const ProjPoint kCorner = ProjPoint::from({0.0, 0.0, 1.0});

ProjPoint point(double a, double b, double c) { return ProjPoint::from({a, b, c}); }

bool near_point(const ProjPoint& a, const Vec3& b, double tol = 1e-7) {
  return fs_distance(a, ProjPoint::from(b)) < tol;
}

bool line_is(const HomogPoly3& form, const Vec3& expected) {
  Vec3 a{};
  form.for_each_term([&](int i, int j, int, Complex c) { a[i == 1 ? 0 : (j == 1 ? 1 : 2)] = c; });
  return near_point(ProjPoint::from(a), expected, 1e-8);
}

bool lines_are(const std::vector<InvariantLine>& lines, const std::vector<Vec3>& expected) {
  if (lines.size() != expected.size()) return false;
  for (const Vec3& e : expected) {
    bool found = false;
    for (const auto& l : lines) found = found || line_is(l.form, e);
    if (!found) return false;
  }
  return true;
}

bool points_are(const std::vector<ProjPoint>& pts, const std::vector<Vec3>& expected) {
  if (pts.size() != expected.size()) return false;
  for (const Vec3& e : expected) {
    bool found = false;
    for (const auto& p : pts) found = found || near_point(p, e);
    if (!found) return false;
  }
  return true;
}

std::vector<double> grid(double from, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(from + step * i);
  return out;
}

void green_closed_form(Verdict& v) {
  const double g = green(power_map(2), point(2, 1, 1), 1e-7).value;
  const double expected = std::log(2.0) - 0.5 * std::log(6.0);
  v.detail << "G = " << g << ", expected " << expected << "; ";
  v.check(std::abs(g - expected) <= 1e-6, "closed form");
}

void green_invariance(Verdict& v) {
  Rng rng(2);
  double worst = 0.0;
  for (int m = 0; m < 10; ++m) {
    const ProjMap f = random_map(2, rng);
    const GreenEvaluator g(f);
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = rng.fs_point();
      worst = std::max(worst, std::abs(g.lift(f.lift(x), 1e-8) - 2.0 * g.lift(x, 1e-8)));
    }
  }
  v.detail << "max |G(F x) - 2 G(x)| = " << worst << " over 1000 points; ";
  v.check(worst <= 1e-5, "invariance");
}

void inequality_suite(Verdict& v) {
  Rng rng(3);
  int points = 0, passed = 0;
  for (int m = 0; m < 50; ++m) {
    const int d = 2 + m % 2;
    const ProjMap f = random_map(d, rng);
    for (const ProjPoint& p : critical_samples(f, 20, rng)) {
      ++points;
      const int mu = mu_order(f, p, 1), e = e_local(f, p, 1), c = c_order(f, p, 1);
      const bool ok = 2 * (c - 1) <= mu && mu <= 2 * (e - 1) && c * c <= e && mu <= 3 * (d - 1) && e <= d * d &&
                      c <= d;
      passed += ok;
      if (!ok) {
        std::ostringstream s;
        s << "map " << m << ": mu=" << mu << " e=" << e << " c=" << c;
        v.check(false, s.str());
      }
    }
  }
  v.detail << passed << "/" << points << " critical points; ";
  v.check(points == 1000, "point count");
}

void cocycle_laws(Verdict& v) {
  std::vector<ProjMap> corpus{power_map(2), example_map()};
  for (const char* row : {"1-0", "1-2", "2-1", "2-3"}) corpus.push_back(gen_table1(row, 2, 3));
  Rng rng(77);
  int checks = 0;
  for (const ProjMap& f : corpus) {
    std::vector<ProjPoint> pts{kCorner, point(1, 0, 0), point(0, 1, 0)};
    for (const auto& p : critical_samples(f, 2, rng)) pts.push_back(p);
    pts.push_back(ProjPoint::from(rng.fs_point()));
    std::erase_if(pts, [&](const ProjPoint& p) { return !orbit_well_separated(f, p, 4); });
    for (const ProjPoint& p : pts)
      for (int n = 1; n <= 3; ++n)
        for (int k = 1; n + k <= 4; ++k) {
          ProjPoint q = p;
          for (int j = 0; j < n; ++j) q = f.apply(q);
          const int mu_nk = mu_order(f, p, n + k), mu_n = mu_order(f, p, n), mu_k = mu_order(f, q, k);
          v.check(mu_nk == mu_n + mu_after(f, p, n, k), "mu additive");
          v.check(e_local(f, p, n + k) == e_local(f, p, n) * e_local(f, q, k), "e multiplicative");
          v.check(c_order(f, p, n + k) >= c_order(f, p, n) * c_order(f, q, k), "c supermultiplicative");
          v.check(3 + 2 * mu_nk <= (3 + 2 * mu_n) * (3 + 2 * mu_k), "mu hat submultiplicative");
          checks += 4;
        }
  }
  v.detail << checks << " integer laws on " << corpus.size() << " maps; ";
}

void example_map_truth(Verdict& v) {
  const ProjMap f = example_map();
  v.check(e_local(f, kCorner, 1) == 4, "e = 4");
  v.check(mu_order(f, kCorner, 1) == 2, "mu = 2");
  for (int n = 1; n <= 5; ++n) v.check(c_order(f, kCorner, n) == 1, "c_n = 1");
  const ExceptionalSets s = exceptional_sets(f);
  v.check(lines_are(s.e1_lines, {{0.0, 0.0, 1.0}}), "E1 = {t = 0}");
  std::vector<ProjPoint> e2;
  for (const auto& p : s.e2_points) e2.push_back(p.point);
  v.check(points_are(e2, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}), "E2 = {[1:0:0], [0:1:0]}");
  v.detail << "e=4 mu=2 c=1 (n<=5), |E1|=" << s.e1_lines.size() << " |E2|=" << e2.size() << "; ";
}

void power_map_structure(Verdict& v) {
  const ProjMap f = power_map(2);
  const std::vector<Vec3> axes{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  v.check(lines_are(invariant_lines(f), axes), "invariant lines");
  v.check(points_are(invariant_points(f), axes), "invariant points");
  const TransitionMatrix tm =
      transition_matrix(f, std::vector<HomogPoly3>{HomogPoly3::variable(0), HomogPoly3::variable(1),
                                                   HomogPoly3::variable(2)});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) v.check(tm.t[i][j] == (i == j ? 2 : 0), "diag(2,2,2)");
  v.check(std::abs(tm.rho - 2.0) < 1e-9, "rho = 2");
  for (double x : tm.perron) v.check(std::abs(x - tm.perron[0]) < 1e-9 && x > 0, "Perron vector (1,1,1)");
  const std::string row = classify(exceptional_sets(f)).row;
  v.check(row == "3-3", "row 3-3");
  v.detail << "rho=" << tm.rho << " row=" << row << "; ";
}

void table_round_trip(Verdict& v) {
  int total = 0, ok = 0;
  for (const auto& row : table1_rows()) {
    if (row == "generic") continue;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      ++total;
      const std::string got = classify(exceptional_sets(gen_table1(row, 2, seed))).row;
      ok += got == row;
      v.check(got == row, row + " seed " + std::to_string(seed) + " -> " + got);
    }
  }
  v.detail << ok << "/" << total << " rows recovered; ";
  v.check(total == 90, "nine rows");
}

void lattes_ueda(Verdict& v) {
  const ProjMap f = gen_lattes_ueda(2);
  v.check(f.degree() == 2 && f.nondegeneracy_residual() > 0.0, "validates");
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const Fiber fib = preimages(f, ProjPoint::from(rng.fs_point()));
    v.check(fib.total_multiplicity == 4 && fib.preimages.size() == 4u, "fiber count 4");
  }
  const ExceptionalSets s = exceptional_sets(f);
  v.check(s.e1_lines.empty(), "E1 empty");
  v.check(s.e2_points.empty(), "E2 empty");
  v.detail << "residual " << f.nondegeneracy_residual() << ", 10 fibers of 4; ";
}

void equidistribution(Verdict& v) {
  const ProjMap f = power_map(2);
  const EquidistReport r = equidist_distance(f, HomogPoly3::linear({1.0, 1.0, 2.0}), 8, 10000, 1, 4);
  v.check(r.per_n[8].l1_distance < 0.02, "distance < 0.02 at n = 8");
  for (int n = 1; n <= 8; ++n)
    v.check(r.per_n[n].l1_distance <= r.per_n[n - 1].l1_distance + 2.0 * r.per_n[n - 1].stderr_, "decreasing");
  const EquidistReport s = equidist_distance(f, HomogPoly3::variable(0), 8, 10000, 1, 4);
  for (const auto& row : s.per_n) {
    v.check(row.l1_distance >= 0.1, "invariant line distance >= 0.1");
    v.check(std::abs(row.l1_distance - s.per_n[0].l1_distance) <= 2.0 * s.per_n[0].stderr_, "constant");
  }
  v.detail << "generic line " << r.per_n[0].l1_distance << " -> " << r.per_n[8].l1_distance
           << ", invariant line " << s.per_n[8].l1_distance << "; ";
}

void kiselman_suite(Verdict& v) {
  const ChartPotential lw = [](Complex, Complex w) { return std::log(std::abs(w)); };
  const ChartPotential lz = [](Complex z, Complex) { return std::log(std::abs(z)); };
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double a = 0.1 * k;
    const double ew = kiselman_estimate(lw, {0.0, 0.0}, {a, 1.0}).slope;
    const double ez = kiselman_estimate(lz, {0.0, 0.0}, {a, 1.0}).slope;
    worst = std::max({worst, std::abs(ew - a), std::abs(ez - 1.0)});
  }
  v.check(worst <= 0.05, "coordinate weights");
  const ChartPotential u = [](Complex z, Complex w) { return std::log(std::abs(z * z * z + w * w)); };
  for (double a : {0.3, 0.6, 1.0})
    for (double lambda : {0.5, 2.0, 3.0}) {
      const double base = kiselman_estimate(u, {0.0, 0.0}, {a, 1.0}).slope;
      const double scaled = kiselman_estimate(u, {0.0, 0.0}, {lambda * a, lambda}).slope;
      v.check(std::abs(scaled - lambda * base) <= 0.05 * std::abs(lambda * base), "homogeneity");
    }
  std::vector<Pair> line;
  for (int i = 0; i < 5; ++i) line.push_back({Complex(0.1 * i, 0.05), 0.0});
  const DecayTable t = kiselman_decay_scan(lw, line, {1.0, 0.5, 0.2, 0.1, 0.05, 0.02});
  v.check(t.monotone && t.values.front() < 0.05, "decay scan tends to 0");
  v.detail << "max weight error " << worst << ", scan at alpha=0.02: " << t.values.front() << "; ";
}

void kiselman_skoda(Verdict& v) {
  for (double c : {0.5, 1.0, 2.0}) {
    const ChartPotential u = [c](Complex z, Complex) { return c * std::log(std::abs(z)); };
    const SublevelTable t = sublevel_volume(u, {}, grid(0.0, 0.5, 9), 100000, 3, 4);
    v.check(t.decay_rate >= 0.9 * 2.0 / c, "rate for c = " + std::to_string(c));
    v.detail << "c=" << c << ": " << t.decay_rate << " (bound " << 0.9 * 2.0 / c << "); ";
  }
}

void jacobian_sublevel(Verdict& v) {
  for (int d : {2, 3}) {
    const ProjMap f = gen_table1("1-0", d, 5);
    const HomogPoly3& jac = f.lift_jacobian();
    // chart z = 1, invariant line {t = 0}; h = Jf / t^{d-1} is the transverse factor
    auto ring_min = [&](Complex w0) {
      double m = std::abs(jac({1.0, w0, 1e-3})) / std::pow(1e-3, d - 1);
      for (int k = 0; k < 16; ++k) {
        const Complex w = w0 + std::polar(0.1, 2.0 * std::acos(-1.0) * k / 16);
        m = std::min(m, std::abs(jac({1.0, w, 1e-3})) / std::pow(1e-3, d - 1));
      }
      return m;
    };
    Complex centre = 0.0;
    for (int i = -8; i <= 8; ++i)
      for (int j = -8; j <= 8; ++j)
        if (ring_min(Complex(0.1 * i, 0.1 * j)) > ring_min(centre)) centre = Complex(0.1 * i, 0.1 * j);
    const ChartPotential u = [&](Complex w, Complex t) { return std::log(std::abs(jac({1.0, w, t}))); };
    const double start = -std::log(ring_min(centre) * std::pow(0.1, d - 1)) + 1.0;
    const SublevelTable tab = sublevel_volume(u, {{centre, 0.0}, 0.1}, grid(start, 0.5, 8), 200000, 7, 4);
    const double bound = 2.0 / (d - 1) - 0.1;
    v.check(tab.decay_rate >= bound, "d = " + std::to_string(d));
    v.detail << "d=" << d << ": " << tab.decay_rate << " (bound " << bound << "); ";
  }
}

void volume_regimes(Verdict& v) {
  const ProjMap f = power_map(2), lu = gen_lattes_ueda(2);
  std::vector<double> a, b;
  for (int n = 0; n <= 4; ++n) {
    a.push_back(volume_decay(f, {2, {0.0, 0.0}, 0.1}, n, 10000, 5, 4).log_jacobian_bound);
    b.push_back(volume_decay(lu, {2, {0.3, 0.2}, 0.1}, n, 10000, 5, 4).log_jacobian_bound);
  }
  const double ra = inner_decay_rate(a), rb = inner_decay_rate(b), ld = std::log(2.0);
  v.check(std::abs(ra - ld) <= 0.15 * ld, "invariant point rate log d");
  v.check(rb < ra, "Lattes-Ueda slower");
  v.detail << "invariant point " << ra << " (log 2 = " << ld << "), Lattes-Ueda " << rb << "; ";
}

std::string shell(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  const int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

void cli_determinism(Verdict& v) {
  const std::string bin = GREENP2_CLI_PATH, fx = GREENP2_FIXTURE_DIR;
  const std::string power = " --map " + fx + "/power_map.json", example = " --map " + fx + "/example_map.json";
  const std::vector<std::string> runs{
      "green --samples 20 --seed 4" + power,
      "green --point 2:1:1 --tol 1e-9" + example,
      "mult --point 0:0:1 --point 1:0:0 --n 3" + example,
      "invariants" + example,
      "classify" + power,
      "equidist --curve z+w+2t --n 6 --samples 2000 --seed 5 --threads 4" + power,
      "equidist --curve z --n 6 --samples 2000 --seed 5" + power,
      "lelong --point 0:0:1" + power,
      "kiselman --point 0:0:1 --curve w" + power,
      "volume --point 0:0:1 --n 3 --samples 2000 --seed 6" + power,
      "gen table1 --row 2-1 --d 2 --seed 3",
      "gen lattes-ueda --d 2",
  };
  int identical = 0;
  for (const auto& args : runs) {
    int s1 = -1, s2 = -1;
    const std::string a = shell(bin + " " + args, s1), b = shell(bin + " " + args, s2);
    const bool ok = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    identical += ok;
    v.check(ok, args);
  }
  int s1 = -1, s2 = -1;
  const std::string pipe = bin + " gen lattes-ueda --d 2 | " + bin + " classify";
  v.check(shell(pipe, s1) == shell(pipe, s2) && s1 == 0 && s2 == 0, "pipeline");
  v.detail << identical << "/" << runs.size() << " commands byte-identical; ";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"green closed form", green_closed_form},
      {"green invariance", green_invariance},
      {"multiplicity inequalities", inequality_suite},
      {"cocycle laws", cocycle_laws},
      {"example map ground truth", example_map_truth},
      {"power map structure", power_map_structure},
      {"table round trip", table_round_trip},
      {"lattes-ueda", lattes_ueda},
      {"equidistribution", equidistribution},
      {"kiselman suite", kiselman_suite},
      {"kiselman-skoda", kiselman_skoda},
      {"jacobian sublevel scaling", jacobian_sublevel},
      {"volume decay regimes", volume_regimes},
      {"cli determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s %2zu %s: %s(%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
