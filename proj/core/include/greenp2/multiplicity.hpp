#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenp2/affine_series.hpp"
#include "greenp2/proj_map.hpp"

namespace greenp2 {

using SeriesPair = std::array<AffineSeries2, 2>;

/// Local expansion of f^n at p, written in the charts of the orbit points.
/// Every series vanishes at the origin; majorants bound the magnitude of the
/// terms that produced each coefficient and decide which ones are zero.
struct OrbitGerm {
  std::vector<ProjPoint> orbit;   // p, f p, ..., f^n p
  std::vector<int> charts;        // chart used at each orbit point
  std::vector<SeriesPair> steps;  // f near f^j p, j < n
  std::vector<SeriesPair> step_majorants;
  std::vector<SeriesPair> partial;  // f^j near p, j <= n
  std::vector<SeriesPair> partial_majorants;
  int truncation = 0;
};

OrbitGerm orbit_germ(const ProjMap& f, const ProjPoint& p, int n, int trunc,
                     std::optional<int> first_chart = std::nullopt);

struct MultiplicityOptions {
  /// Coefficient counts as zero below order_tol times its majorant.
  double order_tol = 1e-7;
  std::optional<int> first_chart;
};

/// mu(p, J f^n): sum of the orders at p of Jf composed with f^j.
int mu_order(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts = {});
/// Order at p of the Jacobian determinant of the germ of f^n itself.
int mu_direct(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts = {});
/// ord_p(J f^k o f^n).
int mu_after(const ProjMap& f, const ProjPoint& p, int n, int k, const MultiplicityOptions& opts = {});
/// c(p, f^n): lowest degree in the germ of f^n at p.
int c_order(const ProjMap& f, const ProjPoint& p, int n, const MultiplicityOptions& opts = {});

struct LocalDegree {
  int value = 0;
  /// Exact-target fiber multiplicity at p.
  int fiber_multiplicity = 0;
  /// Counts along the perturbation ladder.
  std::vector<int> ladder;
  bool stabilized = false;
};

/// e(p, f) by counting nearby preimages of perturbed targets.
LocalDegree e_step(const ProjMap& f, const ProjPoint& p);
/// e(p, f^n) as the product of single steps along the orbit.
int e_local(const ProjMap& f, const ProjPoint& p, int n);
/// e(p, f^n) counted directly on nested fibers of f^n (independent of e_local).
int e_local_direct(const ProjMap& f, const ProjPoint& p, int n);

struct MultiplicityReport {
  ProjPoint point;
  int degree = 0;
  int horizon = 0;
  // index n-1 holds the value for f^n
  std::vector<int> mu_series, mu_direct_series, e_series, c_series;
  // index j holds the single-step value at f^j p
  std::vector<int> mu_step, e_step, c_step;
  double mu_inf_est = 0, mu_inf_est_alt = 0, e_inf_est = 0, c_inf_est = 0;
  std::map<std::string, bool> verdicts;
};

MultiplicityReport asymptotics(const ProjMap& f, const ProjPoint& p, int horizon,
                               const MultiplicityOptions& opts = {});
std::map<std::string, bool> inequality_report(const MultiplicityReport& report, int d);

}  // namespace greenp2
