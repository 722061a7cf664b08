#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "greenp2/homog_poly.hpp"
#include "greenp2/proj_map.hpp"

namespace greenp2 {

struct GreenEval {
  double value = 0.0;
  int n_used = 0;
  /// M d^{-n} / (d - 1)
  double tail_bound = 0.0;
  double M = 0.0;
};

/// 1.5 times the largest |log|F(x)|| over deterministic unit-sphere samples.
double green_sup_bound(const ProjMap& f, int samples = 10000);

/// Evaluates G = lim d^{-n} log|F^n| on unit representatives, reusing the bound M.
class GreenEvaluator {
 public:
  explicit GreenEvaluator(const ProjMap& f);
  GreenEvaluator(const ProjMap& f, double sup_bound);
  GreenEval operator()(const ProjPoint& x, double tol) const;
  /// G_F(x) = log|x| + G(x) for any nonzero lift.
  double lift(const Vec3& x, double tol) const;
  double sup_bound() const { return m_; }
  const ProjMap& map() const { return f_; }

 private:
  ProjMap f_;
  double m_;
};

GreenEval green(const ProjMap& f, const ProjPoint& x, double tol);

/// (k d^n)^{-1} (log|phi(x_n)| + k a_n); OnCurve when phi(x_n) underflows.
double curve_potential(const ProjMap& f, const HomogPoly3& phi, int n, const ProjPoint& x);

struct EquidistRow {
  int n = 0;
  double l1_distance = 0.0;
  double stderr_ = 0.0;
  double clip_fraction = 0.0;
};

struct EquidistReport {
  HomogPoly3 curve;
  std::vector<EquidistRow> per_n;  // n = 0..n_max
  int samples = 0;
  std::uint64_t seed = 0;
  double clip_floor = 30.0;
  double green_tol = 1e-8;
  /// Distance at n_max is not below half the distance at n = 0.
  bool nonconvergence = false;
};

EquidistReport equidist_distance(const ProjMap& f, const HomogPoly3& phi, int n_max, int samples,
                                 std::uint64_t seed, int threads = 1);

/// Potential in chart coordinates.
using ChartPotential = std::function<double(Complex, Complex)>;

/// 2^{-4}, ..., 2^{-14}.
std::vector<double> default_radii();

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Weighted least squares of y against x; weights default to 1.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w = {});

struct LelongEstimate {
  Pair point;
  double value = 0.0;
  std::vector<double> r_grid;
  double fit_residual = 0.0;
};

LelongEstimate lelong_estimate(const ChartPotential& u, Pair p, const std::vector<double>& r_grid = default_radii(),
                               int angular = 64, std::uint64_t seed = 0x1E1);

struct KiselmanEstimate {
  Pair point;
  std::pair<double, double> weights;
  double slope = 0.0;
  std::vector<double> r_grid;
  double fit_residual = 0.0;
};

/// The grid holds s with r = s^{max weight}, so both polydisk radii stay below s.
KiselmanEstimate kiselman_estimate(const ChartPotential& u, Pair p, std::pair<double, double> weights,
                                   const std::vector<double>& r_grid = default_radii(), int angular = 64,
                                   std::uint64_t seed = 0x815E);

struct DecayTable {
  std::vector<double> alphas;  // ascending
  /// Sup over the sampled points of the Kiselman number with weights (alpha, 1).
  std::vector<double> values;
  /// Values do not increase as alpha decreases, up to 0.05.
  bool monotone = true;
};

DecayTable kiselman_decay_scan(const ChartPotential& u, const std::vector<Pair>& line_points,
                               std::vector<double> alpha_grid);

/// Polydisk {|z - c1| < radius, |w - c2| < radius}.
struct ChartBox {
  Pair center{0.0, 0.0};
  double radius = 1.0;
};

struct SublevelRow {
  double t = 0.0;
  double fraction = 0.0;
  double stderr_ = 0.0;
};

struct SublevelTable {
  std::vector<SublevelRow> rows;
  int samples = 0;
  std::uint64_t seed = 0;
  /// Exponential decay rate of the fraction in t, fitted over rows with enough hits.
  double decay_rate = 0.0;
  double fit_residual = 0.0;
};

SublevelTable sublevel_volume(const ChartPotential& u, const ChartBox& box, const std::vector<double>& t_grid,
                              int samples, std::uint64_t seed, int threads = 1);

/// Determinant of the derivative of f in a chart, image written in the same chart.
Complex chart_jacobian(const ProjMap& f, int chart, Pair uv);

/// Ball {|zeta - center| < radius} in a chart.
struct ChartBall {
  int chart = 2;
  Pair center{0.0, 0.0};
  double radius = 0.1;
};

struct VolumeDecay {
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  /// Fubini-Study volumes as fractions of the volume of P^2.
  double ball_volume = 0.0;
  double jacobian_bound = 0.0;
  double jacobian_stderr = 0.0;
  /// log of jacobian_bound, computed without underflow.
  double log_jacobian_bound = 0.0;
  double occupancy = 0.0;
  double occupancy_stderr = 0.0;
};

VolumeDecay volume_decay(const ProjMap& f, const ChartBall& ball, int n, int samples, std::uint64_t seed,
                         int threads = 1);

/// Slope of log(-log V_n) against n over the entries with V_n < 1.
double inner_decay_rate(const std::vector<double>& log_volumes);

}  // namespace greenp2
