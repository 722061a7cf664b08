#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "greenp2/homog_poly.hpp"
#include "greenp2/linalg.hpp"
#include "greenp2/types.hpp"

namespace greenp2 {

/// Unit representative of a point of P^2; the first coordinate that is not
/// negligible is real and positive.
class ProjPoint {
 public:
  ProjPoint() : coords_{0.0, 0.0, 1.0} {}
  static ProjPoint from(const Vec3& x);
  static ProjPoint from_chart(int chart, Pair uv);

  const Vec3& coords() const { return coords_; }
  Complex operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  /// Index of the largest coordinate.
  int best_chart() const;
  /// Affine coordinates in a chart; ChartUndefined on its hyperplane at infinity.
  Pair chart_coords(int chart) const;

 private:
  explicit ProjPoint(const Vec3& x) : coords_(x) {}
  Vec3 coords_;
};

/// Chordal Fubini-Study distance sqrt(1 - |<x,y>|^2).
double fs_distance(const ProjPoint& a, const ProjPoint& b);

struct WeightedPoint {
  ProjPoint point;
  int multiplicity = 1;
};

struct LogOrbit {
  std::vector<ProjPoint> points;
  /// a_0 = 0, a_{n+1} = d a_n + log|F(x_n)|
  std::vector<double> lognorms;
};

class ProjMap {
 public:
  /// Checks degrees and the absence of common zeros.
  static ProjMap validate(std::array<HomogPoly3, 3> components);

  int degree() const { return degree_; }
  const std::array<HomogPoly3, 3>& components() const { return f_; }
  const HomogPoly3& operator[](int i) const { return f_[static_cast<std::size_t>(i)]; }
  double nondegeneracy_residual() const { return residual_; }
  double coeff_norm() const;

  Vec3 lift(const Vec3& x) const { return {f_[0](x), f_[1](x), f_[2](x)}; }
  ProjPoint apply(const ProjPoint& x) const;
  /// Determinant of the 3x3 derivative of the lift, degree 3(d-1).
  const HomogPoly3& lift_jacobian() const { return jac_; }

  /// Components of y -> U^* F(U y).
  std::array<HomogPoly3, 3> conjugated(const Mat3& u) const;

 private:
  ProjMap(std::array<HomogPoly3, 3> f, double residual);
  friend ProjMap compose(const ProjMap& f, const ProjMap& g);

  int degree_;
  std::array<HomogPoly3, 3> f_;
  HomogPoly3 jac_;
  double residual_;
};

/// f after g; degrees multiply.
ProjMap compose(const ProjMap& f, const ProjMap& g);
ProjMap iterate(const ProjMap& f, int n);

ProjPoint apply(const ProjMap& f, const ProjPoint& x);
LogOrbit iterate_lognorm(const ProjMap& f, const ProjPoint& x0, int n);

/// min |F(x)| over 10^4 deterministic unit-sphere samples.
double sphere_min_norm(const std::array<HomogPoly3, 3>& f, int samples = 10000);

struct PointSet {
  std::vector<WeightedPoint> points;
  int total_multiplicity = 0;
  int expected = 0;
  bool complete() const { return total_multiplicity == expected; }
};

struct Fiber {
  ProjPoint target;
  std::vector<WeightedPoint> preimages;
  int total_multiplicity = 0;
  int expected = 0;
  bool complete() const { return total_multiplicity == expected; }
};

/// Common zeros of two homogeneous polynomials in a random unitary frame,
/// retried until the multiplicities reach `expected`.
PointSet solve_projective(const HomogPoly3& g1, const HomogPoly3& g2, int expected,
                          std::uint64_t seed = 1, int attempts = 8);

PointSet fixed_points(const ProjMap& f);
Fiber preimages(const ProjMap& f, const ProjPoint& q);

}  // namespace greenp2
