#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "greenp2/homog_poly.hpp"
#include "greenp2/proj_map.hpp"
#include "greenp2/univariate.hpp"

namespace greenp2 {

/// Line {l = 0} with l o F = lambda l^d.
struct InvariantLine {
  HomogPoly3 form;  // degree 1, unit coefficient 2-norm, canonical phase
  Complex lambda;
  /// Distance between l o F and lambda l^d, with F scaled to unit coefficient norm.
  double residual = 0.0;
};

struct LineSearchOptions {
  int starts = 200;  // per normalization chart
  double line_tol = 1e-7;
  int max_lines = 3;
  int max_iter = 100;
  std::uint64_t seed = 0x11AE5EEDULL;
};

std::vector<InvariantLine> invariant_lines(const ProjMap& f, const LineSearchOptions& opts = {});

/// Restriction of f to an invariant line, parametrized by s a + r b.
struct LineRestriction {
  Vec3 a, b;
  /// Coefficients of s^{d-k} r^k of <a, F(s a + r b)> and <b, F(s a + r b)>.
  std::vector<Complex> first, second;
  Vec3 point(Complex s, Complex r) const;
};

LineRestriction restrict_to_line(const ProjMap& f, const HomogPoly3& line, std::uint64_t seed = 1);

/// Periodic orbits (period <= max_period) of the restriction whose points are
/// all fully ramified, i.e. totally invariant orbits of the restriction.
std::vector<std::vector<ProjPoint>> line_invariant_orbits(const ProjMap& f, const HomogPoly3& line,
                                                          int max_period = 3);

/// Univariate polynomial s -> h(base + s dir).
UnivariatePoly restrict_poly(const HomogPoly3& h, const Vec3& base, const Vec3& dir);

struct PointSearchOptions {
  int max_period = 3;
  std::uint64_t seed = 0x9017;
};

struct PointSearch {
  /// Totally invariant periodic orbits, each listed from its first point.
  std::vector<std::vector<ProjPoint>> orbits;
  /// False when one of the candidate searches failed.
  bool complete = true;
  std::vector<std::string> notes;
};

/// Candidates: critical fixed points, points where the lift derivative has
/// rank one, and totally invariant orbits of the restrictions to `lines`.
/// Accepted when every fiber along the orbit collapses to one point.
PointSearch invariant_orbits(const ProjMap& f, const std::vector<InvariantLine>& lines,
                             const PointSearchOptions& opts = {});

std::vector<ProjPoint> invariant_points(const ProjMap& f, const PointSearchOptions& opts = {});

/// f^{-1}(f(p)) = {p} with multiplicity d^2.
bool fiber_collapses(const ProjMap& f, const ProjPoint& p);

struct TransitionMatrix {
  std::vector<HomogPoly3> components;
  std::vector<std::vector<int>> t;
  /// Fitted slopes behind t.
  std::vector<std::vector<double>> slopes;
  double rho = 0.0;
  std::vector<double> perron;
};

/// Components must be pairwise non-proportional factors of the Jacobian of
/// the lift; when omitted, linear factors are detected.
TransitionMatrix transition_matrix(const ProjMap& f,
                                   const std::optional<std::vector<HomogPoly3>>& components = std::nullopt,
                                   std::uint64_t seed = 0x7A11);

/// Lines l with Jf vanishing identically on {l = 0}.
std::vector<HomogPoly3> critical_lines(const ProjMap& f, std::uint64_t seed = 0x7A11);

enum class E2Kind { OnE1, Homogeneous, Undetermined };
std::string to_string(E2Kind kind);

struct E2Point {
  ProjPoint point;
  E2Kind kind = E2Kind::OnE1;
  int period = 1;
};

struct ExceptionalSets {
  std::vector<InvariantLine> e1_lines;
  std::vector<E2Point> e2_points;
  bool assumption_flag = false;
  /// Lines accepted by the equation but failing the Jacobian order check.
  std::vector<InvariantLine> rejected_lines;
  /// All totally invariant orbits found, including those outside E2.
  std::vector<std::vector<ProjPoint>> invariant_orbits;
  std::vector<std::string> notes;
};

ExceptionalSets exceptional_sets(const ProjMap& f, int horizon = 2);

struct Configuration {
  int lines = 0;
  int points = 0;
  std::string row;    // "1-0", ..., "3-3", "generic" or "unlisted"
  std::string label;  // normal form of the row
  bool listed = true;
  /// incidence[i] lists the lines containing E2 point i.
  std::vector<std::vector<int>> incidence;
};

Configuration classify(const ExceptionalSets& sets);

/// Row identifiers in table order, followed by "generic".
const std::vector<std::string>& table1_rows();
std::string table1_label(const std::string& row);

struct ConjugacyReport {
  int period = 1;
  bool homogeneous = false;
  /// Relative deviation from the normal form with T factors, T = 0..terms.
  std::vector<double> deviations;
  double deviation = 0.0;
  /// c(p, f^{period n}) for n = 1, 2, ... while the truncation allows.
  std::vector<int> c_series;
  double alpha = 0.0;
};

ConjugacyReport conjugacy_check(const ProjMap& f, const ProjPoint& p, int terms, std::uint64_t seed = 0xC0417);

ProjMap gen_table1(const std::string& row, int d, std::uint64_t seed);

/// Quotient of R x R by the swap for R(z) = 1 - 2/z^2 iterated; d a power of 2.
ProjMap gen_lattes_ueda(int d);

/// The degree-d rational map used by gen_lattes_ueda as a binary pair (A, B),
/// coefficients of x^{d-k} y^k.
std::pair<std::vector<Complex>, std::vector<Complex>> lattes_base(int d);

}  // namespace greenp2
