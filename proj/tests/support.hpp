#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "greenp2/homog_poly.hpp"
#include "greenp2/proj_map.hpp"
#include "greenp2/sampling.hpp"
#include "greenp2/univariate.hpp"

namespace greenp2::testing {

inline HomogPoly3 mono(int i, int j, int k, Complex c = 1.0) { return HomogPoly3::monomial(i, j, k, c); }

inline ProjMap power_map(int d) { return ProjMap::validate({mono(d, 0, 0), mono(0, d, 0), mono(0, 0, d)}); }

/// [2zt + w^2 : z^2 : t^2]
inline ProjMap example_map() {
  return ProjMap::validate({mono(1, 0, 1, 2.0) + mono(0, 2, 0), mono(2, 0, 0), mono(0, 0, 2)});
}

inline HomogPoly3 random_form(int d, Rng& rng) {
  std::vector<Complex> c(HomogPoly3::size_for(d));
  for (auto& x : c) x = rng.complex_normal();
  return HomogPoly3(d, c);
}

inline ProjMap random_map(int d, Rng& rng) {
  return ProjMap::validate({random_form(d, rng), random_form(d, rng), random_form(d, rng)});
}

/// Points of {Jf = 0} on random projective lines, from the roots of the
/// restricted Jacobian interpolated on the unit circle.
inline std::vector<ProjPoint> critical_samples(const ProjMap& f, int count, Rng& rng) {
  std::vector<ProjPoint> out;
  const HomogPoly3& jac = f.lift_jacobian();
  while (static_cast<int>(out.size()) < count) {
    const Vec3 a = rng.fs_point(), b = rng.fs_point();
    const int deg = jac.degree();
    // Interpolate s -> J(a + s b) at deg + 1 nodes on the unit circle.
    std::vector<Complex> vals(static_cast<std::size_t>(deg + 1)), coeffs(static_cast<std::size_t>(deg + 1));
    const double pi = std::acos(-1.0);
    for (int k = 0; k <= deg; ++k) {
      const Complex s = std::polar(1.0, 2.0 * pi * k / (deg + 1));
      vals[k] = jac({a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]});
    }
    for (int j = 0; j <= deg; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k <= deg; ++k) acc += vals[k] * std::polar(1.0, -2.0 * pi * j * k / (deg + 1));
      coeffs[j] = acc / static_cast<double>(deg + 1);
    }
    const RootSet rs = roots_univariate(UnivariatePoly(coeffs));
    for (const Root& r : rs.roots) {
      if (static_cast<int>(out.size()) >= count) break;
      const Complex s = r.value;
      out.push_back(ProjPoint::from({a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}));
    }
  }
  return out;
}

/// True when every point of the orbit p, ..., f^steps p is either on the
/// critical set or clearly away from it, relative to the typical size of Jf.
inline bool orbit_well_separated(const ProjMap& f, const ProjPoint& p, int steps) {
  const HomogPoly3& jac = f.lift_jacobian();
  Rng rng(0x5CA1E);
  double scale = 0.0;
  for (int i = 0; i < 200; ++i) scale = std::max(scale, std::abs(jac(rng.fs_point())));
  ProjPoint x = p;
  for (int j = 0; j <= steps; ++j) {
    const double rel = std::abs(jac(x.coords())) / scale;
    if (rel > 1e-12 && rel < 1e-4) return false;
    x = apply(f, x);
  }
  return true;
}

}  // namespace greenp2::testing
