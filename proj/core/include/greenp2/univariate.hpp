#pragma once

#include <span>
#include <vector>

#include "greenp2/types.hpp"

namespace greenp2 {

/// Polynomial in one variable, coefficients from the constant term upward.
/// Trailing coefficients below rel_tol * coeff_norm are stripped.
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<Complex> coeffs, double rel_tol = kCoefEps);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  double coeff_norm() const { return norm_; }
  bool is_zero() const { return coeffs_.empty(); }

  Complex operator()(Complex x) const;
  UnivariatePoly derivative() const;
  /// Taylor coefficients q^{(j)}(c)/j!, j = 0..degree.
  std::vector<Complex> taylor_at(Complex c) const;

 private:
  std::vector<Complex> coeffs_;
  double norm_ = 0.0;
};

struct RootOptions {
  double cluster_radius = kClusterRadius;
  int max_iter = 200;
  double res_tol = 1e-8;
  /// Relative size below which the first m Taylor coefficients at a cluster
  /// centroid count as vanishing, so the cluster is an m-fold root.
  double merge_tol = 1e-7;
};

struct Root {
  Complex value;
  int multiplicity = 1;
  /// |q(root)| / (coeff_norm * max(1,|root|)^deg)
  double residual = 0.0;
};

struct RootSet {
  std::vector<Root> roots;
  bool converged = true;
  int iterations = 0;
  int total_multiplicity() const;
};

/// Aberth-Ehrlich iteration followed by cluster merging.
RootSet roots_univariate(const UnivariatePoly& q, const RootOptions& opts = {});

/// Groups nearby values into clusters whose centroid is an m-fold root of q.
std::vector<Root> cluster_roots(const UnivariatePoly& q, const std::vector<Complex>& values,
                                const RootOptions& opts);

}  // namespace greenp2
