#include <map>

#include "greenp2/error.hpp"
#include "greenp2/invariants.hpp"
#include "greenp2/sampling.hpp"

namespace greenp2 {

namespace {

/// Random form of the given degree in the variables allowed by `mask` (bit i for variable i).
HomogPoly3 random_form(int degree, unsigned mask, Rng& rng) {
  HomogPoly3 p(degree);
  if (degree < 0) return p;
  for (int i = degree; i >= 0; --i)
    for (int j = degree - i; j >= 0; --j) {
      const int k = degree - i - j;
      if ((i > 0 && !(mask & 1u)) || (j > 0 && !(mask & 2u)) || (k > 0 && !(mask & 4u))) continue;
      p.set_coeff(i, j, k, rng.unit_disk());
    }
  return p;
}

HomogPoly3 power(int var, int d) {
  return HomogPoly3::monomial(var == 0 ? d : 0, var == 1 ? d : 0, var == 2 ? d : 0);
}

std::array<HomogPoly3, 3> table1_form(const std::string& row, int d, Rng& rng) {
  const HomogPoly3 z = HomogPoly3::variable(0), w = HomogPoly3::variable(1), t = HomogPoly3::variable(2);
  constexpr unsigned all = 7u, zw = 3u, zt = 5u;
  if (row == "generic") return {random_form(d, all, rng), random_form(d, all, rng), random_form(d, all, rng)};
  if (row == "1-0") return {random_form(d, all, rng), random_form(d, all, rng), power(2, d)};
  if (row == "0-1") return {random_form(d, zt, rng), random_form(d, all, rng), random_form(d, zt, rng)};
  if (row == "1-1a") return {random_form(d, all, rng), power(1, d) + t * random_form(d - 1, all, rng), power(2, d)};
  if (row == "1-1b") return {random_form(d, zw, rng), random_form(d, zw, rng), power(2, d)};
  if (row == "1-2") return {random_form(d, zt, rng), power(1, d) + t * random_form(d - 1, all, rng), power(2, d)};
  if (row == "2-1") return {random_form(d, all, rng), power(1, d), power(2, d)};
  if (row == "2-2") return {power(0, d) + t * random_form(d - 1, all, rng), power(1, d), power(2, d)};
  if (row == "2-3") {
    const HomogPoly3 p = d == 2 ? HomogPoly3::constant(rng.unit_disk()) : random_form(d - 2, all, rng);
    return {power(0, d) + w * t * p, power(1, d), power(2, d)};
  }
  if (row == "3-3") return {power(0, d), power(1, d), power(2, d)};
  throw Error(ErrorCode::InvalidArgument, "unknown table row '" + row + "'");
}

/// Determinant of a matrix of polynomial entries whose rows have fixed degrees,
/// by Laplace expansion along rows with memoization on the used columns.
class PolyDeterminant {
 public:
  PolyDeterminant(std::vector<std::vector<HomogPoly3>> m, std::vector<std::vector<bool>> nonzero)
      : m_(std::move(m)), nz_(std::move(nonzero)), n_(static_cast<int>(m_.size())) {}

  HomogPoly3 value() { return expand(0, 0u); }

 private:
  int remaining_degree(int row) const {
    int deg = 0;
    for (int r = row; r < n_; ++r)
      for (int c = 0; c < n_; ++c)
        if (nz_[r][c]) {
          deg += m_[r][c].degree();
          break;
        }
    return deg;
  }

  HomogPoly3 expand(int row, unsigned used) {
    if (row == n_) return HomogPoly3::constant(1.0);
    if (auto it = memo_.find(used); it != memo_.end()) return it->second;
    HomogPoly3 acc(remaining_degree(row));
    int position = 0;
    for (int c = 0; c < n_; ++c) {
      if (used & (1u << c)) continue;
      if (nz_[row][c]) {
        HomogPoly3 term = m_[row][c] * expand(row + 1, used | (1u << c));
        if (position % 2 == 1) term *= -1.0;
        acc += term;
      }
      ++position;
    }
    memo_.emplace(used, acc);
    return acc;
  }

  std::vector<std::vector<HomogPoly3>> m_;
  std::vector<std::vector<bool>> nz_;
  int n_;
  std::map<unsigned, HomogPoly3> memo_;
};

/// Res(zX^2 + wXY + tY^2, L) as a form of degree deg L in (z, w, t).
HomogPoly3 quadratic_resultant(const std::vector<Complex>& l) {
  const int d = static_cast<int>(l.size()) - 1;
  const int n = d + 2;
  std::vector<std::vector<HomogPoly3>> m(static_cast<std::size_t>(n), std::vector<HomogPoly3>(static_cast<std::size_t>(n)));
  std::vector<std::vector<bool>> nz(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int r = 0; r < d; ++r)
    for (int v = 0; v < 3; ++v) {
      m[r][r + v] = HomogPoly3::variable(v);
      nz[r][r + v] = true;
    }
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k <= d; ++k) {
      m[d + r][r + k] = HomogPoly3::constant(l[k]);
      nz[d + r][r + k] = l[k] != 0.0;
    }
  return PolyDeterminant(std::move(m), std::move(nz)).value();
}

}  // namespace

ProjMap gen_table1(const std::string& row, int d, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "degree must be at least 2");
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(seed, static_cast<std::uint64_t>(attempt));
    try {
      return ProjMap::validate(table1_form(row, d, rng));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateMap) throw;
    }
  }
  throw Error(ErrorCode::GenerationFailed, "no valid map for row " + row + " after 100 attempts");
}

std::pair<std::vector<Complex>, std::vector<Complex>> lattes_base(int d) {
  int k = 0;
  while ((1 << k) < d) ++k;
  if (d < 2 || (1 << k) != d) throw Error(ErrorCode::InvalidArgument, "degree must be a power of 2");
  // R[x:y] = [x^2 - 2y^2 : x^2]
  std::vector<Complex> a{1.0, 0.0}, b{0.0, 1.0};
  auto mul = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    std::vector<Complex> r(p.size() + q.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
  };
  for (int s = 0; s < k; ++s) {
    const auto aa = mul(a, a), bb = mul(b, b);
    std::vector<Complex> na(aa.size());
    for (std::size_t i = 0; i < aa.size(); ++i) na[i] = aa[i] - 2.0 * bb[i];
    a = na;
    b = aa;
  }
  return {a, b};
}

ProjMap gen_lattes_ueda(int d) {
  const auto [a, b] = lattes_base(d);
  std::vector<Complex> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];
  const HomogPoly3 ra = quadratic_resultant(a), rb = quadratic_resultant(b), rs = quadratic_resultant(sum);
  std::array<HomogPoly3, 3> f{rb, -(rs - ra - rb), ra};
  for (const auto& p : f)
    if (p.degree() != d || p.is_zero(1e-12, 1.0))
      throw Error(ErrorCode::ConstructionDegenerate, "resultant dropped degree");
  try {
    return ProjMap::validate(f);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConstructionDegenerate, e.what());
  }
}

}  // namespace greenp2
