#include "linfty/linalg.hpp"

#include "linfty/error.hpp"

namespace linfty {

RowEchelon rref(RatMatrix m) {
  RowEchelon out;
  size_t row = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t p = row;
    while (p < m.rows() && m(p, col).is_zero())
      ++p;
    if (p == m.rows())
      continue;
    if (p != row)
      for (size_t j = 0; j < m.cols(); ++j)
        std::swap(m(p, j), m(row, j));
    Rat inv = Rat(1) / m(row, col);
    for (size_t j = col; j < m.cols(); ++j)
      m(row, j) *= inv;
    for (size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col).is_zero())
        continue;
      Rat f = m(r, col);
      for (size_t j = col; j < m.cols(); ++j)
        if (!m(row, j).is_zero())
          m(r, j) -= f * m(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

size_t rank(const RatMatrix& m) { return rref(m).pivots.size(); }

std::vector<size_t> pivot_columns(const RatMatrix& m) { return rref(m).pivots; }

RatMatrix kernel_matrix(const RatMatrix& m) {
  auto [r, pivots] = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (size_t p : pivots)
    is_pivot[p] = true;
  RatMatrix k(m.cols(), m.cols() - pivots.size());
  size_t c = 0;
  for (size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free])
      continue;
    k(free, c) = Rat(1);
    for (size_t i = 0; i < pivots.size(); ++i)
      k(pivots[i], c) = -r(i, free);
    ++c;
  }
  return k;
}

std::optional<std::vector<Rat>> solve(const RatMatrix& a, const std::vector<Rat>& b) {
  RatMatrix aug(a.rows(), a.cols() + 1);
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < a.cols(); ++j)
      aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto [r, pivots] = rref(std::move(aug));
  if (!pivots.empty() && pivots.back() == a.cols())
    return std::nullopt;
  std::vector<Rat> x(a.cols());
  for (size_t i = 0; i < pivots.size(); ++i)
    x[pivots[i]] = r(i, a.cols());
  return x;
}

RatMatrix inverse(const RatMatrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::NotInvertible, "non-square matrix");
  size_t n = m.rows();
  RatMatrix aug(n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j)
      aug(i, j) = m(i, j);
    aug(i, n + i) = Rat(1);
  }
  auto [r, pivots] = rref(std::move(aug));
  if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1))
    throw Error(ErrorCode::NotInvertible, "matrix has rank below " + std::to_string(n));
  RatMatrix inv(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      inv(i, j) = r(i, n + j);
  return inv;
}

RatMatrix right_inverse(const RatMatrix& m) {
  size_t k = m.rows(), n = m.cols();
  RatMatrix aug(k, n + k);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < n; ++j)
      aug(i, j) = m(i, j);
    aug(i, n + i) = Rat(1);
  }
  auto [r, pivots] = rref(std::move(aug));
  size_t rk = 0;
  while (rk < pivots.size() && pivots[rk] < n)
    ++rk;
  if (rk < k)
    throw Error(ErrorCode::NotSurjective, "rank deficit " + std::to_string(k - rk));
  RatMatrix chi(n, k);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      chi(pivots[i], j) = r(i, n + j);
  return chi;
}

RatMatrix left_inverse(const RatMatrix& m) {
  size_t n = m.rows(), k = m.cols();
  auto rows = pivot_columns(m.transpose());
  if (rows.size() < k)
    throw Error(ErrorCode::NotInjective, "rank deficit " + std::to_string(k - rows.size()));
  RatMatrix sub(k, k);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      sub(i, j) = m(rows[i], j);
  RatMatrix sub_inv = inverse(sub);
  RatMatrix theta(k, n);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j)
      theta(i, rows[j]) = sub_inv(i, j);
  return theta;
}

std::optional<RatMatrix> to_rat(const PolyMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) {
      auto c = m(i, j).as_constant();
      if (!c)
        return std::nullopt;
      r(i, j) = *c;
    }
  return r;
}

RatMatrix evaluate(const PolyMatrix& m, std::span<const Rat> point) {
  RatMatrix r(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j)
      r(i, j) = m(i, j).eval(point);
  return r;
}

PolyMatrix to_poly(const RatMatrix& m) {
  PolyMatrix r(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j)
      r(i, j) = Poly(m(i, j));
  return r;
}

PolyMatrix jacobian(std::span<const Poly> u, size_t nvars) {
  PolyMatrix j(u.size(), nvars);
  for (size_t r = 0; r < u.size(); ++r)
    for (size_t c = 0; c < nvars; ++c)
      j(r, c) = u[r].diff(c);
  return j;
}

RatMatrix jacobian(std::span<const Poly> u, std::span<const Rat> point) {
  for (const auto& p : u)
    if (p.num_vars_used() > point.size())
      throw Error(ErrorCode::UnknownVariable, "jacobian point has too few coordinates");
  return evaluate(jacobian(u, point.size()), point);
}

} // namespace linfty
