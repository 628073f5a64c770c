#pragma once

#include <cassert>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "linfty/poly.hpp"
#include "linfty/rational.hpp"

namespace linfty {

/// Dense row-major matrix over an exact ring (Rat or Poly).
template <class S>
class Matrix {
public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  /// Row-wise literal; all rows must have the same length.
  Matrix(std::initializer_list<std::initializer_list<S>> rows) : rows_(rows.size()) {
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      assert(r.size() == cols_);
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i)
      m(i, i) = S(Rat(1));
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  S& operator()(size_t i, size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const S& operator()(size_t i, size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero())
        return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j)
        t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix r(a.rows_, b.cols_);
    for (size_t i = 0; i < a.rows_; ++i)
      for (size_t k = 0; k < a.cols_; ++k) {
        const S& x = a(i, k);
        if (x.is_zero())
          continue;
        for (size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero())
            r(i, j) += x * b(k, j);
      }
    return r;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    for (size_t i = 0; i < a.data_.size(); ++i)
      a.data_[i] += b.data_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    assert(a.rows_ == b.rows_ && a.cols_ == b.cols_);
    for (size_t i = 0; i < a.data_.size(); ++i)
      a.data_[i] -= b.data_[i];
    return a;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<S> data_;
};

using RatMatrix = Matrix<Rat>;
using PolyMatrix = Matrix<Poly>;

struct RowEchelon {
  RatMatrix reduced;
  std::vector<size_t> pivots; // pivot column of each nonzero row, increasing
};

/// Reduced row echelon form; pivots are taken leftmost-first, which fixes
/// every downstream choice of basis, section and complement.
RowEchelon rref(RatMatrix m);
size_t rank(const RatMatrix& m);
/// Columns form a basis of the kernel: one vector per free column, with a 1
/// in that column and zeros in the other free columns.
RatMatrix kernel_matrix(const RatMatrix& m);
/// Columns are a basis of the column space taken from the pivot columns.
std::vector<size_t> pivot_columns(const RatMatrix& m);
std::optional<std::vector<Rat>> solve(const RatMatrix& a, const std::vector<Rat>& b);
RatMatrix inverse(const RatMatrix& m);
/// chi with m * chi = 1; free variables set to zero.
RatMatrix right_inverse(const RatMatrix& m);
/// theta with theta * m = 1; uses the topmost independent rows of m.
RatMatrix left_inverse(const RatMatrix& m);

std::optional<RatMatrix> to_rat(const PolyMatrix& m);
RatMatrix evaluate(const PolyMatrix& m, std::span<const Rat> point);
PolyMatrix to_poly(const RatMatrix& m);

/// Rows are components of u, columns are coordinates 0..nvars-1.
PolyMatrix jacobian(std::span<const Poly> u, size_t nvars);
RatMatrix jacobian(std::span<const Poly> u, std::span<const Rat> point);

} // namespace linfty
