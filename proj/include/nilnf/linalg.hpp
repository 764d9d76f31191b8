#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "nilnf/parallel.hpp"
#include "nilnf/scalar.hpp"

namespace nilnf {

template <FieldScalar S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::from_int(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  S& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<S> column(std::size_t j) const {
    std::vector<S> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_column(std::size_t j, const std::vector<S>& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }
  std::vector<S> row(std::size_t i) const { return {a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_}; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const S& x) { return ScalarTraits<S>::is_zero(x); });
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& x = a(i, k);
        if (ScalarTraits<S>::is_zero(x)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!ScalarTraits<S>::is_zero(b(k, j))) c(i, j) += x * b(k, j);
      }
    return c;
  }
  friend std::vector<S> operator*(const Matrix& a, const std::vector<S>& v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("Matrix-vector product: shape mismatch");
    std::vector<S> r(a.rows_);
    for (std::size_t j = 0; j < a.cols_; ++j) {
      if (ScalarTraits<S>::is_zero(v[j])) continue;
      for (std::size_t i = 0; i < a.rows_; ++i)
        if (!ScalarTraits<S>::is_zero(a(i, j))) r[i] += a(i, j) * v[j];
    }
    return r;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  template <FieldScalar T, class F>
  Matrix<T> map(F&& f) const {
    Matrix<T> m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = f((*this)(i, j));
    return m;
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

template <FieldScalar S>
bool vector_is_zero(const std::vector<S>& v) {
  return std::all_of(v.begin(), v.end(), [](const S& x) { return ScalarTraits<S>::is_zero(x); });
}

// Exact zero test, or max|v_i| <= tolerance * max(1, scale) for doubles.
template <FieldScalar S>
bool negligible(const std::vector<S>& v, double scale) {
  if constexpr (ScalarTraits<S>::exact) {
    return vector_is_zero(v);
  } else {
    double m = 0;
    for (const auto& x : v) m = std::max(m, std::fabs(ScalarTraits<S>::to_double(x)));
    return m <= float_tolerance() * std::max(1.0, scale);
  }
}

template <FieldScalar S>
double max_magnitude(const std::vector<S>& v) {
  double m = 0;
  for (const auto& x : v) m = std::max(m, std::fabs(ScalarTraits<S>::to_double(x)));
  return m;
}

template <FieldScalar S>
std::vector<S> axpy(const std::vector<S>& x, const S& a, const std::vector<S>& y) {
  std::vector<S> r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
  return r;
}

namespace detail {

template <FieldScalar S>
double magnitude(const S& x) {
  return std::fabs(ScalarTraits<S>::to_double(x));
}

// Eliminate column `col` from every row other than `pivot_row`.
template <FieldScalar S>
void eliminate_column(Matrix<S>& m, std::size_t pivot_row, std::size_t col, std::size_t first_col, Exec exec) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  auto update = [&](std::size_t i) {
    if (i == pivot_row) return;
    S f = m(i, col);
    if (ScalarTraits<S>::is_zero(f)) return;
    for (std::size_t j = first_col; j < cols; ++j) {
      const S& p = m(pivot_row, j);
      if (!ScalarTraits<S>::is_zero(p)) m(i, j) -= f * p;
    }
    m(i, col) = S{};
  };
  parallel_for(static_cast<long>(rows), exec, [&](long i) { update(static_cast<std::size_t>(i)); }, 9);
}

}  // namespace detail

// In-place reduced row echelon form; returns the pivot columns. Exact
// scalars pivot on the first nonzero entry; doubles use partial pivoting
// with entries below tolerance * max|entry| treated as zero.
template <FieldScalar S>
std::vector<std::size_t> rref(Matrix<S>& m, Exec exec = default_exec()) {
  std::vector<std::size_t> pivots;
  double threshold = 0;
  if constexpr (!ScalarTraits<S>::exact) {
    double scale = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) scale = std::max(scale, detail::magnitude(m(i, j)));
    threshold = float_tolerance() * std::max(1.0, scale);
  }
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = m.rows();
    if constexpr (ScalarTraits<S>::exact) {
      for (std::size_t i = r; i < m.rows(); ++i)
        if (!ScalarTraits<S>::is_zero(m(i, c))) {
          piv = i;
          break;
        }
    } else {
      double best = threshold;
      for (std::size_t i = r; i < m.rows(); ++i) {
        double v = detail::magnitude(m(i, c));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
    }
    if (piv == m.rows()) {
      if constexpr (!ScalarTraits<S>::exact)
        for (std::size_t i = r; i < m.rows(); ++i) m(i, c) = S{};
      continue;
    }
    if (piv != r)
      for (std::size_t j = c; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    S inv = ScalarTraits<S>::inverse(m(r, c));
    for (std::size_t j = c; j < m.cols(); ++j)
      if (!ScalarTraits<S>::is_zero(m(r, j))) m(r, j) *= inv;
    m(r, c) = ScalarTraits<S>::from_int(1);
    detail::eliminate_column(m, r, c, c, exec);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <FieldScalar S>
std::size_t rank(Matrix<S> m, Exec exec = default_exec()) {
  return rref(m, exec).size();
}

// Basis of the null space, one vector per free column (free entry = 1).
template <FieldScalar S>
std::vector<std::vector<S>> kernel(Matrix<S> m, Exec exec = default_exec()) {
  auto piv = rref(m, exec);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<std::vector<S>> out;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<S> v(m.cols());
    v[f] = ScalarTraits<S>::from_int(1);
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(r, f);
    out.push_back(std::move(v));
  }
  return out;
}

// A particular solution of A x = b with free variables zero, or nullopt when
// the system is inconsistent.
template <FieldScalar S>
std::optional<std::vector<S>> solve(const Matrix<S>& a, const std::vector<S>& b, Exec exec = default_exec()) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve: shape mismatch");
  Matrix<S> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto piv = rref(aug, exec);
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  std::vector<S> x(a.cols());
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, a.cols());
  return x;
}

// Smallest K >= 1 with M^K = 0, or nullopt if M^(dim+1) != 0.
template <FieldScalar S>
std::optional<std::size_t> nilpotency_index(const Matrix<S>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("nilpotency_index: square matrix required");
  if (m.rows() == 0) return 1;
  Matrix<S> p = m;
  for (std::size_t k = 1; k <= m.rows() + 1; ++k) {
    if (p.is_zero()) return k;
    p = p * m;
  }
  return std::nullopt;
}

}  // namespace nilnf
