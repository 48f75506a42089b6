#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gda/blas.hpp"
#include "gda/common.hpp"
#include "gda/rng.hpp"

namespace gda {

// Row-major dense matrix of 64-bit reals.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  DenseMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Compressed-row sparse matrix. Column indices are strictly increasing within
// each row and no explicit zeros are stored. `symmetric` is a structural tag
// set by builders that guarantee it.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<std::tuple<std::size_t, std::size_t, double>> triplets,
                                    bool symmetric = false) {
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                return std::tie(std::get<0>(a), std::get<1>(a)) <
                       std::tie(std::get<0>(b), std::get<1>(b));
              });
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.symmetric_ = symmetric;
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t prev_i = static_cast<std::size_t>(-1), prev_j = 0;
    for (const auto& [i, j, v] : triplets) {
      if (i >= rows || j >= cols) throw ShapeError("SparseMatrix: index out of range");
      if (i == prev_i && j == prev_j)
        throw ContractError("SparseMatrix: duplicate entry");
      if (v == 0.0) continue;
      m.col_idx_.push_back(j);
      m.values_.push_back(v);
      m.row_ptr_[i + 1]++;
      prev_i = i;
      prev_j = j;
    }
    for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
  }

  // Binary symmetric hollow adjacency from undirected edges.
  static SparseMatrix from_edges(std::size_t n,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> t;
    t.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u == v) continue;
      t.emplace_back(u, v, 1.0);
      t.emplace_back(v, u, 1.0);
    }
    return from_triplets(n, n, std::move(t), /*symmetric=*/true);
  }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m;
    m.rows_ = m.cols_ = n;
    m.symmetric_ = true;
    m.row_ptr_.resize(n + 1);
    m.col_idx_.resize(n);
    m.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      m.row_ptr_[i] = i;
      m.col_idx_[i] = i;
    }
    m.row_ptr_[n] = n;
    return m;
  }

  static SparseMatrix from_dense(const DenseMatrix& d, bool symmetric = false) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> t;
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j)
        if (d(i, j) != 0.0) t.emplace_back(i, j, d(i, j));
    return from_triplets(d.rows(), d.cols(), std::move(t), symmetric);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      auto cols = row_cols(i);
      auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
    }
    return d;
  }

  SparseMatrix transposed() const {
    std::vector<std::tuple<std::size_t, std::size_t, double>> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < rows_; ++i) {
      auto cols = row_cols(i);
      auto vals = row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) t.emplace_back(cols[k], i, vals[k]);
    }
    return from_triplets(cols_, rows_, std::move(t), symmetric_);
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ &&
           a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

inline bool is_finite(const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (!std::isfinite(m.data()[i])) return false;
  return true;
}

inline void require_finite(const DenseMatrix& m, const char* what) {
  if (!is_finite(m)) throw NumericError(std::string(what) + ": non-finite entries");
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + ")");
  DenseMatrix c(a.rows(), b.cols());
  if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return c;
  blas::api().dgemm(blas::RowMajor, blas::NoTrans, blas::NoTrans,
                    static_cast<int>(a.rows()), static_cast<int>(b.cols()),
                    static_cast<int>(a.cols()), 1.0, a.data(),
                    static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()),
                    0.0, c.data(), static_cast<int>(c.cols()));
  return c;
}

// aᵀ·b without materializing the transpose.
inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row counts differ");
  DenseMatrix c(a.cols(), b.cols());
  if (c.size() == 0 || a.rows() == 0) return c;
  blas::api().dgemm(blas::RowMajor, blas::Trans, blas::NoTrans,
                    static_cast<int>(a.cols()), static_cast<int>(b.cols()),
                    static_cast<int>(a.rows()), 1.0, a.data(),
                    static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()),
                    0.0, c.data(), static_cast<int>(c.cols()));
  return c;
}

// a·bᵀ without materializing the transpose.
inline DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: column counts differ");
  DenseMatrix c(a.rows(), b.rows());
  if (c.size() == 0 || a.cols() == 0) return c;
  blas::api().dgemm(blas::RowMajor, blas::NoTrans, blas::Trans,
                    static_cast<int>(a.rows()), static_cast<int>(b.rows()),
                    static_cast<int>(a.cols()), 1.0, a.data(),
                    static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()),
                    0.0, c.data(), static_cast<int>(c.cols()));
  return c;
}

inline DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul(sparse,dense): inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    double* out = c.data() + i * n;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double v = vals[k];
      const double* src = b.data() + cols[k] * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += v * src[j];
    }
  }
  return c;
}

// Gram matrix m·mᵀ (symmetric, computed once and mirrored).
inline DenseMatrix gram(const DenseMatrix& m) {
  DenseMatrix g(m.rows(), m.rows());
  if (m.rows() == 0) return g;
  blas::api().dsyrk(blas::RowMajor, blas::Upper, blas::NoTrans,
                    static_cast<int>(m.rows()), static_cast<int>(m.cols()), 1.0,
                    m.data(), static_cast<int>(m.cols()), 0.0, g.data(),
                    static_cast<int>(g.cols()));
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

// ---------------------------------------------------------------------------
// Elementwise and structural operations
// ---------------------------------------------------------------------------

inline DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

inline DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("add: shape mismatch");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

inline DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("subtract: shape mismatch");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

inline DenseMatrix scale(const DenseMatrix& a, double s) {
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= s;
  return c;
}

// Adds a 1×k row vector to every row.
inline DenseMatrix add_row_broadcast(const DenseMatrix& m, const DenseMatrix& row) {
  if (row.rows() != 1 || row.cols() != m.cols())
    throw ShapeError("add_row_broadcast: row vector shape mismatch");
  DenseMatrix c = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) += row(0, j);
  return c;
}

inline DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix c = m;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.data()[i] < 0.0) c.data()[i] = 0.0;
  return c;
}

inline DenseMatrix tanh_elementwise(const DenseMatrix& m) {
  DenseMatrix c = m;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = std::tanh(c.data()[i]);
  return c;
}

// Row softmax with per-row max subtraction.
inline DenseMatrix softmax_rows(const DenseMatrix& m) {
  DenseMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto in = m.row(i);
    auto out = c.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (std::size_t j = 0; j < in.size(); ++j) out[j] /= sum;
  }
  return c;
}

// Inverted dropout: zero with probability p, scale survivors by 1/(1-p).
inline DenseMatrix dropout(const DenseMatrix& m, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw ContractError("dropout: p must be in [0,1)");
  if (p == 0.0) return m;
  DenseMatrix c = m;
  const double keep_scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < c.size(); ++i)
    c.data()[i] = rng.bernoulli(p) ? 0.0 : c.data()[i] * keep_scale;
  return c;
}

inline SparseMatrix dropout(const SparseMatrix& m, double p, Rng& rng) {
  if (p < 0.0 || p >= 1.0) throw ContractError("dropout: p must be in [0,1)");
  if (p == 0.0) return m;
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (!rng.bernoulli(p)) t.emplace_back(i, cols[k], vals[k] * keep_scale);
  }
  return SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(t));
}

// L1 row normalization; zero rows stay zero.
inline DenseMatrix row_l1_normalize(const DenseMatrix& m) {
  DenseMatrix c = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (double v : m.row(i)) sum += std::abs(v);
    if (sum == 0.0) continue;
    for (double& v : c.row(i)) v /= sum;
  }
  return c;
}

inline SparseMatrix row_l1_normalize(const SparseMatrix& m) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    double sum = 0.0;
    for (double v : vals) sum += std::abs(v);
    if (sum == 0.0) continue;
    for (std::size_t k = 0; k < cols.size(); ++k)
      t.emplace_back(i, cols[k], vals[k] / sum);
  }
  return SparseMatrix::from_triplets(m.rows(), m.cols(), std::move(t));
}

// Subtracts the column mean from every column (H·m with H = I - n⁻¹eeᵀ).
inline DenseMatrix center_columns(const DenseMatrix& m) {
  DenseMatrix c = m;
  if (m.rows() == 0) return c;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, j);
    mean /= static_cast<double>(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) c(i, j) -= mean;
  }
  return c;
}

inline double sum(const DenseMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i];
  return s;
}

inline double frobenius_norm_sq(const DenseMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
  return s;
}

inline double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("frobenius_dot: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s = std::max(s, std::abs(a.data()[i] - b.data()[i]));
  return s;
}

}  // namespace gda
