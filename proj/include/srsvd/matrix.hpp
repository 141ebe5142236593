#pragma once

// Dense and sparse storage plus the implicitly shifted operator X - mu 1^T.
//
// Every product on a ShiftedOperator is evaluated with the rank-1 correction
// applied after the plain product, with the small inner factor formed first:
//
//   (X - mu 1^T) B    = X B     - mu (1^T B)
//   (X - mu 1^T)^T Q  = X^T Q   - 1 (mu^T Q)
//   Q^T (X - mu 1^T)  = Q^T X   - (Q^T mu) 1^T
//
// so no rows x cols buffer for the shifted matrix ever exists.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace srsvd {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::vector<double> values);

  static Vector zeros(std::size_t n);
  static Vector ones(std::size_t n);

  std::size_t size() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<const double> values() const noexcept { return data_; }

  // True when every entry compares equal to 0.0 (so -0.0 counts as zero).
  bool is_zero() const noexcept;

 private:
  std::vector<double> data_;
};

// Row-major real matrix. rows, cols >= 1; entries finite.
class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  DenseMatrix transpose() const;
  // Leading `count` columns.
  DenseMatrix left_columns(std::size_t count) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row storage. Column indices strictly increase within a
// row; stored values are finite and nonzero.
class SparseMatrix {
 public:
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  // Duplicates are summed; entries that end up zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

// Non-owning reference to either storage kind.
class MatrixView {
 public:
  MatrixView(const DenseMatrix& m) : ptr_(&m) {}   // NOLINT(google-explicit-constructor)
  MatrixView(const SparseMatrix& m) : ptr_(&m) {}  // NOLINT(google-explicit-constructor)
  MatrixView(const AnyMatrix& m);                  // NOLINT(google-explicit-constructor)

  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  const DenseMatrix* dense() const noexcept;
  const SparseMatrix* sparse() const noexcept;

 private:
  std::variant<const DenseMatrix*, const SparseMatrix*> ptr_;
};

// base - shift 1^T, never materialized. The view does not own `base`.
class ShiftedOperator {
 public:
  explicit ShiftedOperator(MatrixView base);
  ShiftedOperator(MatrixView base, Vector shift);

  std::size_t rows() const noexcept { return base_.rows(); }
  std::size_t cols() const noexcept { return base_.cols(); }
  const MatrixView& base() const noexcept { return base_; }
  const Vector& shift() const noexcept { return shift_; }
  bool has_shift() const noexcept { return has_shift_; }

 private:
  MatrixView base_;
  Vector shift_;
  bool has_shift_;
};

// A B  (plain dense product).
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
// A^T B
DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b);

// (base - mu 1^T) B
DenseMatrix matmat_right(const ShiftedOperator& a, const DenseMatrix& b);
// (base - mu 1^T)^T Q
DenseMatrix matmat_left_transpose(const ShiftedOperator& a, const DenseMatrix& q);
// Q^T (base - mu 1^T)
DenseMatrix project(const ShiftedOperator& a, const DenseMatrix& q);

// Explicit base - mu 1^T. Refuses above `max_entries` entries.
DenseMatrix densify(const ShiftedOperator& a, std::size_t max_entries = 10'000'000);

// (1/n) X 1
Vector column_mean(MatrixView x);

double frobenius_norm(const DenseMatrix& x);
// Largest singular value by power iteration on X^T X from a fixed start.
double spectral_norm_est(const DenseMatrix& x, std::size_t iters);

// FNV-1a over shape and the bit patterns of the entries.
std::uint64_t content_hash(MatrixView x);

}  // namespace srsvd
