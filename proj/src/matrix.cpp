#include "srsvd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "srsvd/error.hpp"
#include "srsvd/random.hpp"

namespace srsvd {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::numeric,
           std::string(what) + ": non-finite value at position " + std::to_string(i));
    }
  }
}

void require_nonempty(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    fail(ErrorCode::invalid_argument, "empty matrix (" + shape_str(rows, cols) + ")");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::dimension_mismatch, what);
}

// a -= x * 1^T restricted to rows given by `shift`, i.e. out(i, c) -= shift[i] * w[c].
void subtract_outer(DenseMatrix& out, std::span<const double> left,
                    std::span<const double> right) {
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double l = left[i];
    auto row = out.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] -= l * right[c];
  }
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  require_finite(data_, "vector");
}

Vector Vector::zeros(std::size_t n) { return Vector(std::vector<double>(n, 0.0)); }

Vector Vector::ones(std::size_t n) { return Vector(std::vector<double>(n, 1.0)); }

bool Vector::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

// ---------------------------------------------------------------- DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  require_nonempty(rows, cols);
  data_.assign(rows * cols, 0.0);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_nonempty(rows, cols);
  if (data_.size() != rows * cols) {
    fail(ErrorCode::dimension_mismatch,
         "dense data length " + std::to_string(data_.size()) + " does not match shape " +
             shape_str(rows, cols));
  }
  require_finite(data_, "dense matrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  }
  return out;
}

DenseMatrix DenseMatrix::left_columns(std::size_t count) const {
  if (count == 0 || count > cols_) {
    fail(ErrorCode::invalid_argument, "column count " + std::to_string(count) +
                                          " out of range for " + shape_str(rows_, cols_));
  }
  DenseMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(row(i).begin(), count, out.row(i).begin());
  }
  return out;
}

// ---------------------------------------------------------------- SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  require_nonempty(rows, cols);
  require(row_ptr_.size() == rows + 1, "row_ptr length must be rows + 1");
  require(row_ptr_.front() == 0, "row_ptr must start at 0");
  require(row_ptr_.back() == values_.size() && col_idx_.size() == values_.size(),
          "row_ptr[rows], col_idx length and values length must agree");
  for (std::size_t i = 0; i < rows; ++i) {
    require(row_ptr_[i] <= row_ptr_[i + 1], "row_ptr must be nondecreasing");
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      require(col_idx_[p] < cols, "column index out of range in row " + std::to_string(i));
      require(p == row_ptr_[i] || col_idx_[p - 1] < col_idx_[p],
              "column indices must strictly increase within row " + std::to_string(i));
    }
  }
  require_finite(values_, "sparse matrix");
  for (double v : values_) {
    if (v == 0.0) fail(ErrorCode::invalid_argument, "sparse matrix stores an explicit zero");
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  require_nonempty(rows, cols);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      fail(ErrorCode::dimension_mismatch, "entry (" + std::to_string(t.row) + ", " +
                                              std::to_string(t.col) + ") outside " +
                                              shape_str(rows, cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());

  for (std::size_t p = 0; p < triplets.size();) {
    const auto r = triplets[p].row;
    const auto c = triplets[p].col;
    double sum = 0.0;
    for (; p < triplets.size() && triplets[p].row == r && triplets[p].col == c; ++p) {
      sum += triplets[p].value;
    }
    if (sum != 0.0) {
      col_idx.push_back(c);
      values.push_back(sum);
      ++row_ptr[r + 1];
    }
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<std::size_t> row_ptr(dense.rows() + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    for (std::size_t j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        col_idx.push_back(j);
        values.push_back(dense(i, j));
      }
    }
    row_ptr[i + 1] = values.size();
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(row_ptr), std::move(col_idx),
                      std::move(values));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> row_ptr(cols_ + 1, 0);
  for (auto c : col_idx_) ++row_ptr[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) row_ptr[j + 1] += row_ptr[j];

  std::vector<std::size_t> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<std::size_t> col_idx(nnz());
  std::vector<double> values(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const auto dst = next[col_idx_[p]]++;
      col_idx[dst] = i;
      values[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out(i, col_idx_[p]) = values_[p];
  }
  return out;
}

// ---------------------------------------------------------------- views

MatrixView::MatrixView(const AnyMatrix& m) : ptr_(static_cast<const DenseMatrix*>(nullptr)) {
  if (const auto* d = std::get_if<DenseMatrix>(&m)) {
    ptr_ = d;
  } else {
    ptr_ = &std::get<SparseMatrix>(m);
  }
}

std::size_t MatrixView::rows() const noexcept {
  return std::visit([](const auto* m) { return m->rows(); }, ptr_);
}

std::size_t MatrixView::cols() const noexcept {
  return std::visit([](const auto* m) { return m->cols(); }, ptr_);
}

const DenseMatrix* MatrixView::dense() const noexcept {
  const auto* const* p = std::get_if<const DenseMatrix*>(&ptr_);
  return p ? *p : nullptr;
}

const SparseMatrix* MatrixView::sparse() const noexcept {
  const auto* const* p = std::get_if<const SparseMatrix*>(&ptr_);
  return p ? *p : nullptr;
}

ShiftedOperator::ShiftedOperator(MatrixView base)
    : base_(base), shift_(Vector::zeros(base.rows())), has_shift_(false) {}

ShiftedOperator::ShiftedOperator(MatrixView base, Vector shift)
    : base_(base), shift_(std::move(shift)), has_shift_(false) {
  if (shift_.size() != base_.rows()) {
    fail(ErrorCode::dimension_mismatch,
         "shift length " + std::to_string(shift_.size()) + " does not match matrix " +
             shape_str(base_.rows(), base_.cols()));
  }
  has_shift_ = !shift_.is_zero();
}

// ---------------------------------------------------------------- products

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "multiply: " + shape_str(a.rows(), a.cols()) + " times " +
                                    shape_str(b.rows(), b.cols()));
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double s = a(i, l);
      if (s == 0.0) continue;
      auto src = b.row(l);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += s * src[c];
    }
  }
  return out;
}

DenseMatrix multiply_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "multiply_transposed: " + shape_str(a.rows(), a.cols()) +
                                    "^T times " + shape_str(b.rows(), b.cols()));
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = b.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      auto dst = out.row(j);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += s * src[c];
    }
  }
  return out;
}

namespace {

// 1^T B: column sums of B.
std::vector<double> column_sums(const DenseMatrix& b) {
  std::vector<double> sums(b.cols(), 0.0);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    auto r = b.row(i);
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] += r[c];
  }
  return sums;
}

// mu^T Q
std::vector<double> weighted_row_sum(std::span<const double> mu, const DenseMatrix& q) {
  std::vector<double> out(q.cols(), 0.0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const double w = mu[i];
    if (w == 0.0) continue;
    auto r = q.row(i);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * r[c];
  }
  return out;
}

}  // namespace

DenseMatrix matmat_right(const ShiftedOperator& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmat_right: operator " + shape_str(a.rows(), a.cols()) +
                                    " times " + shape_str(b.rows(), b.cols()));
  DenseMatrix out = [&] {
    if (const auto* d = a.base().dense()) return multiply(*d, b);
    const auto& s = *a.base().sparse();
    DenseMatrix prod(s.rows(), b.cols());
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      auto dst = prod.row(i);
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
        const double v = vals[p];
        auto src = b.row(ci[p]);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += v * src[c];
      }
    }
    return prod;
  }();
  if (a.has_shift()) {
    const auto ones_b = column_sums(b);
    subtract_outer(out, a.shift().values(), ones_b);
  }
  return out;
}

DenseMatrix matmat_left_transpose(const ShiftedOperator& a, const DenseMatrix& q) {
  require(a.rows() == q.rows(), "matmat_left_transpose: operator " +
                                    shape_str(a.rows(), a.cols()) + "^T times " +
                                    shape_str(q.rows(), q.cols()));
  DenseMatrix out = [&] {
    if (const auto* d = a.base().dense()) return multiply_transposed(*d, q);
    const auto& s = *a.base().sparse();
    DenseMatrix prod(s.cols(), q.cols());
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      auto src = q.row(i);
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
        const double v = vals[p];
        auto dst = prod.row(ci[p]);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += v * src[c];
      }
    }
    return prod;
  }();
  if (a.has_shift()) {
    const auto mu_q = weighted_row_sum(a.shift().values(), q);
    for (std::size_t j = 0; j < out.rows(); ++j) {
      auto r = out.row(j);
      for (std::size_t c = 0; c < r.size(); ++c) r[c] -= mu_q[c];
    }
  }
  return out;
}

DenseMatrix project(const ShiftedOperator& a, const DenseMatrix& q) {
  require(a.rows() == q.rows(), "project: basis " + shape_str(q.rows(), q.cols()) +
                                    " against operator " + shape_str(a.rows(), a.cols()));
  DenseMatrix y(q.cols(), a.cols());
  if (const auto* d = a.base().dense()) {
    for (std::size_t i = 0; i < d->rows(); ++i) {
      auto xr = d->row(i);
      for (std::size_t c = 0; c < q.cols(); ++c) {
        const double w = q(i, c);
        if (w == 0.0) continue;
        auto dst = y.row(c);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * xr[j];
      }
    }
  } else {
    const auto& s = *a.base().sparse();
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      auto qr = q.row(i);
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
        const double v = vals[p];
        const auto j = ci[p];
        for (std::size_t c = 0; c < qr.size(); ++c) y(c, j) += qr[c] * v;
      }
    }
  }
  if (a.has_shift()) {
    const auto qt_mu = weighted_row_sum(a.shift().values(), q);
    subtract_outer(y, qt_mu, std::vector<double>(a.cols(), 1.0));
  }
  return y;
}

DenseMatrix densify(const ShiftedOperator& a, std::size_t max_entries) {
  if (a.rows() * a.cols() > max_entries) {
    fail(ErrorCode::invalid_argument, "refusing to densify " + shape_str(a.rows(), a.cols()) +
                                          " (cap " + std::to_string(max_entries) + " entries)");
  }
  DenseMatrix out = a.base().dense() ? *a.base().dense() : a.base().sparse()->to_dense();
  if (a.has_shift()) {
    const auto mu = a.shift().values();
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (auto& v : out.row(i)) v -= mu[i];
    }
  }
  return out;
}

Vector column_mean(MatrixView x) {
  std::vector<double> mean(x.rows(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.cols());
  if (const auto* d = x.dense()) {
    for (std::size_t i = 0; i < d->rows(); ++i) {
      double sum = 0.0;
      for (double v : d->row(i)) sum += v;
      mean[i] = sum * inv_n;
    }
  } else {
    const auto& s = *x.sparse();
    const auto rp = s.row_ptr();
    const auto vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) sum += vals[p];
      mean[i] = sum * inv_n;
    }
  }
  return Vector(std::move(mean));
}

double frobenius_norm(const DenseMatrix& x) {
  // Scaled accumulation guards against overflow for large entries.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x.data()) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double spectral_norm_est(const DenseMatrix& x, std::size_t iters) {
  if (iters == 0) fail(ErrorCode::invalid_argument, "spectral_norm_est needs iters >= 1");
  Rng rng(0x5eed);
  std::vector<double> v(x.cols());
  for (auto& e : v) e = rng.normal();

  auto normalize = [](std::vector<double>& w) {
    double n = 0.0;
    for (double e : w) n += e * e;
    n = std::sqrt(n);
    if (n > 0.0) {
      for (auto& e : w) e /= n;
    }
    return n;
  };
  normalize(v);

  std::vector<double> xv(x.rows());
  double sigma = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double s = 0.0;
      auto r = x.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * v[j];
      xv[i] = s;
    }
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto r = x.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) v[j] += r[j] * xv[i];
    }
    const double n = normalize(v);
    if (n == 0.0) return 0.0;
    sigma = std::sqrt(n);
  }
  return sigma;
}

std::uint64_t content_hash(MatrixView x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t shape[2] = {x.rows(), x.cols()};
  mix(shape, sizeof shape);
  if (const auto* d = x.dense()) {
    mix(d->data().data(), d->data().size_bytes());
  } else {
    const auto& s = *x.sparse();
    mix(s.row_ptr().data(), s.row_ptr().size_bytes());
    mix(s.col_idx().data(), s.col_idx().size_bytes());
    mix(s.values().data(), s.values().size_bytes());
  }
  return h;
}

}  // namespace srsvd
