#include "srsvd/rsvd.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "srsvd/error.hpp"
#include "srsvd/random.hpp"

namespace srsvd {

namespace {

Vector negated(const Vector& v) {
  std::vector<double> out(v.values().begin(), v.values().end());
  for (auto& e : out) e = -e;
  return Vector(std::move(out));
}

SvdFactors range_finder_svd(MatrixView x, const Vector& mu, const RsvdParams& params) {
  const ShiftedOperator shifted(x, mu);
  const ShiftedOperator plain(x);

  Rng rng(params.seed);
  const DenseMatrix omega = gaussian_matrix(x.cols(), params.sketch_width, rng);
  const DenseMatrix sample = matmat_right(plain, omega);

  QrFactors basis = qr(sample);
  if (shifted.has_shift()) {
    basis = qr_rank1_update(basis, negated(mu), Vector::ones(params.sketch_width));
  }
  DenseMatrix q = std::move(basis.q);

  for (std::size_t i = 0; i < params.power_iters; ++i) {
    const DenseMatrix q_left = qr(matmat_left_transpose(shifted, q)).q;
    q = qr(matmat_right(shifted, q_left)).q;
  }

  const DenseMatrix y = project(shifted, q);
  SvdFactors small = svd_small(y).truncated(params.rank);
  return {multiply(q, small.u), std::move(small.sigma), std::move(small.v)};
}

}  // namespace

void validate(const RsvdParams& params, std::size_t rows, std::size_t cols) {
  const std::size_t limit = std::min(rows, cols);
  if (params.rank < 1 || params.rank >= params.sketch_width || params.sketch_width > limit) {
    fail(ErrorCode::invalid_argument,
         "randomized SVD needs 1 <= k < K <= min(rows, cols); got k = " +
             std::to_string(params.rank) + ", K = " + std::to_string(params.sketch_width) +
             " for a " + shape_str(rows, cols) + " matrix");
  }
}

SvdResult shifted_rsvd(MatrixView x, const Vector& mu, const RsvdParams& params) {
  const auto start = std::chrono::steady_clock::now();
  validate(params, x.rows(), x.cols());
  if (mu.size() != x.rows()) {
    fail(ErrorCode::dimension_mismatch,
         "shift length " + std::to_string(mu.size()) + " does not match matrix " +
             shape_str(x.rows(), x.cols()));
  }

  SvdFactors factors = [&] {
    if (x.rows() <= x.cols()) return range_finder_svd(x, mu, params);
    if (!mu.is_zero()) {
      fail(ErrorCode::invalid_argument,
           "a nonzero shift requires rows <= cols; got " + shape_str(x.rows(), x.cols()));
    }
    const Vector no_shift = Vector::zeros(x.cols());
    SvdFactors t = [&] {
      if (const auto* d = x.dense()) {
        const DenseMatrix xt = d->transpose();
        return range_finder_svd(xt, no_shift, params);
      }
      const SparseMatrix xt = x.sparse()->transpose();
      return range_finder_svd(xt, no_shift, params);
    }();
    return SvdFactors{std::move(t.v), std::move(t.sigma), std::move(t.u)};
  }();

  return {std::move(factors), params, mu,
          std::chrono::duration_cast<std::chrono::nanoseconds>(
              std::chrono::steady_clock::now() - start)};
}

SvdResult rsvd(MatrixView x, const RsvdParams& params) {
  return shifted_rsvd(x, Vector::zeros(x.rows()), params);
}

double error_bound(std::size_t m, std::size_t k, std::size_t q, double sigma_k_plus_1) {
  if (k < 2 || 2 * k > m) {
    fail(ErrorCode::invalid_argument, "error bound holds for 2 <= k <= m/2; got k = " +
                                          std::to_string(k) + ", m = " + std::to_string(m));
  }
  if (!(sigma_k_plus_1 >= 0.0)) {
    fail(ErrorCode::invalid_argument, "sigma_{k+1} must be nonnegative");
  }
  const double base =
      1.0 + 4.0 * std::sqrt(2.0 * static_cast<double>(m) / static_cast<double>(k - 1));
  return std::pow(base, 1.0 / static_cast<double>(2 * q + 1)) * sigma_k_plus_1;
}

DenseMatrix reconstruct(const SvdResult& result, std::size_t max_entries) {
  const auto& f = result.factors;
  if (f.u.rows() * f.v.rows() > max_entries) {
    fail(ErrorCode::invalid_argument,
         "refusing to reconstruct " + shape_str(f.u.rows(), f.v.rows()) + " (cap " +
             std::to_string(max_entries) + " entries)");
  }
  return reconstruct(f);
}

}  // namespace srsvd
