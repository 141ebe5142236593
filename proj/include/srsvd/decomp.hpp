#pragma once

#include <cstddef>
#include <vector>

#include "srsvd/matrix.hpp"

namespace srsvd {

// Thin QR: Q is m x p with orthonormal columns, R is p x p upper triangular
// with exact zeros below the diagonal.
struct QrFactors {
  DenseMatrix q;
  DenseMatrix r;
};

// Thin SVD with r = min(rows, cols) triplets, sigma nonincreasing.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  std::size_t rank() const noexcept { return sigma.size(); }
  // Leading k triplets.
  SvdFactors truncated(std::size_t k) const;
};

// Householder QR without pivoting. Requires rows >= cols; rank deficiency is
// tolerated (R may carry zero diagonal entries).
QrFactors qr(const DenseMatrix& a);

// Factors of Q R + u v^T obtained by Givens rotations on the existing factors.
// The thin Q is first extended by the normalized component of u outside
// range(Q); the extra column is dropped again once R is retriangularized.
QrFactors qr_rank1_update(const QrFactors& f, const Vector& u, const Vector& v);

DenseMatrix reconstruct(const QrFactors& f);
DenseMatrix reconstruct(const SvdFactors& f);

// One-sided (Hestenes) Jacobi SVD. Inputs with long sides are first reduced by
// QR so the rotations act on a square triangle. Columns of U are signed so the
// entry of largest magnitude is nonnegative; magnitudes within a relative
// 1e-12 of the maximum are ties, resolved by the lowest row index.
SvdFactors svd_small(const DenseMatrix& a);

// Leading-k truncation of svd_small; 1 <= k <= min(rows, cols).
SvdFactors svd_exact_truncated(const DenseMatrix& a, std::size_t k);

}  // namespace srsvd
