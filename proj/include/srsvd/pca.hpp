#pragma once

// PCA on top of the shifted randomized SVD. Columns are samples, rows are
// variables. The fitted mean is folded into the factorization rather than
// subtracted up front.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "srsvd/matrix.hpp"
#include "srsvd/rsvd.hpp"

namespace srsvd {

struct PcaOptions {
  std::size_t components = 1;
  double oversample = 2.0;  // K = ceil(oversample * k)
  std::size_t power_iters = 0;
  std::uint64_t seed = 0;

  RsvdParams params() const;
};

struct PcaModel {
  Vector mean;                        // length m
  DenseMatrix components;             // U, m x k
  std::vector<double> sigma;          // length k
  DenseMatrix right_vectors;          // V, n x k (training columns)
  RsvdParams params;

  std::size_t rank() const noexcept { return sigma.size(); }
};

// Mean-centered fit: mean = column_mean(x), factors from shifted_rsvd.
PcaModel fit(MatrixView x, const PcaOptions& options);

// Fit around an arbitrary shift; a zero shift gives the uncentered baseline.
PcaModel fit_shifted(MatrixView x, const Vector& shift, const RsvdParams& params);

// Wraps an existing factorization of x - mean 1^T.
PcaModel model_from(SvdResult result, Vector mean);

// U^T (x - mean 1^T), k x n, without materializing the centered matrix.
DenseMatrix transform(const PcaModel& model, MatrixView x);

// U y + mean 1^T
DenseMatrix inverse_transform(const PcaModel& model, const DenseMatrix& y);

struct ErrorReport {
  double mse = 0.0;                 // mean of per_column
  std::vector<double> per_column;   // ||x_j - x_hat_j||^2
};

ErrorReport reconstruction_errors(const PcaModel& model, MatrixView x);

struct WinRate {
  double first = 0.0;   // fraction of columns where the first report is lower
  double second = 0.0;  // and vice versa; ties count for neither
};

// Per-column comparison; differences within 1e-15 relative are ties.
WinRate win_rate(const std::vector<double>& first, const std::vector<double>& second);
WinRate win_rate(const ErrorReport& first, const ErrorReport& second);

}  // namespace srsvd
