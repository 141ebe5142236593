#pragma once

// Randomized SVD of the implicitly shifted matrix X - mu 1^T.
//
// The range finder samples X with a Gaussian test matrix, orthonormalizes the
// sample, and moves the shift into the basis with a rank-1 QR update instead
// of forming X - mu 1^T. Power iterations and the final projection use the
// distributive products of ShiftedOperator, so a sparse X stays sparse.
// With mu = 0 the update is skipped and the procedure is the plain
// Halko-Martinsson-Tropp randomized SVD.

#include <chrono>
#include <cstddef>
#include <cstdint>

#include "srsvd/decomp.hpp"
#include "srsvd/matrix.hpp"

namespace srsvd {

struct RsvdParams {
  std::size_t rank = 1;          // k
  std::size_t sketch_width = 2;  // K, number of Gaussian samples
  std::size_t power_iters = 0;   // q
  std::uint64_t seed = 0;

  // K = 2k.
  static RsvdParams with_default_sketch(std::size_t rank, std::size_t power_iters,
                                        std::uint64_t seed) {
    return {rank, 2 * rank, power_iters, seed};
  }
};

// Throws unless 1 <= k < K <= min(rows, cols).
void validate(const RsvdParams& params, std::size_t rows, std::size_t cols);

struct SvdResult {
  SvdFactors factors;  // rank k
  RsvdParams params;
  Vector shift;
  std::chrono::nanoseconds elapsed{0};
};

// Rank-k factors of X - mu 1^T. Inputs with more rows than columns are
// factorized through their transpose, which is only supported for mu = 0.
SvdResult shifted_rsvd(MatrixView x, const Vector& mu, const RsvdParams& params);

// shifted_rsvd with a zero shift.
SvdResult rsvd(MatrixView x, const RsvdParams& params);

// Expected spectral-norm error bound of the randomized range finder:
//   (1 + 4 sqrt(2m / (k - 1)))^(1 / (2q + 1)) * sigma_{k+1},
// stated for 2 <= k <= m / 2.
double error_bound(std::size_t m, std::size_t k, std::size_t q, double sigma_k_plus_1);

// U diag(sigma) V^T, the approximation of the shifted matrix (the shift is not
// added back). Refuses outputs above `max_entries` entries.
DenseMatrix reconstruct(const SvdResult& result, std::size_t max_entries = 10'000'000);

}  // namespace srsvd
