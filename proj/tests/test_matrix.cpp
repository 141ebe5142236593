#include "doctest.h"
#include "oracles.hpp"
#include "srsvd/decomp.hpp"
#include "srsvd/error.hpp"
#include "srsvd/matrix.hpp"

#include <cmath>
#include <limits>

using namespace srsvd;

TEST_SUITE("matrix") {

TEST_CASE("dense construction rejects bad shapes and non-finite entries") {
  CHECK_THROWS_AS(DenseMatrix(0, 3), Error);
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  CHECK_THROWS_AS(DenseMatrix(1, 1, {std::numeric_limits<double>::infinity()}), Error);
  CHECK_THROWS_AS(Vector({1.0, std::numeric_limits<double>::infinity()}), Error);
}

TEST_CASE("sparse invariants") {
  // Column indices must increase within a row.
  CHECK_THROWS_AS(SparseMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), Error);
  // row_ptr must end at nnz.
  CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1, 1}, {0, 1}, {1.0, 1.0}), Error);
  // Stored zeros are not allowed.
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 1}, {0}, {0.0}), Error);
  // Column out of range.
  CHECK_THROWS_AS(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), Error);

  const auto s = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 3.0},
                                                    {0, 0, 1.0}, {0, 0, -1.0}});
  CHECK(s.nnz() == 2);
  CHECK(s.to_dense() == DenseMatrix(2, 3, {0, 2, 0, 0, 0, 4}));
  CHECK(s.transpose().to_dense() == s.to_dense().transpose());
  CHECK(SparseMatrix::from_dense(s.to_dense()) == s);
}

TEST_CASE("shift length must match rows") {
  const DenseMatrix x = DenseMatrix::identity(3);
  CHECK_THROWS_AS(ShiftedOperator(x, Vector::zeros(2)), Error);
}

TEST_CASE("matmat_right examples") {
  const DenseMatrix i3 = DenseMatrix::identity(3);
  CHECK(matmat_right(ShiftedOperator(i3, Vector::zeros(3)), i3) == i3);

  const DenseMatrix i2 = DenseMatrix::identity(2);
  const DenseMatrix b(2, 1, {1.0, 0.0});
  CHECK(matmat_right(ShiftedOperator(i2, Vector({1.0, 1.0})), b) == DenseMatrix(2, 1, {0.0, -1.0}));

  oracle::TestRng rng(11);
  const auto base = oracle::random_dense(5, 4, rng);
  const auto mu = oracle::random_vector(5, rng);
  const auto bb = oracle::random_dense(4, 2, rng);
  const auto expected = oracle::matmul(oracle::shifted(base, mu), bb);
  CHECK(oracle::max_abs_diff(matmat_right(ShiftedOperator(base, mu), bb), expected) <= 1e-12);
}

TEST_CASE("matmat_right reports both shapes on mismatch") {
  const DenseMatrix x(2, 3);
  try {
    matmat_right(ShiftedOperator(x), DenseMatrix(2, 2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension_mismatch);
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("2x2") != std::string::npos);
  }
}

TEST_CASE("matmat_left_transpose examples") {
  oracle::TestRng rng(12);
  const auto base = oracle::random_dense(4, 6, rng);
  const auto q = oracle::random_dense(4, 2, rng);
  CHECK(matmat_left_transpose(ShiftedOperator(base, Vector::zeros(4)), q) ==
        multiply_transposed(base, q));

  const DenseMatrix i2 = DenseMatrix::identity(2);
  CHECK(matmat_left_transpose(ShiftedOperator(i2, Vector({1.0, 1.0})), i2) ==
        DenseMatrix(2, 2, {0.0, -1.0, -1.0, 0.0}));

  const auto sparse = oracle::random_sparse(6, 8, 0.4, rng);
  const auto mu = oracle::random_vector(6, rng);
  const auto qq = oracle::random_dense(6, 3, rng);
  const auto expected =
      oracle::matmul(oracle::transpose(oracle::shifted(oracle::densify(sparse), mu)), qq);
  CHECK(oracle::max_abs_diff(matmat_left_transpose(ShiftedOperator(sparse, mu), qq), expected) <=
        1e-12);
  CHECK_THROWS_AS(matmat_left_transpose(ShiftedOperator(sparse), DenseMatrix(5, 1)), Error);
}

TEST_CASE("project examples") {
  oracle::TestRng rng(13);
  const auto x = oracle::random_dense(7, 5, rng);
  const auto mu = oracle::random_vector(7, rng);
  const DenseMatrix i7 = DenseMatrix::identity(7);

  CHECK(project(ShiftedOperator(x), i7) == x);
  CHECK(oracle::max_abs_diff(project(ShiftedOperator(x, mu), i7), oracle::shifted(x, mu)) == 0.0);

  const auto q = oracle::random_orthonormal(7, 3, rng);
  const auto expected = oracle::matmul(oracle::transpose(q), oracle::shifted(x, mu));
  CHECK(oracle::max_abs_diff(project(ShiftedOperator(x, mu), q), expected) <= 1e-12);
  CHECK_THROWS_AS(project(ShiftedOperator(x), DenseMatrix(6, 2)), Error);
}

TEST_CASE("column_mean examples") {
  const Vector m = column_mean(DenseMatrix(2, 2, {1, 3, 2, 4}));
  CHECK(m[0] == 2.0);
  CHECK(m[1] == 3.0);
  CHECK(column_mean(DenseMatrix(3, 4)).is_zero());

  oracle::TestRng rng(14);
  const auto s = oracle::random_sparse(10, 20, 0.3, rng);
  const auto dense = oracle::densify(s);
  const Vector ms = column_mean(s);
  for (std::size_t i = 0; i < 10; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 20; ++j) sum += dense(i, j);
    CHECK(std::abs(ms[i] - sum / 20.0) <= 1e-14);
  }
}

TEST_CASE("norms") {
  const DenseMatrix d(2, 2, {3, 0, 0, 4});
  CHECK(frobenius_norm(d) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(spectral_norm_est(d, 100) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(frobenius_norm(DenseMatrix(3, 3)) == 0.0);
  CHECK(spectral_norm_est(DenseMatrix(3, 3), 10) == 0.0);

  oracle::TestRng rng(15);
  const auto x = oracle::random_dense(8, 8, rng);
  const double sigma1 = svd_small(x).sigma[0];
  CHECK(std::abs(spectral_norm_est(x, 200) - sigma1) <= 1e-6 * sigma1);
}

TEST_CASE("densify honours its cap") {
  const SparseMatrix s = SparseMatrix::from_triplets(1000, 1000, {{0, 0, 1.0}});
  CHECK_THROWS_AS(densify(ShiftedOperator(s), 1000), Error);
  CHECK(densify(ShiftedOperator(s))(0, 0) == 1.0);
}

TEST_CASE("content hash separates shape and values") {
  const DenseMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
  const DenseMatrix b(3, 2, {1, 2, 3, 4, 5, 6});
  CHECK(content_hash(a) != content_hash(b));
  CHECK(content_hash(a) == content_hash(DenseMatrix(a)));
  DenseMatrix c = a;
  c(1, 2) = 6.000000000000001;
  CHECK(content_hash(a) != content_hash(c));
}

}  // TEST_SUITE
