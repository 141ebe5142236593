#include "doctest.h"
#include "oracles.hpp"
#include "srsvd/decomp.hpp"
#include "srsvd/error.hpp"
#include "srsvd/io.hpp"
#include "srsvd/pca.hpp"
#include "srsvd/stats.hpp"

#include <cmath>
#include <numeric>

using namespace srsvd;

namespace {

// Model from the exact factorization of the centered matrix; this is the only
// way to reach k = m, since the randomized path needs k < K <= m.
PcaModel exact_model(const DenseMatrix& x, std::size_t k) {
  const Vector mu = column_mean(x);
  SvdResult r{svd_exact_truncated(oracle::shifted(x, mu), k), {k, k + 1, 0, 0}, mu, {}};
  return model_from(std::move(r), mu);
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("identical columns give a zero spectrum") {
  const DenseMatrix x(3, 6, {1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, -3, -3, -3, -3, -3, -3});
  const auto model = fit(x, {1, 2.0, 0, 4});
  CHECK(model.mean[0] == 1.0);
  CHECK(model.mean[1] == 2.0);
  CHECK(model.mean[2] == -3.0);
  CHECK(model.sigma == std::vector<double>{0.0});
}

TEST_CASE("alternating columns c + d, c - d") {
  const std::vector<double> c{1.0, -2.0, 0.5, 3.0};
  const std::vector<double> d{0.3, 0.4, -1.2, 0.0};
  const std::size_t n = 10;
  DenseMatrix x(4, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < 4; ++i) x(i, j) = c[i] + (j % 2 == 0 ? d[i] : -d[i]);
  }
  const auto model = fit(x, {1, 2.0, 0, 8});
  const double norm_d = std::sqrt(0.09 + 0.16 + 1.44);
  CHECK(model.sigma[0] == doctest::Approx(std::sqrt(double(n)) * norm_d).epsilon(1e-12));
  double cosine = 0.0;
  for (std::size_t i = 0; i < 4; ++i) cosine += model.components(i, 0) * d[i] / norm_d;
  CHECK(std::abs(cosine) == doctest::Approx(1.0).epsilon(1e-12));

  // Cross-check against the exact factorization.
  const auto exact = svd_small(oracle::shifted(x, column_mean(x)));
  CHECK(model.sigma[0] == doctest::Approx(exact.sigma[0]).epsilon(1e-12));
}

TEST_CASE("digits: the centered model beats the uncentered one") {
  const auto x = load_csv(SRSVD_DATA_DIR "/digits.csv");
  REQUIRE(x.rows() == 64);
  const PcaOptions opts{10, 2.0, 0, 3};
  const auto centered = fit(x, opts);
  const auto plain = fit_shifted(x, Vector::zeros(64), opts.params());
  CHECK(reconstruction_errors(centered, x).mse < reconstruction_errors(plain, x).mse);
}

TEST_CASE("transform examples") {
  oracle::TestRng rng(41);
  const auto x = oracle::random_dense(6, 20, rng);
  const auto model = fit(x, {3, 2.0, 1, 5});

  // Every column equal to the mean.
  DenseMatrix at_mean(6, 4);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 4; ++j) at_mean(i, j) = model.mean[i];
  }
  const auto zero = transform(model, at_mean);
  for (double v : zero.data()) CHECK(v == 0.0);

  // Training data maps to diag(sigma) V^T.
  const auto y = transform(model, x);
  DenseMatrix sv(3, 20);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < 20; ++j) sv(c, j) = model.sigma[c] * model.right_vectors(j, c);
  }
  CHECK(oracle::frobenius_diff(y, sv) <= 1e-6 * oracle::frobenius(sv));

  // x = mean + u_1 maps to e_1.
  DenseMatrix one(6, 1);
  for (std::size_t i = 0; i < 6; ++i) one(i, 0) = model.mean[i] + model.components(i, 0);
  const auto e = transform(model, one);
  CHECK(e(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(e(1, 0)) <= 1e-8);
  CHECK(std::abs(e(2, 0)) <= 1e-8);

  CHECK_THROWS_AS(transform(model, DenseMatrix(5, 2)), Error);
}

TEST_CASE("inverse_transform examples") {
  oracle::TestRng rng(42);
  const auto x = oracle::random_dense(5, 12, rng);
  const auto model = fit(x, {2, 2.0, 0, 6});

  const auto back = inverse_transform(model, DenseMatrix(2, 3));
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 5; ++i) CHECK(back(i, j) == model.mean[i]);
  }

  // A column inside mean + span(U).
  DenseMatrix col(5, 1);
  for (std::size_t i = 0; i < 5; ++i) {
    col(i, 0) = model.mean[i] + 0.7 * model.components(i, 0) - 1.3 * model.components(i, 1);
  }
  CHECK(oracle::max_abs_diff(inverse_transform(model, transform(model, col)), col) <= 1e-8);

  // Full rank recovers the training matrix.
  const auto full = exact_model(x, 5);
  const auto round = inverse_transform(full, transform(full, x));
  CHECK(oracle::frobenius_diff(round, x) <= 1e-6 * oracle::frobenius(x));

  CHECK_THROWS_AS(inverse_transform(model, DenseMatrix(3, 1)), Error);
}

TEST_CASE("reconstruction error examples") {
  oracle::TestRng rng(43);
  // Rank 2 around a nonzero mean.
  const auto basis = oracle::random_dense(6, 2, rng);
  const auto coeff = oracle::random_dense(2, 30, rng);
  auto x = oracle::matmul(basis, coeff);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 30; ++j) x(i, j) += 5.0 + static_cast<double>(i);
  }
  const auto report = reconstruction_errors(fit(x, {2, 2.0, 0, 1}), x);
  CHECK(report.mse <= 1e-10);
  CHECK(report.per_column.size() == 30);

  const auto y = oracle::random_dense(4, 9, rng);
  const double fro2 = std::pow(oracle::frobenius(y), 2);
  CHECK(reconstruction_errors(exact_model(y, 4), y).mse <= 1e-10 * fro2);
  CHECK_THROWS_AS(reconstruction_errors(exact_model(y, 4), DenseMatrix(3, 9)), Error);
}

TEST_CASE("MSE falls as the rank grows on uniform 100x1000") {
  const auto x = generate({Distribution::uniform, {}, 100, 1000, 17});
  const Vector mu = column_mean(x);
  const DenseMatrix centered = oracle::shifted(x, mu);
  const auto exact = svd_small(centered);
  const std::vector<std::size_t> ks{1, 2, 3, 4, 5, 10, 20, 30, 40, 50, 60, 70, 80, 90};
  double prev_random = INFINITY;
  double prev_exact = INFINITY;
  for (auto k : ks) {
    double mean_mse = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const PcaModel model = fit_shifted(x, mu, {k, std::min<std::size_t>(2 * k, 100), 0, seed});
      mean_mse += reconstruction_errors(model, x).mse / 5.0;
    }
    const double exact_mse = std::pow(oracle::tail_norm(exact.sigma, k), 2) / 1000.0;
    CHECK(mean_mse < prev_random);
    CHECK(exact_mse < prev_exact);
    CHECK(mean_mse >= exact_mse * (1 - 1e-9));
    prev_random = mean_mse;
    prev_exact = exact_mse;
  }
}

TEST_CASE("win rates") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const auto same = win_rate(a, a);
  CHECK(same.first == 0.0);
  CHECK(same.second == 0.0);
  const auto better = win_rate(std::vector<double>{0.5, 1.0, 2.0}, a);
  CHECK(better.first == 1.0);
  CHECK(better.second == 0.0);
  const auto mixed = win_rate(std::vector<double>{0.5, 2.0, 4.0, 1.0}, {1.0, 2.0, 3.0, 1.0 + 1e-17});
  CHECK(mixed.first == 0.25);
  CHECK(mixed.second == 0.25);
  CHECK_THROWS_AS(win_rate(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("error report mean") {
  oracle::TestRng rng(44);
  const auto x = oracle::random_dense(8, 40, rng);
  const auto report = reconstruction_errors(fit(x, {3, 2.0, 1, 2}), x);
  const double mean =
      std::accumulate(report.per_column.begin(), report.per_column.end(), 0.0) / 40.0;
  CHECK(std::abs(report.mse - mean) <= 1e-12 * mean);
  for (double e : report.per_column) CHECK(e >= 0.0);
}

TEST_CASE("oversample must exceed one") {
  CHECK_THROWS_AS(PcaOptions({3, 1.0, 0, 0}).params(), Error);
  CHECK(PcaOptions({3, 1.5, 0, 0}).params().sketch_width == 5);
}

}  // TEST_SUITE
