// Randomized invariants over every module. All draws come from one master
// seed so a failure reproduces exactly.

#include "alloc_hook.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "srsvd/decomp.hpp"
#include "srsvd/io.hpp"
#include "srsvd/matrix.hpp"
#include "srsvd/pca.hpp"
#include "srsvd/rsvd.hpp"
#include "srsvd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <sstream>

using namespace srsvd;

namespace {

constexpr std::uint64_t kMasterSeed = 0x5eed2026;

oracle::TestRng stream(std::uint64_t salt) {
  return oracle::TestRng(kMasterSeed ^ (salt * 0x9e3779b97f4a7c15ULL));
}

bool same_bits(const DenseMatrix& a, const DenseMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(double)) == 0;
}

bool same_bits(const SvdFactors& a, const SvdFactors& b) {
  return same_bits(a.u, b.u) && same_bits(a.v, b.v) && a.sigma.size() == b.sigma.size() &&
         std::memcmp(a.sigma.data(), b.sigma.data(), a.sigma.size() * sizeof(double)) == 0;
}

DenseMatrix with_spectrum(std::size_t m, std::size_t n, const std::vector<double>& s,
                          oracle::TestRng& rng) {
  auto us = oracle::random_orthonormal(m, s.size(), rng);
  const auto v = oracle::random_orthonormal(n, s.size(), rng);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) us(i, j) *= s[j];
  }
  return oracle::matmul(us, oracle::transpose(v));
}

DenseMatrix residual(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix d = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) d(i, j) -= b(i, j);
  }
  return d;
}

Vector negative_zeros(std::size_t n) { return Vector(std::vector<double>(n, -0.0)); }

bool is_upper_triangular(const DenseMatrix& r) {
  for (std::size_t i = 0; i < r.rows(); ++i) {
    for (std::size_t j = 0; j < std::min(i, r.cols()); ++j) {
      if (r(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("properties: matrix") {

TEST_CASE("shifted products agree with the densified operator") {
  auto rng = stream(1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t m = rng.index(1, 50);
    const std::size_t n = rng.index(1, 50);
    const std::size_t s = rng.index(1, 12);
    const bool sparse = rng.coin();
    const AnyMatrix x = sparse ? AnyMatrix(oracle::random_sparse(m, n, 0.2, rng))
                               : AnyMatrix(oracle::random_dense(m, n, rng));
    const Vector mu = oracle::random_vector(m, rng);
    const ShiftedOperator op(x, mu);
    const DenseMatrix full = densify(op);

    const auto b = oracle::random_dense(n, s, rng);
    const auto q = oracle::random_dense(m, s, rng);
    const double fx = oracle::frobenius(full);
    CHECK(oracle::frobenius_diff(matmat_right(op, b), oracle::matmul(full, b)) <=
          1e-12 * fx * oracle::frobenius(b));
    CHECK(oracle::frobenius_diff(matmat_left_transpose(op, q),
                                 oracle::matmul(oracle::transpose(full), q)) <=
          1e-12 * fx * oracle::frobenius(q));
    CHECK(oracle::frobenius_diff(project(op, q), oracle::matmul(oracle::transpose(q), full)) <=
          1e-12 * fx * oracle::frobenius(q));
  }
}

TEST_CASE("zero shift reproduces the plain dense products bit for bit") {
  auto rng = stream(2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = rng.index(1, 50);
    const std::size_t n = rng.index(1, 50);
    const std::size_t s = rng.index(1, 10);
    const auto x = oracle::random_dense(m, n, rng);
    const auto b = oracle::random_dense(n, s, rng);
    const auto q = oracle::random_dense(m, s, rng);
    for (const Vector& mu : {Vector::zeros(m), negative_zeros(m)}) {
      const ShiftedOperator op(x, mu);
      REQUIRE_FALSE(op.has_shift());
      CHECK(same_bits(matmat_right(op, b), multiply(x, b)));
      CHECK(same_bits(matmat_left_transpose(op, q), multiply_transposed(x, q)));
      CHECK(same_bits(project(op, q), multiply_transposed(q, x)));
    }
  }
}

TEST_CASE("sparse shifted products stay within O((m + n) s) extra memory") {
  auto rng = stream(3);
  const std::size_t m = 2000;
  const std::size_t n = 20000;
  const std::size_t s = 16;
  const auto x = oracle::random_sparse(m, n, 2e-4, rng);
  const Vector mu = column_mean(x);
  const ShiftedOperator op(x, mu);
  const auto b = oracle::random_dense(n, s, rng);
  const auto q = oracle::random_dense(m, s, rng);

  const std::size_t budget = 4 * (m + n) * s * sizeof(double);
  for (int which = 0; which < 3; ++which) {
    const std::size_t before = alloc_hook::live_bytes();
    alloc_hook::reset_peak();
    {
      const DenseMatrix out = which == 0   ? matmat_right(op, b)
                              : which == 1 ? matmat_left_transpose(op, q)
                                           : project(op, q);
      CHECK(out.data().size() <= std::max(m, n) * s);
    }
    CHECK(alloc_hook::peak_bytes() - before <= budget);
  }
}

}  // TEST_SUITE

TEST_SUITE("properties: decomp") {

TEST_CASE("qr reconstructs with orthonormal Q and triangular R") {
  auto rng = stream(4);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = rng.index(1, 50);
    const std::size_t m = rng.index(n, 200);
    const auto a = oracle::random_dense(m, n, rng);
    const auto f = qr(a);
    CHECK(oracle::frobenius_diff(reconstruct(f), a) <= 1e-10 * std::max(1.0, oracle::frobenius(a)));
    CHECK(oracle::orthonormality_error(f.q) <= 1e-10);
    CHECK(is_upper_triangular(f.r));
  }
}

TEST_CASE("rank-1 updates match the updated product") {
  auto rng = stream(5);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t p = rng.index(1, 15);
    const std::size_t m = rng.index(p + 1, 40);
    const auto a = oracle::random_dense(m, p, rng);
    const auto f = qr(a);
    const Vector u = oracle::random_vector(m, rng);
    const Vector v = oracle::random_vector(p, rng);
    const auto g = qr_rank1_update(f, u, v);

    DenseMatrix want = a;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < p; ++j) want(i, j) += u[i] * v[j];
    }
    CHECK(oracle::frobenius_diff(reconstruct(g), want) <= 1e-10 * std::max(1.0, oracle::frobenius(want)));
    CHECK(oracle::orthonormality_error(g.q) <= 1e-10);
    CHECK(is_upper_triangular(g.r));
  }
}

TEST_CASE("singular values are invariant under orthonormal factors") {
  auto rng = stream(6);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = rng.index(1, 30);
    const std::size_t n = rng.index(1, 30);
    const auto a = oracle::random_dense(m, n, rng);
    const auto p = oracle::random_orthonormal(m, m, rng);
    const auto r = oracle::random_orthonormal(n, n, rng);
    const auto s = svd_small(a).sigma;
    const auto t = svd_small(oracle::matmul(oracle::matmul(p, a), r)).sigma;
    REQUIRE(s.size() == t.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s[i] - t[i]) <= 1e-10 * s[0]);
  }
}

TEST_CASE("transposing swaps the singular vectors") {
  auto rng = stream(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = rng.index(2, 25);
    const std::size_t n = rng.index(2, 25);
    const auto a = oracle::random_dense(m, n, rng);
    const auto f = svd_small(a);
    const auto g = svd_small(oracle::transpose(a));
    REQUIRE(f.rank() == g.rank());
    for (std::size_t j = 0; j < f.rank(); ++j) {
      CHECK(std::abs(f.sigma[j] - g.sigma[j]) <= 1e-10 * f.sigma[0]);
      // Vectors are only defined up to sign, and only for separated values.
      const double gap = std::min(j > 0 ? f.sigma[j - 1] - f.sigma[j] : INFINITY,
                                  j + 1 < f.rank() ? f.sigma[j] - f.sigma[j + 1] : INFINITY);
      if (gap < 1e-3 * f.sigma[0]) continue;
      double du = 0.0;
      double dv = 0.0;
      for (std::size_t i = 0; i < m; ++i) du += f.u(i, j) * g.v(i, j);
      for (std::size_t i = 0; i < n; ++i) dv += f.v(i, j) * g.u(i, j);
      CHECK(std::abs(std::abs(du) - 1.0) <= 1e-8);
      CHECK(du * dv > 0.0);
    }
  }
}

TEST_CASE("factorizations are deterministic") {
  auto rng = stream(8);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = oracle::random_dense(rng.index(1, 40), rng.index(1, 40), rng);
    CHECK(same_bits(svd_small(a), svd_small(a)));
    const auto b = oracle::random_dense(30, rng.index(1, 30), rng);
    CHECK(same_bits(qr(b).q, qr(b).q));
    CHECK(same_bits(qr(b).r, qr(b).r));
  }
}

}  // TEST_SUITE

TEST_SUITE("properties: rsvd") {

TEST_CASE("factors are orthonormal") {
  auto rng = stream(9);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t m = rng.index(3, 40);
    const std::size_t n = rng.index(3, 60);
    const std::size_t big_k = rng.index(2, std::min(m, n));
    const RsvdParams p{rng.index(1, big_k - 1), big_k, rng.index(0, 3), rng.bits()};
    const bool sparse = rng.coin(0.3);
    const AnyMatrix x = sparse ? AnyMatrix(oracle::random_sparse(m, n, 0.3, rng))
                               : AnyMatrix(oracle::random_dense(m, n, rng, 0.0, 1.0));
    const Vector mu = m <= n ? column_mean(x) : Vector::zeros(m);
    const auto r = shifted_rsvd(x, mu, p);
    CHECK(oracle::orthonormality_error(r.factors.u) <= 1e-8);
    CHECK(oracle::orthonormality_error(r.factors.v) <= 1e-8);
    CHECK(std::is_sorted(r.factors.sigma.rbegin(), r.factors.sigma.rend()));
  }
}

TEST_CASE("more power iterations do not increase the mean error") {
  auto rng = stream(10);
  std::vector<double> s(30);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::pow(0.85, double(i));
  const auto x = with_spectrum(30, 80, s, rng);
  const Vector mu = column_mean(x);
  const auto centered = oracle::shifted(x, mu);
  for (std::size_t k : {2, 5}) {
    double prev = INFINITY;
    for (std::size_t q = 0; q <= 4; ++q) {
      double mean = 0.0;
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto r = shifted_rsvd(x, mu, {k, 2 * k, q, seed});
        mean += oracle::spectral_norm(residual(centered, reconstruct(r))) / 30.0;
      }
      CHECK(mean <= prev * (1.0 + 1e-3));
      prev = mean;
    }
  }
}

TEST_CASE("estimated singular values never exceed the exact ones") {
  auto rng = stream(11);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = rng.index(6, 30);
    const std::size_t n = rng.index(m, 60);
    const auto x = oracle::random_dense(m, n, rng, 0.0, 1.0);
    const Vector mu = column_mean(x);
    const auto exact = oracle::singular_values(oracle::shifted(x, mu));
    const std::size_t k = rng.index(1, m / 2);
    for (std::size_t q = 3; q <= 5; ++q) {
      const auto r = shifted_rsvd(x, mu, {k, std::min(2 * k, m), q, rng.bits()});
      for (std::size_t i = 0; i < k; ++i) CHECK(r.factors.sigma[i] <= exact[i] * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("the seed alone determines the result") {
  auto rng = stream(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::random_dense(rng.index(4, 20), rng.index(20, 40), rng);
    const Vector mu = column_mean(x);
    const RsvdParams p{2, 4, rng.index(0, 2), rng.bits()};
    CHECK(same_bits(shifted_rsvd(x, mu, p).factors, shifted_rsvd(x, mu, p).factors));
    RsvdParams other = p;
    other.seed ^= 1;
    CHECK_FALSE(same_bits(shifted_rsvd(x, mu, p).factors, shifted_rsvd(x, mu, other).factors));
  }
}

}  // TEST_SUITE

TEST_SUITE("properties: pca") {

TEST_CASE("components project the centered data onto sigma V^T") {
  auto rng = stream(13);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t m = rng.index(3, 25);
    const std::size_t n = rng.index(m, 60);
    const auto x = oracle::random_dense(m, n, rng, -2.0, 5.0);
    const std::size_t k = rng.index(1, m - 1);
    const RsvdParams p{k, std::min(2 * k, m), rng.index(0, 2), rng.bits()};
    const auto model = fit_shifted(x, column_mean(x), p);
    const auto y =
        oracle::matmul(oracle::transpose(model.components), oracle::shifted(x, model.mean));
    DenseMatrix sv(k, n);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < n; ++j) sv(c, j) = model.sigma[c] * model.right_vectors(j, c);
    }
    CHECK(oracle::frobenius_diff(y, sv) <= 1e-10 * std::max(1.0, oracle::frobenius(sv)));
  }
}

TEST_CASE("centering lowers the error in aggregate") {
  auto rng = stream(14);
  double centered = 0.0;
  double plain = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = rng.index(20, 40);
    const std::size_t n = rng.index(60, 120);
    const auto x = oracle::random_dense(m, n, rng, 0.0, 1.0);
    const std::size_t k = rng.index(1, 10);
    const RsvdParams p{k, 2 * k, 0, rng.bits()};
    centered += reconstruction_errors(fit_shifted(x, column_mean(x), p), x).mse;
    plain += reconstruction_errors(fit_shifted(x, Vector::zeros(m), p), x).mse;
  }
  CHECK(centered < plain);
}

TEST_CASE("mse is the mean of the per-column errors") {
  auto rng = stream(15);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = rng.index(3, 20);
    const std::size_t n = rng.index(m, 50);
    const auto x = oracle::random_dense(m, n, rng);
    const auto report = reconstruction_errors(fit(x, {1, 2.0, rng.index(0, 2), rng.bits()}), x);
    const double mean = std::accumulate(report.per_column.begin(), report.per_column.end(), 0.0) / double(n);
    CHECK(std::abs(report.mse - mean) <= 1e-12 * std::max(mean, 1e-300));
  }
}

TEST_CASE("reconstruction is a projection") {
  auto rng = stream(16);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = rng.index(3, 20);
    const std::size_t n = rng.index(m, 50);
    const auto x = oracle::random_dense(m, n, rng);
    const auto model = fit(x, {rng.index(1, m / 2), 2.0, 1, rng.bits()});
    const auto once = inverse_transform(model, transform(model, x));
    const auto twice = inverse_transform(model, transform(model, once));
    CHECK(oracle::max_abs_diff(once, twice) <= 1e-10 * std::max(1.0, oracle::frobenius(once)));
  }
}

}  // TEST_SUITE

TEST_SUITE("properties: stats") {

TEST_CASE("sample moments fall within four standard errors") {
  struct Case {
    DistributionSpec spec;
    double mean;
    double variance;
    double fourth;  // central fourth moment
  };
  // Zipf(2.5) on 1..50 by direct summation.
  double norm = 0.0;
  double zipf_mean = 0.0;
  for (int r = 1; r <= 50; ++r) {
    norm += std::pow(r, -2.5);
    zipf_mean += r * std::pow(r, -2.5);
  }
  zipf_mean /= norm;
  double zipf_var = 0.0;
  double zipf_fourth = 0.0;
  for (int r = 1; r <= 50; ++r) {
    const double w = std::pow(r, -2.5) / norm;
    zipf_var += w * std::pow(r - zipf_mean, 2);
    zipf_fourth += w * std::pow(r - zipf_mean, 4);
  }
  const std::vector<Case> cases{
      {{Distribution::uniform, {-2.0, 4.0}, 200, 500, 1}, 1.0, 3.0, 9.0 * 9.0 / 5.0},
      {{Distribution::normal, {3.0, 0.5}, 200, 500, 2}, 3.0, 0.25, 3.0 * 0.0625},
      {{Distribution::poisson, {7.5}, 200, 500, 3}, 7.5, 7.5, 7.5 + 3.0 * 7.5 * 7.5},
      {{Distribution::zipf, {2.5, 50}, 200, 500, 4}, zipf_mean, zipf_var, zipf_fourth},
  };
  for (const auto& c : cases) {
    CAPTURE(to_string(c.spec.kind));
    const auto x = generate(c.spec);
    const double count = double(x.data().size());
    const double mean = std::accumulate(x.data().begin(), x.data().end(), 0.0) / count;
    double ss = 0.0;
    for (double v : x.data()) ss += (v - mean) * (v - mean);
    const double var = ss / (count - 1.0);
    CHECK(std::abs(mean - c.mean) <= 4.0 * std::sqrt(c.variance / count));
    const double var_se = std::sqrt((c.fourth - c.variance * c.variance) / count);
    CHECK(std::abs(var - c.variance) <= 4.0 * var_se);
  }
}

TEST_CASE("swapping the samples negates t") {
  auto rng = stream(17);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = rng.index(2, 40);
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform();
      b[i] = rng.uniform();
    }
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    CHECK(ab.t == -ba.t);
    CHECK(ab.p == ba.p);
    CHECK(ab.p >= 0.0);
    CHECK(ab.p <= 1.0);
  }
}

TEST_CASE("large-dof tail approaches the normal") {
  CHECK(std::abs(t_sf(1.96, 1000000) - 0.05) <= 1e-3);
}

}  // TEST_SUITE

TEST_SUITE("properties: io") {

TEST_CASE("csv and matrix market round trips are exact") {
  namespace fs = std::filesystem;
  auto rng = stream(18);
  const fs::path dir = fs::temp_directory_path() / ("srsvd-prop-" + std::to_string(rng.bits()));
  fs::create_directories(dir);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = rng.index(1, 30);
    const std::size_t n = rng.index(1, 30);
    DenseMatrix d(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d(i, j) = rng.coin(0.3) ? 0.0 : rng.uniform() * std::pow(10.0, rng.uniform(-300, 300));
      }
    }
    save_csv(dir / "d.csv", d);
    CHECK(same_bits(load_csv(dir / "d.csv"), d));
    const auto s = SparseMatrix::from_dense(d);
    save_mtx(dir / "s.mtx", s);
    CHECK(std::get<SparseMatrix>(load_mtx(dir / "s.mtx")) == s);
  }
  fs::remove_all(dir);
}

}  // TEST_SUITE
