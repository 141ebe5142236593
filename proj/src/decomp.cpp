#include "srsvd/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srsvd/error.hpp"

namespace srsvd {

namespace {

constexpr double kJacobiTolerance = 1e-12;
constexpr int kJacobiMaxSweeps = 30;

// Column-major scratch storage; columns are contiguous so the column
// operations below stream through memory.
struct Columns {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Columns(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
  double& at(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double at(std::size_t i, std::size_t j) const { return data[j * rows + i]; }

  static Columns from(const DenseMatrix& m) {
    Columns out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = m(i, j);
    }
    return out;
  }

  // Columns of m^T, i.e. the rows of m, copied contiguously.
  static Columns from_transpose(const DenseMatrix& m) {
    Columns out(m.cols(), m.rows());
    std::copy(m.data().begin(), m.data().end(), out.data.begin());
    return out;
  }

  DenseMatrix to_dense() const {
    DenseMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = at(i, j);
    }
    return out;
  }
};

// Four independent partial sums; the summation order is fixed, so results
// stay bitwise reproducible.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double norm2(const double* a, std::size_t n) {
  double scale = 0.0;
  double ssq = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    const double v = std::abs(a[i]);
    if (scale < v) {
      ssq = 1.0 + ssq * (scale / v) * (scale / v);
      scale = v;
    } else {
      ssq += (v / scale) * (v / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

// y -= s * x
void axpy_neg(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= s * x[i];
}

struct Householder {
  Columns q;
  DenseMatrix r;
};

Householder householder_qr(Columns w) {
  const std::size_t m = w.rows;
  const std::size_t p = w.cols;

  std::vector<std::vector<double>> reflectors(p);
  std::vector<double> betas(p, 0.0);

  for (std::size_t k = 0; k < p; ++k) {
    double* x = w.col(k) + k;
    const std::size_t len = m - k;
    const double norm = norm2(x, len);
    if (norm == 0.0) continue;

    const double alpha = x[0] >= 0.0 ? -norm : norm;
    std::vector<double> v(x, x + len);
    v[0] -= alpha;
    const double vtv = dot(v.data(), v.data(), len);
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;

    x[0] = alpha;
    std::fill(x + 1, x + len, 0.0);
    for (std::size_t j = k + 1; j < p; ++j) {
      double* c = w.col(j) + k;
      axpy_neg(beta * dot(v.data(), c, len), v.data(), c, len);
    }
    reflectors[k] = std::move(v);
    betas[k] = beta;
  }

  DenseMatrix r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) r(i, j) = w.at(i, j);
  }

  // Accumulate Q = H_0 ... H_{p-1} applied to the first p unit vectors.
  Columns q(m, p);
  for (std::size_t j = 0; j < p; ++j) q.at(j, j) = 1.0;
  for (std::size_t kk = p; kk-- > 0;) {
    if (betas[kk] == 0.0) continue;
    const auto& v = reflectors[kk];
    const std::size_t len = m - kk;
    // Columns before kk are still unit vectors with no support below row kk.
    for (std::size_t j = kk; j < p; ++j) {
      double* c = q.col(j) + kk;
      axpy_neg(betas[kk] * dot(v.data(), c, len), v.data(), c, len);
    }
  }
  return {std::move(q), std::move(r)};
}

struct Givens {
  double c;
  double s;
};

// [c s; -s c] [a; b] = [r; 0]
Givens givens(double a, double b) {
  if (b == 0.0) return {1.0, 0.0};
  const double r = std::hypot(a, b);
  return {a / r, b / r};
}

void rotate_rows(DenseMatrix& m, std::size_t i, Givens g) {
  auto top = m.row(i);
  auto bottom = m.row(i + 1);
  for (std::size_t c = 0; c < top.size(); ++c) {
    const double x = top[c];
    const double y = bottom[c];
    top[c] = g.c * x + g.s * y;
    bottom[c] = -g.s * x + g.c * y;
  }
}

void rotate_cols(Columns& m, std::size_t j, Givens g) {
  double* left = m.col(j);
  double* right = m.col(j + 1);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double x = left[r];
    const double y = right[r];
    left[r] = g.c * x + g.s * y;
    right[r] = -g.s * x + g.c * y;
  }
}

struct TallSvd {
  Columns u;                  // L x p
  std::vector<double> sigma;  // p, sorted nonincreasing
  Columns v;                  // p x p
};

// Makes column `j` of `u` a unit vector orthogonal to the columns listed in
// `fixed`. Tries the current content first, then unit vectors in order.
void complete_column(Columns& u, std::size_t j, const std::vector<std::size_t>& fixed) {
  const std::size_t len = u.rows;
  std::vector<double> cand(len);

  auto try_candidate = [&](const std::vector<double>& start) {
    cand = start;
    const double n0 = norm2(cand.data(), len);
    if (n0 == 0.0) return false;
    for (auto& e : cand) e /= n0;
    for (int pass = 0; pass < 2; ++pass) {
      for (auto f : fixed) axpy_neg(dot(u.col(f), cand.data(), len), u.col(f), cand.data(), len);
    }
    const double n = norm2(cand.data(), len);
    if (n < 0.5) return false;
    for (auto& e : cand) e /= n;
    std::copy(cand.begin(), cand.end(), u.col(j));
    return true;
  };

  if (try_candidate(std::vector<double>(u.col(j), u.col(j) + len))) return;
  std::vector<double> unit(len, 0.0);
  for (std::size_t e = 0; e < len; ++e) {
    unit[e] = 1.0;
    if (try_candidate(unit)) return;
    unit[e] = 0.0;
  }
  fail(ErrorCode::numeric, "svd: unable to complete an orthonormal basis");
}

// Hestenes iteration on the columns of `w` (L x p, L >= p).
TallSvd jacobi(Columns w) {
  const std::size_t len = w.rows;
  const std::size_t p = w.cols;
  Columns v(p, p);
  for (std::size_t j = 0; j < p; ++j) v.at(j, j) = 1.0;

  std::vector<double> sq(p);

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    // Squared norms are refreshed once per sweep and updated per rotation.
    for (std::size_t j = 0; j < p; ++j) sq[j] = dot(w.col(j), w.col(j), len);
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double alpha = sq[i];
        const double beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        double* wi = w.col(i);
        double* wj = w.col(j);
        const double gamma = dot(wi, wj, len);
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta)) continue;

        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t r = 0; r < len; ++r) {
          const double x = wi[r];
          const double y = wj[r];
          wi[r] = c * x - s * y;
          wj[r] = s * x + c * y;
        }
        double* vi = v.col(i);
        double* vj = v.col(j);
        for (std::size_t r = 0; r < p; ++r) {
          const double x = vi[r];
          const double y = vj[r];
          vi[r] = c * x - s * y;
          vj[r] = s * x + c * y;
        }
        sq[i] = std::max(alpha - t * gamma, 0.0);
        sq[j] = beta + t * gamma;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(p);
  for (std::size_t j = 0; j < p; ++j) norms[j] = norm2(w.col(j), len);
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  TallSvd out{Columns(len, p), std::vector<double>(p), Columns(p, p)};
  for (std::size_t k = 0; k < p; ++k) {
    const auto src = order[k];
    out.sigma[k] = norms[src];
    std::copy(w.col(src), w.col(src) + len, out.u.col(k));
    std::copy(v.col(src), v.col(src) + p, out.v.col(k));
  }

  const double sigma_max = p > 0 ? out.sigma[0] : 0.0;
  const double tiny =
      sigma_max * static_cast<double>(len) * std::numeric_limits<double>::epsilon();
  std::vector<std::size_t> clean;
  std::vector<std::size_t> degenerate;
  for (std::size_t k = 0; k < p; ++k) {
    if (sigma_max > 0.0 && out.sigma[k] > tiny) {
      double* col = out.u.col(k);
      for (std::size_t r = 0; r < len; ++r) col[r] /= out.sigma[k];
      clean.push_back(k);
    } else {
      degenerate.push_back(k);
    }
  }
  for (auto k : degenerate) {
    complete_column(out.u, k, clean);
    clean.push_back(k);
  }
  return out;
}

// SVD of a tall column set, reducing long inputs to their triangular factor.
TallSvd tall_svd(Columns w) {
  if (w.rows <= w.cols) return jacobi(std::move(w));
  auto [q, r] = householder_qr(std::move(w));
  TallSvd inner = jacobi(Columns::from(r));
  // U = Q U_r
  Columns u(q.rows, q.cols);
  for (std::size_t j = 0; j < inner.u.cols; ++j) {
    double* dst = u.col(j);
    for (std::size_t l = 0; l < q.cols; ++l) {
      const double s = inner.u.at(l, j);
      if (s == 0.0) continue;
      const double* src = q.col(l);
      for (std::size_t i = 0; i < q.rows; ++i) dst[i] += s * src[i];
    }
  }
  return {std::move(u), std::move(inner.sigma), std::move(inner.v)};
}

}  // namespace

SvdFactors SvdFactors::truncated(std::size_t k) const {
  if (k == 0 || k > rank()) {
    fail(ErrorCode::invalid_argument,
         "truncation rank " + std::to_string(k) + " outside [1, " + std::to_string(rank()) + "]");
  }
  return {u.left_columns(k), std::vector<double>(sigma.begin(), sigma.begin() + k),
          v.left_columns(k)};
}

QrFactors qr(const DenseMatrix& a) {
  if (a.rows() < a.cols()) {
    fail(ErrorCode::invalid_argument,
         "qr requires rows >= cols, got " + shape_str(a.rows(), a.cols()));
  }
  auto [q, r] = householder_qr(Columns::from(a));
  return {q.to_dense(), std::move(r)};
}

QrFactors qr_rank1_update(const QrFactors& f, const Vector& u, const Vector& v) {
  const std::size_t m = f.q.rows();
  const std::size_t p = f.q.cols();
  if (f.r.rows() != p || f.r.cols() != p) {
    fail(ErrorCode::dimension_mismatch, "qr_rank1_update: Q is " + shape_str(m, p) +
                                            " but R is " + shape_str(f.r.rows(), f.r.cols()));
  }
  if (u.size() != m || v.size() != p) {
    fail(ErrorCode::dimension_mismatch,
         "qr_rank1_update: u has length " + std::to_string(u.size()) + " (expected " +
             std::to_string(m) + "), v has length " + std::to_string(v.size()) +
             " (expected " + std::to_string(p) + ")");
  }

  // Augmented factors [Q q_new] and [R; 0], with u = [Q q_new] z.
  Columns qa(m, p + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) qa.at(i, j) = f.q(i, j);
  }
  std::vector<double> z(p + 1, 0.0);
  std::vector<double> residual(u.values().begin(), u.values().end());
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < p; ++j) {
      const double c = dot(qa.col(j), residual.data(), m);
      z[j] += c;
      axpy_neg(c, qa.col(j), residual.data(), m);
    }
  }
  const double u_norm = norm2(u.values().data(), m);
  const double rho = norm2(residual.data(), m);
  // A residual at rounding level means u already lies in range(Q); the extra
  // column then stays zero and the rotations below never mix it in.
  if (rho > 64.0 * std::numeric_limits<double>::epsilon() * u_norm) {
    z[p] = rho;
    double* extra = qa.col(p);
    for (std::size_t i = 0; i < m; ++i) extra[i] = residual[i] / rho;
  }

  DenseMatrix ra(p + 1, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) ra(i, j) = f.r(i, j);
  }

  // Rotate z onto the first axis; R becomes upper Hessenberg.
  for (std::size_t i = p; i-- > 0;) {
    const Givens g = givens(z[i], z[i + 1]);
    z[i] = g.c * z[i] + g.s * z[i + 1];
    z[i + 1] = 0.0;
    rotate_rows(ra, i, g);
    rotate_cols(qa, i, g);
  }
  for (std::size_t j = 0; j < p; ++j) ra(0, j) += z[0] * v[j];

  // Chase the subdiagonal back out.
  for (std::size_t i = 0; i < p; ++i) {
    const Givens g = givens(ra(i, i), ra(i + 1, i));
    rotate_rows(ra, i, g);
    rotate_cols(qa, i, g);
    ra(i + 1, i) = 0.0;
  }

  DenseMatrix q(m, p);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) q(i, j) = qa.at(i, j);
  }
  DenseMatrix r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) r(i, j) = ra(i, j);
  }
  return {std::move(q), std::move(r)};
}

DenseMatrix reconstruct(const QrFactors& f) { return multiply(f.q, f.r); }

DenseMatrix reconstruct(const SvdFactors& f) {
  DenseMatrix us = f.u;
  for (std::size_t i = 0; i < us.rows(); ++i) {
    auto row = us.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= f.sigma[j];
  }
  return multiply(us, f.v.transpose());
}

SvdFactors svd_small(const DenseMatrix& a) {
  for (double x : a.data()) {
    if (!std::isfinite(x)) fail(ErrorCode::numeric, "svd_small: non-finite input");
  }
  const bool tall = a.rows() >= a.cols();
  TallSvd t = tall_svd(tall ? Columns::from(a) : Columns::from_transpose(a));

  SvdFactors out{tall ? t.u.to_dense() : t.v.to_dense(), std::move(t.sigma),
                 tall ? t.v.to_dense() : t.u.to_dense()};

  // Magnitudes within a relative 1e-12 of the column maximum count as tied,
  // so rounding cannot flip which entry decides the sign.
  for (std::size_t j = 0; j < out.rank(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < out.u.rows(); ++i) best = std::max(best, std::abs(out.u(i, j)));
    std::size_t arg = 0;
    while (std::abs(out.u(arg, j)) < best * (1.0 - 1e-12)) ++arg;
    if (out.u(arg, j) < 0.0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, j) = -out.u(i, j);
      for (std::size_t i = 0; i < out.v.rows(); ++i) out.v(i, j) = -out.v(i, j);
    }
  }
  return out;
}

SvdFactors svd_exact_truncated(const DenseMatrix& a, std::size_t k) {
  const std::size_t r = std::min(a.rows(), a.cols());
  if (k == 0 || k > r) {
    fail(ErrorCode::invalid_argument, "svd_exact_truncated: k = " + std::to_string(k) +
                                          " outside [1, " + std::to_string(r) + "]");
  }
  return svd_small(a).truncated(k);
}

}  // namespace srsvd
