#include "srsvd/pca.hpp"

#include <algorithm>
#include <cmath>

#include "srsvd/error.hpp"

namespace srsvd {

RsvdParams PcaOptions::params() const {
  if (!(oversample > 1.0)) {
    fail(ErrorCode::invalid_argument, "oversample factor must exceed 1");
  }
  const auto width = static_cast<std::size_t>(std::ceil(oversample * static_cast<double>(components)));
  return {components, width, power_iters, seed};
}

PcaModel model_from(SvdResult result, Vector mean) {
  if (mean.size() != result.factors.u.rows()) {
    fail(ErrorCode::dimension_mismatch, "mean length " + std::to_string(mean.size()) +
                                            " does not match " +
                                            std::to_string(result.factors.u.rows()) + " rows");
  }
  return {std::move(mean), std::move(result.factors.u), std::move(result.factors.sigma),
          std::move(result.factors.v), result.params};
}

PcaModel fit_shifted(MatrixView x, const Vector& shift, const RsvdParams& params) {
  return model_from(shifted_rsvd(x, shift, params), shift);
}

PcaModel fit(MatrixView x, const PcaOptions& options) {
  const RsvdParams params = options.params();
  return fit_shifted(x, column_mean(x), params);
}

DenseMatrix transform(const PcaModel& model, MatrixView x) {
  if (x.rows() != model.components.rows()) {
    fail(ErrorCode::dimension_mismatch,
         "transform: model has " + std::to_string(model.components.rows()) +
             " variables, data is " + shape_str(x.rows(), x.cols()));
  }
  return project(ShiftedOperator(x, model.mean), model.components);
}

DenseMatrix inverse_transform(const PcaModel& model, const DenseMatrix& y) {
  if (y.rows() != model.rank()) {
    fail(ErrorCode::dimension_mismatch, "inverse_transform: expected " +
                                            std::to_string(model.rank()) + " rows, got " +
                                            shape_str(y.rows(), y.cols()));
  }
  DenseMatrix out = multiply(model.components, y);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double mu = model.mean[i];
    for (auto& v : out.row(i)) v += mu;
  }
  return out;
}

ErrorReport reconstruction_errors(const PcaModel& model, MatrixView x) {
  const DenseMatrix y = transform(model, x);
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  const std::size_t k = model.rank();

  ErrorReport report;
  report.per_column.assign(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    // Row i of x - mean 1^T - U Y.
    if (const auto* d = x.dense()) {
      std::copy(d->row(i).begin(), d->row(i).end(), row.begin());
    } else {
      std::fill(row.begin(), row.end(), 0.0);
      const auto& s = *x.sparse();
      for (std::size_t p = s.row_ptr()[i]; p < s.row_ptr()[i + 1]; ++p) {
        row[s.col_idx()[p]] = s.values()[p];
      }
    }
    const double mu = model.mean[i];
    for (auto& v : row) v -= mu;
    for (std::size_t c = 0; c < k; ++c) {
      const double u = model.components(i, c);
      if (u == 0.0) continue;
      auto yr = y.row(c);
      for (std::size_t j = 0; j < n; ++j) row[j] -= u * yr[j];
    }
    for (std::size_t j = 0; j < n; ++j) report.per_column[j] += row[j] * row[j];
  }

  double total = 0.0;
  for (double e : report.per_column) total += e;
  report.mse = total / static_cast<double>(n);
  return report;
}

WinRate win_rate(const std::vector<double>& first, const std::vector<double>& second) {
  if (first.size() != second.size() || first.empty()) {
    fail(ErrorCode::dimension_mismatch, "win_rate: error lists have lengths " +
                                            std::to_string(first.size()) + " and " +
                                            std::to_string(second.size()));
  }
  std::size_t a_wins = 0;
  std::size_t b_wins = 0;
  for (std::size_t j = 0; j < first.size(); ++j) {
    const double a = first[j];
    const double b = second[j];
    if (std::abs(a - b) <= 1e-15 * std::max(std::abs(a), std::abs(b))) continue;
    if (a < b) {
      ++a_wins;
    } else {
      ++b_wins;
    }
  }
  const auto n = static_cast<double>(first.size());
  return {static_cast<double>(a_wins) / n, static_cast<double>(b_wins) / n};
}

WinRate win_rate(const ErrorReport& first, const ErrorReport& second) {
  return win_rate(first.per_column, second.per_column);
}

}  // namespace srsvd
