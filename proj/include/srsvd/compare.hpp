#pragma once

// Paired comparison of the mean-shifted randomized SVD against the plain one.
//
// For every trial the data is produced once, then for each (k, q) cell both
// algorithms run on that same matrix with the same seed; only the shift
// differs. Errors are always measured against the original data.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "srsvd/matrix.hpp"
#include "srsvd/stats.hpp"

namespace srsvd {

enum class Algorithm {
  srsvd,      // shifted randomized SVD with mu = column mean
  rsvd,       // randomized SVD with mu = 0
  explicit_,  // randomized SVD of the explicitly centered matrix
  exact,      // deterministic truncated SVD of the centered matrix
};

std::string_view to_string(Algorithm a);

struct DataSource {
  std::string label;
  // A generator is re-seeded per trial; a fixed matrix is reused by all trials.
  std::variant<DistributionSpec, std::shared_ptr<const AnyMatrix>> data;
};

struct CompareConfig {
  std::vector<DataSource> sources;
  std::vector<std::size_t> ranks;
  std::vector<std::size_t> power_iters{0};
  std::size_t trials = 30;
  std::uint64_t seed = 0;
  double oversample = 2.0;
  bool with_explicit = false;
  bool with_exact = false;
  bool record_timing = false;
};

struct TrialRecord {
  std::size_t source = 0;  // index into CompareConfig::sources
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t data_hash = 0;
  std::size_t rank = 0;
  std::size_t power_iters = 0;
  Algorithm algorithm = Algorithm::srsvd;
  double mse = 0.0;
  std::chrono::nanoseconds elapsed{0};
};

struct CellSummary {
  std::size_t source = 0;
  std::size_t rank = 0;
  std::size_t power_iters = 0;
  double mean_srsvd = 0.0;
  double mean_rsvd = 0.0;
  double mean_explicit = 0.0;  // NaN unless requested
  double mean_exact = 0.0;     // NaN unless requested
  TTestResult mse_test;        // H0: equal MSE, paired over trials
  TTestResult column_test;     // H0: equal per-column errors, pooled over trials
  double win_srsvd = 0.0;
  double win_rsvd = 0.0;
};

// Sums over the rank list of the per-cell mean MSE, per (source, q).
struct SumSummary {
  std::size_t source = 0;
  std::size_t power_iters = 0;
  double sum_srsvd = 0.0;
  double sum_rsvd = 0.0;
  double sum_explicit = 0.0;
  double sum_exact = 0.0;

  double difference() const { return sum_srsvd - sum_rsvd; }
};

struct ComparisonReport {
  CompareConfig config;
  std::size_t rows_of(std::size_t source) const { return shapes.at(source).first; }
  std::size_t cols_of(std::size_t source) const { return shapes.at(source).second; }

  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  std::vector<TrialRecord> records;
  std::vector<CellSummary> cells;
  std::vector<SumSummary> sums;
};

// Throws on the first failing trial; no partial report is produced.
ComparisonReport run_comparison(const CompareConfig& config);

// Header row, one line per trial record, aggregates in a trailing '#' block.
void write_report(std::ostream& out, const ComparisonReport& report);

// Plot-ready CSV for one figure panel: "1a" (k, mse), "1b" (n, mse_sum),
// "1c" / "1d" (distribution, mse_sum), "1e" (q, mse_sum), "1f" (q, difference).
void write_figure(std::ostream& out, const ComparisonReport& report, std::string_view figure);

}  // namespace srsvd
