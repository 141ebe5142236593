#include "srsvd/compare.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>

#include "srsvd/decomp.hpp"
#include "srsvd/error.hpp"
#include "srsvd/io.hpp"
#include "srsvd/pca.hpp"
#include "srsvd/random.hpp"

namespace srsvd {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::srsvd: return "srsvd";
    case Algorithm::rsvd: return "rsvd";
    case Algorithm::explicit_: return "explicit";
    case Algorithm::exact: return "exact";
  }
  return "unknown";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CellData {
  std::vector<double> mse_srsvd, mse_rsvd, mse_explicit, mse_exact;
  std::vector<double> cols_srsvd, cols_rsvd;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) { return std::isnan(v) ? "nan" : format_double(v); }

void validate(const CompareConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorCode::invalid_argument, what); };
  if (c.sources.empty()) bad("comparison needs at least one data source");
  if (c.ranks.empty()) bad("comparison needs at least one rank");
  if (c.power_iters.empty()) bad("comparison needs at least one power-iteration count");
  if (c.trials < 1) bad("comparison needs trials >= 1");
  if (!(c.oversample > 1.0)) bad("oversample factor must exceed 1");
}

std::pair<std::size_t, std::size_t> shape_of(const DataSource& s) {
  if (const auto* spec = std::get_if<DistributionSpec>(&s.data)) return {spec->rows, spec->cols};
  const MatrixView view(*std::get<std::shared_ptr<const AnyMatrix>>(s.data));
  return {view.rows(), view.cols()};
}

}  // namespace

ComparisonReport run_comparison(const CompareConfig& config) {
  validate(config);
  ComparisonReport report;
  report.config = config;
  for (const auto& s : config.sources) report.shapes.push_back(shape_of(s));

  const std::size_t n_ranks = config.ranks.size();
  const std::size_t n_q = config.power_iters.size();

  for (std::size_t src = 0; src < config.sources.size(); ++src) {
    const DataSource& source = config.sources[src];
    std::vector<CellData> cells(n_ranks * n_q);

    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_seed = derive_seed(config.seed, trial);

      std::shared_ptr<const AnyMatrix> data;
      if (const auto* spec = std::get_if<DistributionSpec>(&source.data)) {
        DistributionSpec seeded = *spec;
        seeded.seed = derive_seed(trial_seed, src);
        data = std::make_shared<const AnyMatrix>(generate(seeded));
      } else {
        data = std::get<std::shared_ptr<const AnyMatrix>>(source.data);
      }
      const MatrixView x(*data);
      const std::uint64_t hash = content_hash(x);
      const Vector mean = column_mean(x);
      const Vector no_shift = Vector::zeros(x.rows());

      const bool need_centered = config.with_explicit || config.with_exact;
      const std::optional<DenseMatrix> centered =
          need_centered ? std::optional<DenseMatrix>(densify(ShiftedOperator(x, mean)))
                        : std::nullopt;
      std::optional<SvdFactors> exact_full;
      std::chrono::nanoseconds exact_elapsed{0};
      if (config.with_exact) {
        const auto start = std::chrono::steady_clock::now();
        exact_full = svd_small(*centered);
        exact_elapsed = std::chrono::steady_clock::now() - start;
      }

      auto record = [&](std::size_t k, std::size_t q, Algorithm algo, const ErrorReport& e,
                        std::chrono::nanoseconds elapsed) {
        report.records.push_back({src, trial, trial_seed, hash, k, q, algo, e.mse, elapsed});
      };

      for (std::size_t ki = 0; ki < n_ranks; ++ki) {
        const std::size_t k = config.ranks[ki];
        const auto width =
            static_cast<std::size_t>(std::ceil(config.oversample * static_cast<double>(k)));
        for (std::size_t qi = 0; qi < n_q; ++qi) {
          const std::size_t q = config.power_iters[qi];
          const RsvdParams params{k, width, q, trial_seed};
          CellData& cell = cells[ki * n_q + qi];

          SvdResult shifted = shifted_rsvd(x, mean, params);
          const auto shifted_time = shifted.elapsed;
          const ErrorReport e_s = reconstruction_errors(model_from(std::move(shifted), mean), x);
          record(k, q, Algorithm::srsvd, e_s, shifted_time);

          SvdResult plain = shifted_rsvd(x, no_shift, params);
          const auto plain_time = plain.elapsed;
          const ErrorReport e_r = reconstruction_errors(model_from(std::move(plain), no_shift), x);
          record(k, q, Algorithm::rsvd, e_r, plain_time);

          cell.mse_srsvd.push_back(e_s.mse);
          cell.mse_rsvd.push_back(e_r.mse);
          append(cell.cols_srsvd, e_s.per_column);
          append(cell.cols_rsvd, e_r.per_column);

          if (config.with_explicit) {
            SvdResult r = rsvd(*centered, params);
            const auto t = r.elapsed;
            const ErrorReport e = reconstruction_errors(model_from(std::move(r), mean), x);
            record(k, q, Algorithm::explicit_, e, t);
            cell.mse_explicit.push_back(e.mse);
          }
          if (config.with_exact) {
            SvdResult r{exact_full->truncated(k), params, mean, exact_elapsed};
            const ErrorReport e = reconstruction_errors(model_from(std::move(r), mean), x);
            record(k, q, Algorithm::exact, e, exact_elapsed);
            cell.mse_exact.push_back(e.mse);
          }
        }
      }
    }

    for (std::size_t qi = 0; qi < n_q; ++qi) {
      SumSummary sum{src, config.power_iters[qi], 0.0, 0.0, 0.0, 0.0};
      for (std::size_t ki = 0; ki < n_ranks; ++ki) {
        const CellData& cell = cells[ki * n_q + qi];
        CellSummary s;
        s.source = src;
        s.rank = config.ranks[ki];
        s.power_iters = config.power_iters[qi];
        s.mean_srsvd = mean_of(cell.mse_srsvd);
        s.mean_rsvd = mean_of(cell.mse_rsvd);
        s.mean_explicit = mean_of(cell.mse_explicit);
        s.mean_exact = mean_of(cell.mse_exact);
        if (cell.mse_srsvd.size() >= 2) s.mse_test = paired_t_test(cell.mse_srsvd, cell.mse_rsvd);
        s.column_test = paired_t_test(cell.cols_srsvd, cell.cols_rsvd);
        const WinRate wr = win_rate(cell.cols_srsvd, cell.cols_rsvd);
        s.win_srsvd = wr.first;
        s.win_rsvd = wr.second;
        report.cells.push_back(s);

        sum.sum_srsvd += s.mean_srsvd;
        sum.sum_rsvd += s.mean_rsvd;
        sum.sum_explicit += s.mean_explicit;
        sum.sum_exact += s.mean_exact;
      }
      report.sums.push_back(sum);
    }
  }
  return report;
}

void write_report(std::ostream& out, const ComparisonReport& report) {
  const auto& cfg = report.config;
  out << "data,rows,cols,trial,seed,data_hash,k,q,algorithm,mse";
  if (cfg.record_timing) out << ",elapsed_ms";
  out << '\n';
  for (const auto& r : report.records) {
    out << cfg.sources[r.source].label << ',' << report.rows_of(r.source) << ','
        << report.cols_of(r.source) << ',' << r.trial << ',' << r.seed << ',' << hex(r.data_hash)
        << ',' << r.rank << ',' << r.power_iters << ',' << to_string(r.algorithm) << ','
        << num(r.mse);
    if (cfg.record_timing) {
      out << ',' << num(std::chrono::duration<double, std::milli>(r.elapsed).count());
    }
    out << '\n';
  }

  out << "# trials=" << cfg.trials << " seed=" << cfg.seed
      << " oversample=" << num(cfg.oversample) << '\n';
  out << "# cell,data,rows,cols,k,q,mean_mse_srsvd,mean_mse_rsvd,mean_mse_explicit,"
         "mean_mse_exact,t1,p1,t2,p2,win_srsvd,win_rsvd\n";
  for (const auto& c : report.cells) {
    out << "# cell," << cfg.sources[c.source].label << ',' << report.rows_of(c.source) << ','
        << report.cols_of(c.source) << ',' << c.rank << ',' << c.power_iters << ','
        << num(c.mean_srsvd) << ',' << num(c.mean_rsvd) << ',' << num(c.mean_explicit) << ','
        << num(c.mean_exact) << ',' << num(c.mse_test.t) << ',' << num(c.mse_test.p) << ','
        << num(c.column_test.t) << ',' << num(c.column_test.p) << ',' << num(c.win_srsvd)
        << ',' << num(c.win_rsvd) << '\n';
  }
  out << "# mse_sum,data,rows,cols,q,srsvd,rsvd,explicit,exact,difference\n";
  for (const auto& s : report.sums) {
    out << "# mse_sum," << cfg.sources[s.source].label << ',' << report.rows_of(s.source) << ','
        << report.cols_of(s.source) << ',' << s.power_iters << ',' << num(s.sum_srsvd) << ','
        << num(s.sum_rsvd) << ',' << num(s.sum_explicit) << ',' << num(s.sum_exact) << ','
        << num(s.difference()) << '\n';
  }
}

void write_figure(std::ostream& out, const ComparisonReport& report, std::string_view figure) {
  const auto& cfg = report.config;
  const std::size_t first_q = cfg.power_iters.front();

  if (figure == "1a") {
    out << "k,mse_srsvd,mse_rsvd\n";
    for (const auto& c : report.cells) {
      if (c.source != 0 || c.power_iters != first_q) continue;
      out << c.rank << ',' << num(c.mean_srsvd) << ',' << num(c.mean_rsvd) << '\n';
    }
  } else if (figure == "1b") {
    out << "n,mse_sum_srsvd,mse_sum_rsvd\n";
    for (const auto& s : report.sums) {
      if (s.power_iters != first_q) continue;
      out << report.cols_of(s.source) << ',' << num(s.sum_srsvd) << ',' << num(s.sum_rsvd) << '\n';
    }
  } else if (figure == "1c") {
    out << "distribution,mse_sum_srsvd,mse_sum_rsvd\n";
    for (const auto& s : report.sums) {
      if (s.power_iters != first_q) continue;
      out << cfg.sources[s.source].label << ',' << num(s.sum_srsvd) << ',' << num(s.sum_rsvd)
          << '\n';
    }
  } else if (figure == "1d") {
    if (!cfg.with_explicit) {
      fail(ErrorCode::invalid_argument, "figure 1d needs the explicit-centering runs");
    }
    out << "distribution,mse_sum_implicit,mse_sum_explicit\n";
    for (const auto& s : report.sums) {
      if (s.power_iters != first_q) continue;
      out << cfg.sources[s.source].label << ',' << num(s.sum_srsvd) << ','
          << num(s.sum_explicit) << '\n';
    }
  } else if (figure == "1e") {
    out << "q,mse_sum_srsvd,mse_sum_rsvd\n";
    for (const auto& s : report.sums) {
      if (s.source != 0) continue;
      out << s.power_iters << ',' << num(s.sum_srsvd) << ',' << num(s.sum_rsvd) << '\n';
    }
  } else if (figure == "1f") {
    out << "distribution,q,difference\n";
    for (const auto& s : report.sums) {
      out << cfg.sources[s.source].label << ',' << s.power_iters << ',' << num(s.difference())
          << '\n';
    }
  } else {
    fail(ErrorCode::invalid_argument,
         "unknown figure '" + std::string(figure) + "' (expected 1a, 1b, 1c, 1d, 1e or 1f)");
  }
}

}  // namespace srsvd
