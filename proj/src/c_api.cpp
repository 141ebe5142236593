#include "srsvd/srsvd.h"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "srsvd/compare.hpp"
#include "srsvd/cooc.hpp"
#include "srsvd/error.hpp"
#include "srsvd/io.hpp"
#include "srsvd/pca.hpp"
#include "srsvd/rsvd.hpp"
#include "srsvd/stats.hpp"

struct srsvd_matrix {
  srsvd::AnyMatrix m;
};

struct srsvd_result {
  srsvd::SvdResult r;
};

struct srsvd_pca_model {
  srsvd::PcaModel m;
};

struct srsvd_compare {
  srsvd::CompareConfig config;
};

struct srsvd_report {
  srsvd::ComparisonReport r;
};

namespace {

thread_local std::string last_error;

srsvd_status status_of(srsvd::ErrorCode code) {
  switch (code) {
    case srsvd::ErrorCode::invalid_argument: return SRSVD_ERR_INVALID_ARGUMENT;
    case srsvd::ErrorCode::dimension_mismatch: return SRSVD_ERR_DIMENSION;
    case srsvd::ErrorCode::parse: return SRSVD_ERR_PARSE;
    case srsvd::ErrorCode::io: return SRSVD_ERR_IO;
    case srsvd::ErrorCode::numeric: return SRSVD_ERR_NUMERIC;
  }
  return SRSVD_ERR_INTERNAL;
}

srsvd_status failure(srsvd_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
srsvd_status guarded(F&& body) {
  try {
    body();
    return SRSVD_OK;
  } catch (const srsvd::Error& e) {
    return failure(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return failure(SRSVD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return failure(SRSVD_ERR_INTERNAL, e.what());
  } catch (...) {
    return failure(SRSVD_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) srsvd::fail(srsvd::ErrorCode::invalid_argument, std::string(name) + " is null");
}

void copy_out(std::span<const double> values, double* out, std::size_t capacity) {
  require(out, "output buffer");
  if (capacity < values.size()) {
    srsvd::fail(srsvd::ErrorCode::dimension_mismatch,
                "output buffer holds " + std::to_string(capacity) + " values, " +
                    std::to_string(values.size()) + " needed");
  }
  std::copy(values.begin(), values.end(), out);
}

srsvd::FileFormat format_of(srsvd_format f) {
  switch (f) {
    case SRSVD_FORMAT_AUTO: return srsvd::FileFormat::automatic;
    case SRSVD_FORMAT_CSV: return srsvd::FileFormat::csv;
    case SRSVD_FORMAT_MTX: return srsvd::FileFormat::mtx;
  }
  srsvd::fail(srsvd::ErrorCode::invalid_argument, "unknown file format");
}

srsvd::DistributionSpec spec_of(const srsvd_distribution_spec* spec) {
  require(spec, "distribution spec");
  srsvd::DistributionSpec out;
  switch (spec->kind) {
    case SRSVD_DIST_UNIFORM: out.kind = srsvd::Distribution::uniform; break;
    case SRSVD_DIST_NORMAL: out.kind = srsvd::Distribution::normal; break;
    case SRSVD_DIST_ZIPF: out.kind = srsvd::Distribution::zipf; break;
    case SRSVD_DIST_POISSON: out.kind = srsvd::Distribution::poisson; break;
    case SRSVD_DIST_LOWRANK: out.kind = srsvd::Distribution::lowrank; break;
    default: srsvd::fail(srsvd::ErrorCode::invalid_argument, "unknown distribution");
  }
  if (spec->parameter_count > 4) {
    srsvd::fail(srsvd::ErrorCode::invalid_argument, "at most 4 distribution parameters");
  }
  out.parameters.assign(spec->parameters, spec->parameters + spec->parameter_count);
  out.rows = spec->rows;
  out.cols = spec->cols;
  out.seed = spec->seed;
  return out;
}

srsvd::RsvdParams params_of(const srsvd_params* p) {
  require(p, "params");
  return {p->rank, p->sketch_width, p->power_iters, p->seed};
}

srsvd_params params_to_c(const srsvd::RsvdParams& p) {
  return {p.rank, p.sketch_width, p.power_iters, p.seed};
}

srsvd::Vector shift_of(const srsvd::AnyMatrix& x, srsvd_shift_mode mode, const double* shift,
                       std::size_t length) {
  const srsvd::MatrixView view(x);
  switch (mode) {
    case SRSVD_SHIFT_NONE: return srsvd::Vector::zeros(view.rows());
    case SRSVD_SHIFT_MEAN: return srsvd::column_mean(view);
    case SRSVD_SHIFT_VECTOR:
      if (length != view.rows()) {
        srsvd::fail(srsvd::ErrorCode::dimension_mismatch,
                    "shift has " + std::to_string(length) + " entries, matrix has " +
                        std::to_string(view.rows()) + " rows");
      }
      if (length > 0) require(shift, "shift");
      return srsvd::Vector(std::vector<double>(shift, shift + length));
  }
  srsvd::fail(srsvd::ErrorCode::invalid_argument, "unknown shift mode");
}

srsvd_t_test t_test_to_c(const srsvd::TTestResult& t) {
  return {t.t, t.dof, t.p, t.degenerate ? 1 : 0};
}

template <class Write>
void write_to(const char* path, Write&& write) {
  require(path, "path");
  if (std::string(path) == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) srsvd::fail(srsvd::ErrorCode::io, std::string("cannot open '") + path + "' for writing");
  write(out);
  out.flush();
  if (!out) srsvd::fail(srsvd::ErrorCode::io, std::string("write error on '") + path + "'");
}

}  // namespace

extern "C" {

const char* srsvd_version(void) { return "0.1.0"; }

const char* srsvd_last_error(void) { return last_error.c_str(); }

const char* srsvd_status_name(srsvd_status status) {
  switch (status) {
    case SRSVD_OK: return "ok";
    case SRSVD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SRSVD_ERR_DIMENSION: return "dimension mismatch";
    case SRSVD_ERR_PARSE: return "parse error";
    case SRSVD_ERR_IO: return "i/o error";
    case SRSVD_ERR_NUMERIC: return "numeric error";
    case SRSVD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

srsvd_status srsvd_matrix_from_dense(size_t rows, size_t cols, const double* data,
                                     srsvd_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(data, "data");
    std::vector<double> values(data, data + rows * cols);
    *out = new srsvd_matrix{srsvd::DenseMatrix(rows, cols, std::move(values))};
  });
}

srsvd_status srsvd_matrix_from_triplets(size_t rows, size_t cols, size_t count,
                                        const size_t* row_idx, const size_t* col_idx,
                                        const double* values, srsvd_matrix** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) {
      require(row_idx, "row indices");
      require(col_idx, "column indices");
      require(values, "values");
    }
    std::vector<srsvd::Triplet> triplets(count);
    for (std::size_t i = 0; i < count; ++i) triplets[i] = {row_idx[i], col_idx[i], values[i]};
    *out = new srsvd_matrix{srsvd::SparseMatrix::from_triplets(rows, cols, std::move(triplets))};
  });
}

srsvd_status srsvd_matrix_load(const char* path, srsvd_format format, srsvd_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = new srsvd_matrix{srsvd::load_matrix(path, format_of(format))};
  });
}

srsvd_status srsvd_matrix_save(const srsvd_matrix* m, const char* path, srsvd_format format) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    srsvd::save_matrix(path, m->m, format_of(format));
  });
}

srsvd_status srsvd_matrix_generate(const srsvd_distribution_spec* spec, srsvd_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = new srsvd_matrix{srsvd::generate(spec_of(spec))};
  });
}

void srsvd_matrix_free(srsvd_matrix* m) { delete m; }

size_t srsvd_matrix_rows(const srsvd_matrix* m) {
  return m ? srsvd::MatrixView(m->m).rows() : 0;
}

size_t srsvd_matrix_cols(const srsvd_matrix* m) {
  return m ? srsvd::MatrixView(m->m).cols() : 0;
}

int srsvd_matrix_is_sparse(const srsvd_matrix* m) {
  return m && std::holds_alternative<srsvd::SparseMatrix>(m->m) ? 1 : 0;
}

size_t srsvd_matrix_nnz(const srsvd_matrix* m) {
  if (!m) return 0;
  if (const auto* s = std::get_if<srsvd::SparseMatrix>(&m->m)) return s->nnz();
  const auto& d = std::get<srsvd::DenseMatrix>(m->m);
  return d.rows() * d.cols();
}

uint64_t srsvd_matrix_hash(const srsvd_matrix* m) {
  return m ? srsvd::content_hash(m->m) : 0;
}

srsvd_status srsvd_matrix_to_dense(const srsvd_matrix* m, double* out, size_t capacity) {
  return guarded([&] {
    require(m, "matrix");
    if (const auto* s = std::get_if<srsvd::SparseMatrix>(&m->m)) {
      copy_out(s->to_dense().data(), out, capacity);
    } else {
      copy_out(std::get<srsvd::DenseMatrix>(m->m).data(), out, capacity);
    }
  });
}

srsvd_status srsvd_matrix_column_mean(const srsvd_matrix* m, double* out, size_t capacity) {
  return guarded([&] {
    require(m, "matrix");
    copy_out(srsvd::column_mean(m->m).values(), out, capacity);
  });
}

srsvd_status srsvd_vector_load(const char* path, double** out, size_t* length) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    require(length, "length");
    const auto values = srsvd::load_vector_csv(path);
    auto* buffer = static_cast<double*>(std::malloc(values.size() * sizeof(double)));
    if (!buffer) throw std::bad_alloc();
    std::copy(values.begin(), values.end(), buffer);
    *out = buffer;
    *length = values.size();
  });
}

srsvd_status srsvd_vector_save(const char* path, const double* values, size_t length) {
  return guarded([&] {
    require(path, "path");
    if (length > 0) require(values, "values");
    srsvd::save_vector_csv(path, std::vector<double>(values, values + length));
  });
}

void srsvd_free(void* p) { std::free(p); }

srsvd_status srsvd_params_make(size_t rank, double oversample, size_t power_iters, uint64_t seed,
                               srsvd_params* out) {
  return guarded([&] {
    require(out, "out");
    *out = params_to_c(srsvd::PcaOptions{rank, oversample, power_iters, seed}.params());
  });
}

srsvd_status srsvd_factorize(const srsvd_matrix* x, srsvd_shift_mode mode, const double* shift,
                             size_t shift_length, const srsvd_params* params,
                             srsvd_result** out) {
  return guarded([&] {
    require(x, "matrix");
    require(out, "out");
    const auto mu = shift_of(x->m, mode, shift, shift_length);
    *out = new srsvd_result{srsvd::shifted_rsvd(x->m, mu, params_of(params))};
  });
}

void srsvd_result_free(srsvd_result* r) { delete r; }

size_t srsvd_result_rank(const srsvd_result* r) { return r ? r->r.factors.rank() : 0; }

size_t srsvd_result_rows(const srsvd_result* r) { return r ? r->r.factors.u.rows() : 0; }

size_t srsvd_result_cols(const srsvd_result* r) { return r ? r->r.factors.v.rows() : 0; }

srsvd_params srsvd_result_params(const srsvd_result* r) {
  return r ? params_to_c(r->r.params) : srsvd_params{0, 0, 0, 0};
}

double srsvd_result_elapsed_seconds(const srsvd_result* r) {
  return r ? std::chrono::duration<double>(r->r.elapsed).count() : 0.0;
}

srsvd_status srsvd_result_sigma(const srsvd_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r, "result");
    copy_out(r->r.factors.sigma, out, capacity);
  });
}

srsvd_status srsvd_result_u(const srsvd_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r, "result");
    copy_out(r->r.factors.u.data(), out, capacity);
  });
}

srsvd_status srsvd_result_v(const srsvd_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r, "result");
    copy_out(r->r.factors.v.data(), out, capacity);
  });
}

srsvd_status srsvd_result_shift(const srsvd_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r, "result");
    copy_out(r->r.shift.values(), out, capacity);
  });
}

srsvd_status srsvd_result_reconstruct(const srsvd_result* r, double* out, size_t capacity) {
  return guarded([&] {
    require(r, "result");
    copy_out(srsvd::reconstruct(r->r).data(), out, capacity);
  });
}

srsvd_status srsvd_result_save_bundle(const srsvd_result* r, const char* dir) {
  return guarded([&] {
    require(r, "result");
    require(dir, "directory");
    srsvd::save_bundle(dir, r->r);
  });
}

srsvd_status srsvd_error_bound(size_t m, size_t k, size_t q, double sigma_k_plus_1,
                               double* out) {
  return guarded([&] {
    require(out, "out");
    *out = srsvd::error_bound(m, k, q, sigma_k_plus_1);
  });
}

srsvd_status srsvd_pca_fit(const srsvd_matrix* x, srsvd_shift_mode mode, const double* shift,
                           size_t shift_length, const srsvd_params* params,
                           srsvd_pca_model** out) {
  return guarded([&] {
    require(x, "matrix");
    require(out, "out");
    auto mu = shift_of(x->m, mode, shift, shift_length);
    *out = new srsvd_pca_model{srsvd::fit_shifted(x->m, mu, params_of(params))};
  });
}

srsvd_status srsvd_pca_load(const char* dir, srsvd_pca_model** out) {
  return guarded([&] {
    require(dir, "directory");
    require(out, "out");
    *out = new srsvd_pca_model{srsvd::load_bundle(dir)};
  });
}

srsvd_status srsvd_pca_save(const srsvd_pca_model* model, const char* dir) {
  return guarded([&] {
    require(model, "model");
    require(dir, "directory");
    srsvd::save_bundle(dir, model->m);
  });
}

void srsvd_pca_free(srsvd_pca_model* model) { delete model; }

size_t srsvd_pca_rank(const srsvd_pca_model* model) { return model ? model->m.rank() : 0; }

size_t srsvd_pca_rows(const srsvd_pca_model* model) { return model ? model->m.mean.size() : 0; }

srsvd_status srsvd_pca_mean(const srsvd_pca_model* model, double* out, size_t capacity) {
  return guarded([&] {
    require(model, "model");
    copy_out(model->m.mean.values(), out, capacity);
  });
}

srsvd_status srsvd_pca_sigma(const srsvd_pca_model* model, double* out, size_t capacity) {
  return guarded([&] {
    require(model, "model");
    copy_out(model->m.sigma, out, capacity);
  });
}

srsvd_status srsvd_pca_transform(const srsvd_pca_model* model, const srsvd_matrix* x,
                                 double* out, size_t capacity) {
  return guarded([&] {
    require(model, "model");
    require(x, "matrix");
    copy_out(srsvd::transform(model->m, x->m).data(), out, capacity);
  });
}

srsvd_status srsvd_pca_errors(const srsvd_pca_model* model, const srsvd_matrix* x,
                              double* per_column, size_t capacity, double* mse) {
  return guarded([&] {
    require(model, "model");
    require(x, "matrix");
    require(mse, "mse");
    const auto report = srsvd::reconstruction_errors(model->m, x->m);
    if (per_column) copy_out(report.per_column, per_column, capacity);
    *mse = report.mse;
  });
}

srsvd_status srsvd_paired_t_test(const double* a, const double* b, size_t n, srsvd_t_test* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = t_test_to_c(srsvd::paired_t_test({a, n}, {b, n}));
  });
}

double srsvd_t_sf(double t, size_t dof) {
  try {
    return srsvd::t_sf(t, dof);
  } catch (const std::exception& e) {
    last_error = e.what();
    return std::nan("");
  }
}

srsvd_status srsvd_compare_create(srsvd_compare** out) {
  return guarded([&] {
    require(out, "out");
    *out = new srsvd_compare{};
  });
}

void srsvd_compare_free(srsvd_compare* c) { delete c; }

srsvd_status srsvd_compare_add_generated(srsvd_compare* c, const char* label,
                                         const srsvd_distribution_spec* spec) {
  return guarded([&] {
    require(c, "compare");
    auto s = spec_of(spec);
    s.resolved_parameters();  // reject bad parameters now rather than mid-run
    std::string name = label ? label : std::string(srsvd::to_string(s.kind));
    c->config.sources.push_back({std::move(name), std::move(s)});
  });
}

srsvd_status srsvd_compare_add_matrix(srsvd_compare* c, const char* label,
                                      const srsvd_matrix* m) {
  return guarded([&] {
    require(c, "compare");
    require(m, "matrix");
    c->config.sources.push_back(
        {label ? label : "matrix", std::make_shared<const srsvd::AnyMatrix>(m->m)});
  });
}

srsvd_status srsvd_compare_set_ranks(srsvd_compare* c, const size_t* ranks, size_t count) {
  return guarded([&] {
    require(c, "compare");
    if (count > 0) require(ranks, "ranks");
    c->config.ranks.assign(ranks, ranks + count);
  });
}

srsvd_status srsvd_compare_set_power_iters(srsvd_compare* c, const size_t* qs, size_t count) {
  return guarded([&] {
    require(c, "compare");
    if (count > 0) require(qs, "power iterations");
    c->config.power_iters.assign(qs, qs + count);
  });
}

srsvd_status srsvd_compare_set_trials(srsvd_compare* c, size_t trials) {
  return guarded([&] {
    require(c, "compare");
    c->config.trials = trials;
  });
}

srsvd_status srsvd_compare_set_seed(srsvd_compare* c, uint64_t seed) {
  return guarded([&] {
    require(c, "compare");
    c->config.seed = seed;
  });
}

srsvd_status srsvd_compare_set_oversample(srsvd_compare* c, double oversample) {
  return guarded([&] {
    require(c, "compare");
    c->config.oversample = oversample;
  });
}

srsvd_status srsvd_compare_set_modes(srsvd_compare* c, int with_explicit, int with_exact,
                                     int record_timing) {
  return guarded([&] {
    require(c, "compare");
    c->config.with_explicit = with_explicit != 0;
    c->config.with_exact = with_exact != 0;
    c->config.record_timing = record_timing != 0;
  });
}

srsvd_status srsvd_compare_run(const srsvd_compare* c, srsvd_report** out) {
  return guarded([&] {
    require(c, "compare");
    require(out, "out");
    *out = new srsvd_report{srsvd::run_comparison(c->config)};
  });
}

void srsvd_report_free(srsvd_report* r) { delete r; }

size_t srsvd_report_record_count(const srsvd_report* r) { return r ? r->r.records.size() : 0; }

size_t srsvd_report_cell_count(const srsvd_report* r) { return r ? r->r.cells.size() : 0; }

srsvd_status srsvd_report_cell(const srsvd_report* r, size_t index, srsvd_cell* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    if (index >= r->r.cells.size()) {
      srsvd::fail(srsvd::ErrorCode::invalid_argument, "cell index out of range");
    }
    const auto& c = r->r.cells[index];
    *out = {c.source,
            c.rank,
            c.power_iters,
            c.mean_srsvd,
            c.mean_rsvd,
            c.mean_explicit,
            c.mean_exact,
            t_test_to_c(c.mse_test),
            t_test_to_c(c.column_test),
            c.win_srsvd,
            c.win_rsvd};
  });
}

size_t srsvd_report_sum_count(const srsvd_report* r) { return r ? r->r.sums.size() : 0; }

srsvd_status srsvd_report_sum(const srsvd_report* r, size_t index, srsvd_sum* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    if (index >= r->r.sums.size()) {
      srsvd::fail(srsvd::ErrorCode::invalid_argument, "sum index out of range");
    }
    const auto& s = r->r.sums[index];
    *out = {s.source, s.power_iters, s.sum_srsvd, s.sum_rsvd, s.sum_explicit, s.sum_exact};
  });
}

srsvd_status srsvd_report_write(const srsvd_report* r, const char* path) {
  return guarded([&] {
    require(r, "report");
    write_to(path, [&](std::ostream& out) { srsvd::write_report(out, r->r); });
  });
}

srsvd_status srsvd_report_write_figure(const srsvd_report* r, const char* figure,
                                       const char* path) {
  return guarded([&] {
    require(r, "report");
    require(figure, "figure");
    // Validate the panel before touching the output file.
    std::ostringstream buffer;
    srsvd::write_figure(buffer, r->r, figure);
    write_to(path, [&](std::ostream& out) { out << buffer.str(); });
  });
}

srsvd_status srsvd_cooc_build(const char* tokens_path, size_t contexts, size_t targets,
                              size_t window, srsvd_matrix** out) {
  return guarded([&] {
    require(tokens_path, "token path");
    require(out, "out");
    auto cooc = srsvd::build_cooccurrence(srsvd::CoocSpec{contexts, targets, window, tokens_path});
    *out = new srsvd_matrix{std::move(cooc.matrix)};
  });
}

}  // extern "C"
