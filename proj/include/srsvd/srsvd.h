#ifndef SRSVD_SRSVD_H
#define SRSVD_SRSVD_H

/*
 * C interface to the shifted randomized SVD library.
 *
 * Every fallible call returns an srsvd_status; on failure the message is
 * available from srsvd_last_error() on the calling thread until the next
 * failing call. Handles are opaque and owned by the caller, who releases
 * them with the matching *_free function (NULL is accepted there).
 *
 * Dense data crosses the boundary as row-major double arrays. Functions that
 * fill a caller buffer take its capacity in elements and fail with
 * SRSVD_ERR_DIMENSION when it is too small.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SRSVD_BUILDING_LIBRARY)
#    define SRSVD_API __declspec(dllexport)
#  else
#    define SRSVD_API __declspec(dllimport)
#  endif
#else
#  define SRSVD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srsvd_status {
  SRSVD_OK = 0,
  SRSVD_ERR_INVALID_ARGUMENT = 1,
  SRSVD_ERR_DIMENSION = 2,
  SRSVD_ERR_PARSE = 3,
  SRSVD_ERR_IO = 4,
  SRSVD_ERR_NUMERIC = 5,
  SRSVD_ERR_INTERNAL = 6
} srsvd_status;

typedef enum srsvd_format {
  SRSVD_FORMAT_AUTO = 0, /* Matrix Market for .mtx/.mm, CSV otherwise */
  SRSVD_FORMAT_CSV = 1,
  SRSVD_FORMAT_MTX = 2
} srsvd_format;

typedef enum srsvd_shift_mode {
  SRSVD_SHIFT_NONE = 0,   /* mu = 0 */
  SRSVD_SHIFT_MEAN = 1,   /* mu = column mean of the input */
  SRSVD_SHIFT_VECTOR = 2  /* mu supplied by the caller */
} srsvd_shift_mode;

typedef enum srsvd_distribution {
  SRSVD_DIST_UNIFORM = 0,
  SRSVD_DIST_NORMAL = 1,
  SRSVD_DIST_ZIPF = 2,
  SRSVD_DIST_POISSON = 3,
  SRSVD_DIST_LOWRANK = 4 /* parameters: rank, noise stddev */
} srsvd_distribution;

typedef struct srsvd_matrix srsvd_matrix;
typedef struct srsvd_result srsvd_result;
typedef struct srsvd_pca_model srsvd_pca_model;
typedef struct srsvd_compare srsvd_compare;
typedef struct srsvd_report srsvd_report;

typedef struct srsvd_params {
  size_t rank;         /* k */
  size_t sketch_width; /* K, with k < K <= min(rows, cols) */
  size_t power_iters;  /* q */
  uint64_t seed;
} srsvd_params;

/* At most 4 parameters are read; parameter_count = 0 selects the defaults
 * (uniform 0 1, normal 0 1, zipf 1.5 1000, poisson 4). */
typedef struct srsvd_distribution_spec {
  srsvd_distribution kind;
  double parameters[4];
  size_t parameter_count;
  size_t rows;
  size_t cols;
  uint64_t seed;
} srsvd_distribution_spec;

typedef struct srsvd_t_test {
  double t;
  size_t dof;
  double p;
  int degenerate; /* zero-spread differences with nonzero mean */
} srsvd_t_test;

typedef struct srsvd_cell {
  size_t source;
  size_t rank;
  size_t power_iters;
  double mean_srsvd;
  double mean_rsvd;
  double mean_explicit; /* NaN unless explicit runs were requested */
  double mean_exact;    /* NaN unless exact runs were requested */
  srsvd_t_test mse_test;
  srsvd_t_test column_test;
  double win_srsvd;
  double win_rsvd;
} srsvd_cell;

typedef struct srsvd_sum {
  size_t source;
  size_t power_iters;
  double sum_srsvd;
  double sum_rsvd;
  double sum_explicit;
  double sum_exact;
} srsvd_sum;

SRSVD_API const char* srsvd_version(void);
SRSVD_API const char* srsvd_last_error(void);
SRSVD_API const char* srsvd_status_name(srsvd_status status);

/* Matrices */

SRSVD_API srsvd_status srsvd_matrix_from_dense(size_t rows, size_t cols, const double* data,
                                               srsvd_matrix** out);
/* Duplicate coordinates are summed; zero-indexed. */
SRSVD_API srsvd_status srsvd_matrix_from_triplets(size_t rows, size_t cols, size_t count,
                                                  const size_t* row_idx, const size_t* col_idx,
                                                  const double* values, srsvd_matrix** out);
SRSVD_API srsvd_status srsvd_matrix_load(const char* path, srsvd_format format,
                                         srsvd_matrix** out);
SRSVD_API srsvd_status srsvd_matrix_save(const srsvd_matrix* m, const char* path,
                                         srsvd_format format);
SRSVD_API srsvd_status srsvd_matrix_generate(const srsvd_distribution_spec* spec,
                                             srsvd_matrix** out);
SRSVD_API void srsvd_matrix_free(srsvd_matrix* m);

SRSVD_API size_t srsvd_matrix_rows(const srsvd_matrix* m);
SRSVD_API size_t srsvd_matrix_cols(const srsvd_matrix* m);
SRSVD_API int srsvd_matrix_is_sparse(const srsvd_matrix* m);
/* Stored entries: rows * cols for dense matrices. */
SRSVD_API size_t srsvd_matrix_nnz(const srsvd_matrix* m);
SRSVD_API uint64_t srsvd_matrix_hash(const srsvd_matrix* m);
/* Row-major copy, capacity >= rows * cols. */
SRSVD_API srsvd_status srsvd_matrix_to_dense(const srsvd_matrix* m, double* out, size_t capacity);
/* capacity >= rows */
SRSVD_API srsvd_status srsvd_matrix_column_mean(const srsvd_matrix* m, double* out,
                                                size_t capacity);

/* Single-column CSV vectors. srsvd_vector_load allocates *out, released with
 * srsvd_free. */
SRSVD_API srsvd_status srsvd_vector_load(const char* path, double** out, size_t* length);
SRSVD_API srsvd_status srsvd_vector_save(const char* path, const double* values, size_t length);
SRSVD_API void srsvd_free(void* p);

/* Factorization */

/* K = ceil(oversample * k). */
SRSVD_API srsvd_status srsvd_params_make(size_t rank, double oversample, size_t power_iters,
                                         uint64_t seed, srsvd_params* out);

/* shift / shift_length are read only for SRSVD_SHIFT_VECTOR. */
SRSVD_API srsvd_status srsvd_factorize(const srsvd_matrix* x, srsvd_shift_mode mode,
                                       const double* shift, size_t shift_length,
                                       const srsvd_params* params, srsvd_result** out);
SRSVD_API void srsvd_result_free(srsvd_result* r);

SRSVD_API size_t srsvd_result_rank(const srsvd_result* r);
SRSVD_API size_t srsvd_result_rows(const srsvd_result* r);
SRSVD_API size_t srsvd_result_cols(const srsvd_result* r);
SRSVD_API srsvd_params srsvd_result_params(const srsvd_result* r);
SRSVD_API double srsvd_result_elapsed_seconds(const srsvd_result* r);
SRSVD_API srsvd_status srsvd_result_sigma(const srsvd_result* r, double* out, size_t capacity);
/* U is rows x rank, V is cols x rank, both row-major. */
SRSVD_API srsvd_status srsvd_result_u(const srsvd_result* r, double* out, size_t capacity);
SRSVD_API srsvd_status srsvd_result_v(const srsvd_result* r, double* out, size_t capacity);
/* The shift used, length rows. */
SRSVD_API srsvd_status srsvd_result_shift(const srsvd_result* r, double* out, size_t capacity);
/* U diag(sigma) V^T without the shift, rows x cols. */
SRSVD_API srsvd_status srsvd_result_reconstruct(const srsvd_result* r, double* out,
                                                size_t capacity);
SRSVD_API srsvd_status srsvd_result_save_bundle(const srsvd_result* r, const char* dir);

/* Valid for 2 <= k <= m / 2. */
SRSVD_API srsvd_status srsvd_error_bound(size_t m, size_t k, size_t q, double sigma_k_plus_1,
                                         double* out);

/* PCA (columns are samples) */

SRSVD_API srsvd_status srsvd_pca_fit(const srsvd_matrix* x, srsvd_shift_mode mode,
                                     const double* shift, size_t shift_length,
                                     const srsvd_params* params, srsvd_pca_model** out);
SRSVD_API srsvd_status srsvd_pca_load(const char* dir, srsvd_pca_model** out);
SRSVD_API srsvd_status srsvd_pca_save(const srsvd_pca_model* model, const char* dir);
SRSVD_API void srsvd_pca_free(srsvd_pca_model* model);

SRSVD_API size_t srsvd_pca_rank(const srsvd_pca_model* model);
SRSVD_API size_t srsvd_pca_rows(const srsvd_pca_model* model);
SRSVD_API srsvd_status srsvd_pca_mean(const srsvd_pca_model* model, double* out,
                                      size_t capacity);
SRSVD_API srsvd_status srsvd_pca_sigma(const srsvd_pca_model* model, double* out,
                                       size_t capacity);
/* rank x cols(x), row-major. */
SRSVD_API srsvd_status srsvd_pca_transform(const srsvd_pca_model* model, const srsvd_matrix* x,
                                           double* out, size_t capacity);
/* per_column may be NULL; otherwise capacity >= cols(x). */
SRSVD_API srsvd_status srsvd_pca_errors(const srsvd_pca_model* model, const srsvd_matrix* x,
                                        double* per_column, size_t capacity, double* mse);

/* Statistics */

SRSVD_API srsvd_status srsvd_paired_t_test(const double* a, const double* b, size_t n,
                                           srsvd_t_test* out);
SRSVD_API double srsvd_t_sf(double t, size_t dof);

/* Comparison protocol */

SRSVD_API srsvd_status srsvd_compare_create(srsvd_compare** out);
SRSVD_API void srsvd_compare_free(srsvd_compare* c);
/* A generated source is re-seeded on every trial; the spec seed is ignored. */
SRSVD_API srsvd_status srsvd_compare_add_generated(srsvd_compare* c, const char* label,
                                                   const srsvd_distribution_spec* spec);
/* The matrix is copied and reused by every trial. */
SRSVD_API srsvd_status srsvd_compare_add_matrix(srsvd_compare* c, const char* label,
                                                const srsvd_matrix* m);
SRSVD_API srsvd_status srsvd_compare_set_ranks(srsvd_compare* c, const size_t* ranks,
                                               size_t count);
SRSVD_API srsvd_status srsvd_compare_set_power_iters(srsvd_compare* c, const size_t* qs,
                                                     size_t count);
SRSVD_API srsvd_status srsvd_compare_set_trials(srsvd_compare* c, size_t trials);
SRSVD_API srsvd_status srsvd_compare_set_seed(srsvd_compare* c, uint64_t seed);
SRSVD_API srsvd_status srsvd_compare_set_oversample(srsvd_compare* c, double oversample);
SRSVD_API srsvd_status srsvd_compare_set_modes(srsvd_compare* c, int with_explicit,
                                               int with_exact, int record_timing);
SRSVD_API srsvd_status srsvd_compare_run(const srsvd_compare* c, srsvd_report** out);

SRSVD_API void srsvd_report_free(srsvd_report* r);
SRSVD_API size_t srsvd_report_record_count(const srsvd_report* r);
SRSVD_API size_t srsvd_report_cell_count(const srsvd_report* r);
SRSVD_API srsvd_status srsvd_report_cell(const srsvd_report* r, size_t index, srsvd_cell* out);
SRSVD_API size_t srsvd_report_sum_count(const srsvd_report* r);
SRSVD_API srsvd_status srsvd_report_sum(const srsvd_report* r, size_t index, srsvd_sum* out);
/* path "-" writes to stdout. */
SRSVD_API srsvd_status srsvd_report_write(const srsvd_report* r, const char* path);
/* figure is one of "1a" .. "1f". */
SRSVD_API srsvd_status srsvd_report_write_figure(const srsvd_report* r, const char* figure,
                                                 const char* path);

/* Word co-occurrence: entry (j, i) = p(target i | context j), a sparse
 * contexts x targets matrix over the most frequent words. */
SRSVD_API srsvd_status srsvd_cooc_build(const char* tokens_path, size_t contexts, size_t targets,
                                        size_t window, srsvd_matrix** out);

#ifdef __cplusplus
}
#endif

#endif /* SRSVD_SRSVD_H */
