// srsvd command-line front end. Talks to the library only through srsvd.h.
//
// Exit codes: 0 success, 1 usage error (bad flags or parameter values),
// 2 data error (unreadable, malformed or mismatched input).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srsvd/srsvd.h"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Carries a library status out of a subcommand.
struct Failure : std::runtime_error {
  srsvd_status status;
  explicit Failure(srsvd_status s) : std::runtime_error(srsvd_last_error()), status(s) {}
};

void check(srsvd_status s) {
  if (s != SRSVD_OK) throw Failure(s);
}

struct MatrixDeleter {
  void operator()(srsvd_matrix* m) const { srsvd_matrix_free(m); }
};
struct ResultDeleter {
  void operator()(srsvd_result* r) const { srsvd_result_free(r); }
};
struct ModelDeleter {
  void operator()(srsvd_pca_model* m) const { srsvd_pca_free(m); }
};
struct CompareDeleter {
  void operator()(srsvd_compare* c) const { srsvd_compare_free(c); }
};
struct ReportDeleter {
  void operator()(srsvd_report* r) const { srsvd_report_free(r); }
};

using Matrix = std::unique_ptr<srsvd_matrix, MatrixDeleter>;

srsvd_format format_flag(const std::string& name) {
  if (name == "auto") return SRSVD_FORMAT_AUTO;
  if (name == "csv") return SRSVD_FORMAT_CSV;
  if (name == "mtx") return SRSVD_FORMAT_MTX;
  throw CLI::ValidationError("--format", "expected auto, csv or mtx");
}

srsvd_distribution distribution_flag(const std::string& name) {
  if (name == "uniform") return SRSVD_DIST_UNIFORM;
  if (name == "normal") return SRSVD_DIST_NORMAL;
  if (name == "zipf") return SRSVD_DIST_ZIPF;
  if (name == "poisson") return SRSVD_DIST_POISSON;
  if (name == "lowrank") return SRSVD_DIST_LOWRANK;
  throw CLI::ValidationError("--dist", "unknown distribution '" + name +
                                           "' (expected uniform, normal, zipf, poisson or lowrank)");
}

srsvd_distribution_spec make_spec(const std::string& dist, const std::vector<double>& params,
                                  std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (params.size() > 4) throw CLI::ValidationError("--param", "at most 4 values");
  srsvd_distribution_spec spec{};
  spec.kind = distribution_flag(dist);
  for (std::size_t i = 0; i < params.size(); ++i) spec.parameters[i] = params[i];
  spec.parameter_count = params.size();
  spec.rows = rows;
  spec.cols = cols;
  spec.seed = seed;
  return spec;
}

// "1-5,10,20" -> 1 2 3 4 5 10 20
std::vector<std::size_t> parse_count_list(const std::vector<std::string>& items,
                                          const std::string& flag) {
  std::vector<std::size_t> out;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-') {
      throw CLI::ValidationError(flag, "'" + s + "' is not a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
  };
  for (const auto& item : items) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const auto lo = number(item.substr(0, dash));
    const auto hi = number(item.substr(dash + 1));
    if (hi < lo) throw CLI::ValidationError(flag, "empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

Matrix load(const std::string& path, const std::string& format) {
  srsvd_matrix* m = nullptr;
  check(srsvd_matrix_load(path.c_str(), format_flag(format), &m));
  return Matrix(m);
}

// none | mean | file:<path>
struct Shift {
  srsvd_shift_mode mode = SRSVD_SHIFT_NONE;
  std::vector<double> values;
};

Shift shift_flag(const std::string& value) {
  if (value == "none") return {SRSVD_SHIFT_NONE, {}};
  if (value == "mean") return {SRSVD_SHIFT_MEAN, {}};
  if (value.rfind("file:", 0) == 0) {
    double* data = nullptr;
    std::size_t length = 0;
    check(srsvd_vector_load(value.substr(5).c_str(), &data, &length));
    Shift s{SRSVD_SHIFT_VECTOR, std::vector<double>(data, data + length)};
    srsvd_free(data);
    return s;
  }
  throw CLI::ValidationError("--shift", "expected none, mean or file:<path>");
}

srsvd_params params_flag(std::size_t k, double oversample, std::size_t q, std::uint64_t seed) {
  srsvd_params p{};
  check(srsvd_params_make(k, oversample, q, seed, &p));
  return p;
}

struct GenOptions {
  std::string dist = "uniform";
  std::vector<double> params;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 0;
  std::string format = "auto";
  std::string out;
};

void run_gen(const GenOptions& o) {
  const auto spec = make_spec(o.dist, o.params, o.rows, o.cols, o.seed);
  srsvd_matrix* raw = nullptr;
  check(srsvd_matrix_generate(&spec, &raw));
  Matrix m(raw);
  check(srsvd_matrix_save(m.get(), o.out.c_str(), format_flag(o.format)));
}

struct FactorOptions {
  std::string input;
  std::string format = "auto";
  std::size_t k = 0;
  double oversample = 2.0;
  std::size_t q = 0;
  std::string shift;
  std::uint64_t seed = 0;
  std::string out;
  std::string report = "-";
};

void run_svd(const FactorOptions& o) {
  auto x = load(o.input, o.format);
  const auto shift = shift_flag(o.shift);
  const auto params = params_flag(o.k, o.oversample, o.q, o.seed);
  srsvd_result* raw = nullptr;
  check(srsvd_factorize(x.get(), shift.mode, shift.values.data(), shift.values.size(), &params,
                        &raw));
  std::unique_ptr<srsvd_result, ResultDeleter> result(raw);
  check(srsvd_result_save_bundle(result.get(), o.out.c_str()));
}

void run_pca(const FactorOptions& o) {
  auto x = load(o.input, o.format);
  const auto shift = shift_flag(o.shift);
  const auto params = params_flag(o.k, o.oversample, o.q, o.seed);
  srsvd_pca_model* raw = nullptr;
  check(srsvd_pca_fit(x.get(), shift.mode, shift.values.data(), shift.values.size(), &params,
                      &raw));
  std::unique_ptr<srsvd_pca_model, ModelDeleter> model(raw);
  if (!o.out.empty()) check(srsvd_pca_save(model.get(), o.out.c_str()));

  std::vector<double> errors(srsvd_matrix_cols(x.get()));
  double mse = 0.0;
  check(srsvd_pca_errors(model.get(), x.get(), errors.data(), errors.size(), &mse));

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (o.report != "-") {
    file.open(o.report);
    if (!file) throw std::runtime_error("cannot open '" + o.report + "' for writing");
    out = &file;
  }
  char buf[64];
  *out << "column,error\n";
  for (std::size_t j = 0; j < errors.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", errors[j]);
    *out << j << ',' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", mse);
  *out << "# mse=" << buf << " k=" << params.rank << " K=" << params.sketch_width
       << " q=" << params.power_iters << " seed=" << params.seed << '\n';
  out->flush();
  if (!*out) throw std::runtime_error("write error on '" + o.report + "'");
}

struct CompareOptions {
  std::vector<std::string> dists;
  std::vector<double> params;
  std::size_t rows = 100;
  std::vector<std::string> cols;
  std::vector<std::string> inputs;
  std::string format = "auto";
  std::vector<std::string> ks;
  std::vector<std::string> qs{"0"};
  std::size_t trials = 30;
  std::uint64_t seed = 0;
  double oversample = 2.0;
  bool with_explicit = false;
  bool with_exact = false;
  bool timing = false;
  std::string out = "-";
  std::string figure;
  std::string figure_out = "-";
};

void run_compare(const CompareOptions& o) {
  srsvd_compare* raw = nullptr;
  check(srsvd_compare_create(&raw));
  std::unique_ptr<srsvd_compare, CompareDeleter> cfg(raw);

  // Generated sources: every distribution at every column count.
  std::vector<std::string> dists = o.dists;
  if (dists.empty() && o.inputs.empty()) dists.push_back("uniform");
  const auto cols = o.cols.empty() ? std::vector<std::size_t>{1000}
                                   : parse_count_list(o.cols, "--cols");
  for (const auto& d : dists) {
    for (auto n : cols) {
      const auto spec = make_spec(d, o.params, o.rows, n, 0);
      check(srsvd_compare_add_generated(cfg.get(), d.c_str(), &spec));
    }
  }
  for (const auto& path : o.inputs) {
    auto m = load(path, o.format);
    const auto label = std::filesystem::path(path).stem().string();
    check(srsvd_compare_add_matrix(cfg.get(), label.c_str(), m.get()));
  }

  const auto ks = parse_count_list(o.ks, "--k");
  const auto qs = parse_count_list(o.qs, "--q");
  check(srsvd_compare_set_ranks(cfg.get(), ks.data(), ks.size()));
  check(srsvd_compare_set_power_iters(cfg.get(), qs.data(), qs.size()));
  check(srsvd_compare_set_trials(cfg.get(), o.trials));
  check(srsvd_compare_set_seed(cfg.get(), o.seed));
  check(srsvd_compare_set_oversample(cfg.get(), o.oversample));
  check(srsvd_compare_set_modes(cfg.get(), o.with_explicit, o.with_exact, o.timing));

  srsvd_report* rep = nullptr;
  check(srsvd_compare_run(cfg.get(), &rep));
  std::unique_ptr<srsvd_report, ReportDeleter> report(rep);
  if (!o.out.empty()) check(srsvd_report_write(report.get(), o.out.c_str()));
  if (!o.figure.empty()) {
    check(srsvd_report_write_figure(report.get(), o.figure.c_str(), o.figure_out.c_str()));
  }
}

struct CoocOptions {
  std::string tokens;
  std::size_t contexts = 1000;
  std::size_t targets = 1000;
  std::size_t window = 5;
  std::string out;
};

void run_cooc(const CoocOptions& o) {
  srsvd_matrix* raw = nullptr;
  check(srsvd_cooc_build(o.tokens.c_str(), o.contexts, o.targets, o.window, &raw));
  Matrix m(raw);
  check(srsvd_matrix_save(m.get(), o.out.c_str(), SRSVD_FORMAT_MTX));
}

int exit_code(srsvd_status s) {
  switch (s) {
    case SRSVD_OK: return 0;
    case SRSVD_ERR_INVALID_ARGUMENT: return kUsageError;
    default: return kDataError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized SVD of implicitly mean-shifted matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", srsvd_version());

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a random matrix");
  gen_cmd->add_option("--dist", gen.dist, "uniform, normal, zipf, poisson or lowrank")
      ->capture_default_str();
  gen_cmd->add_option("--param", gen.params, "Distribution parameters (repeatable)");
  gen_cmd->add_option("--rows", gen.rows)->required();
  gen_cmd->add_option("--cols", gen.cols)->required();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--format", gen.format, "auto, csv or mtx")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  FactorOptions svd;
  svd.shift = "none";
  auto* svd_cmd = app.add_subcommand("svd", "Rank-k factorization into a bundle directory");
  FactorOptions pca;
  pca.shift = "mean";
  auto* pca_cmd = app.add_subcommand("pca", "Fit PCA and report reconstruction errors");
  for (auto [cmd, o] : {std::pair{svd_cmd, &svd}, std::pair{pca_cmd, &pca}}) {
    cmd->add_option("--input", o->input, "Matrix file (CSV or Matrix Market)")->required();
    cmd->add_option("--format", o->format, "auto, csv or mtx")->capture_default_str();
    cmd->add_option("--k", o->k, "Target rank")->required();
    cmd->add_option("--oversample", o->oversample, "K = ceil(oversample * k)")
        ->capture_default_str();
    cmd->add_option("--q", o->q, "Power iterations")->capture_default_str();
    cmd->add_option("--shift", o->shift, "none, mean or file:<path>")->capture_default_str();
    cmd->add_option("--seed", o->seed)->capture_default_str();
  }
  svd_cmd->add_option("--out", svd.out, "Bundle directory")->required();
  pca_cmd->add_option("--out", pca.out, "Optional bundle directory for the model");
  pca_cmd->add_option("--report", pca.report, "Per-column error CSV, '-' for stdout")
      ->capture_default_str();

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired S-RSVD vs RSVD trials");
  cmp_cmd->add_option("--dist", cmp.dists, "Generated sources (default uniform)")
      ->delimiter(',');
  cmp_cmd->add_option("--param", cmp.params, "Distribution parameters (repeatable)");
  cmp_cmd->add_option("--rows", cmp.rows, "Rows of generated data")->capture_default_str();
  cmp_cmd->add_option("--cols", cmp.cols, "Columns of generated data, list (default 1000)")
      ->delimiter(',');
  cmp_cmd->add_option("--input", cmp.inputs, "Fixed data files (repeatable)");
  cmp_cmd->add_option("--format", cmp.format, "auto, csv or mtx")->capture_default_str();
  cmp_cmd->add_option("--k", cmp.ks, "Ranks, e.g. 1-5,10,20")->delimiter(',')->required();
  cmp_cmd->add_option("--q", cmp.qs, "Power iterations, e.g. 0-5")->delimiter(',');
  cmp_cmd->add_option("--trials", cmp.trials)->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed, "Master seed")->capture_default_str();
  cmp_cmd->add_option("--oversample", cmp.oversample)->capture_default_str();
  cmp_cmd->add_flag("--explicit", cmp.with_explicit, "Also run RSVD on the centered matrix");
  cmp_cmd->add_flag("--exact", cmp.with_exact, "Also run the exact truncated SVD");
  cmp_cmd->add_flag("--timing", cmp.timing, "Record elapsed time per run");
  cmp_cmd->add_option("--out", cmp.out, "Report CSV, '-' for stdout, '' to skip")
      ->capture_default_str();
  cmp_cmd->add_option("--figure", cmp.figure, "Figure panel 1a..1f");
  cmp_cmd->add_option("--figure-out", cmp.figure_out, "Figure CSV, '-' for stdout")
      ->capture_default_str();

  CoocOptions cooc;
  auto* cooc_cmd = app.add_subcommand("cooc", "Word co-occurrence matrix as Matrix Market");
  cooc_cmd->add_option("--tokens", cooc.tokens, "Whitespace-tokenized corpus")->required();
  cooc_cmd->add_option("--contexts", cooc.contexts)->capture_default_str();
  cooc_cmd->add_option("--targets", cooc.targets)->capture_default_str();
  cooc_cmd->add_option("--window", cooc.window)->capture_default_str();
  cooc_cmd->add_option("--out", cooc.out, "Output .mtx file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    if (*svd_cmd) run_svd(svd);
    if (*pca_cmd) run_pca(pca);
    if (*cmp_cmd) run_compare(cmp);
    if (*cooc_cmd) run_cooc(cooc);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "srsvd: " << e.what() << '\n';
    return kUsageError;
  } catch (const Failure& e) {
    std::cerr << "srsvd: " << e.what() << '\n';
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::cerr << "srsvd: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
