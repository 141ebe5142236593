#include "srsvd/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srsvd/error.hpp"

namespace srsvd {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  fail(ErrorCode::parse, source + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::io, "write to '" + path.string() + "' failed");
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

FileFormat parse_file_format(const std::string& name) {
  if (name == "auto") return FileFormat::automatic;
  if (name == "csv") return FileFormat::csv;
  if (name == "mtx") return FileFormat::mtx;
  fail(ErrorCode::invalid_argument, "unknown format '" + name + "' (expected auto, csv or mtx)");
}

std::string format_double(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------- CSV

DenseMatrix read_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t blank_since = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) {
      if (blank_since == 0) blank_since = line_no;
      continue;
    }
    if (blank_since != 0) parse_error(source, blank_since, "blank line inside matrix");

    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view cell =
          view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      ++field;
      const auto v = parse_double(cell);
      if (!v) {
        parse_error(source, line_no,
                    "column " + std::to_string(field) + ": not a number '" + std::string(trim(cell)) + "'");
      }
      if (!std::isfinite(*v)) {
        parse_error(source, line_no, "column " + std::to_string(field) + ": non-finite value");
      }
      values.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = field;
    } else if (field != cols) {
      parse_error(source, line_no,
                  "expected " + std::to_string(cols) + " columns, found " + std::to_string(field));
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorCode::parse, source + ": empty matrix");
  return DenseMatrix(rows, cols, std::move(values));
}

DenseMatrix load_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  std::string line;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format_double(m(i, j));
    }
    line += '\n';
    out << line;
  }
}

void save_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_csv(out, m);
  finish(out, path);
}

std::vector<double> load_vector_csv(const std::filesystem::path& path) {
  const DenseMatrix m = load_csv(path);
  if (m.cols() != 1) {
    fail(ErrorCode::parse, path.string() + ": expected a single-column vector, found " +
                               std::to_string(m.cols()) + " columns");
  }
  return {m.data().begin(), m.data().end()};
}

void save_vector_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  auto out = open_out(path);
  for (double v : values) out << format_double(v) << '\n';
  finish(out, path);
}

// ---------------------------------------------------------------- Matrix Market

AnyMatrix read_mtx(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(ErrorCode::parse, source + ": empty matrix");
  ++line_no;

  const auto header = split_whitespace(line);
  if (header.size() != 5 || lower(header[0]) != "%%matrixmarket" || lower(header[1]) != "matrix") {
    parse_error(source, line_no, "missing '%%MatrixMarket matrix' banner");
  }
  const std::string layout = lower(header[2]);
  const std::string field = lower(header[3]);
  const std::string symmetry = lower(header[4]);
  if (layout != "coordinate" && layout != "array") {
    parse_error(source, line_no, "unsupported layout '" + layout + "'");
  }
  if (field != "real" && field != "integer" && !(field == "pattern" && layout == "coordinate")) {
    parse_error(source, line_no, "unsupported field '" + field + "'");
  }
  if (symmetry != "general" && !(symmetry == "symmetric" && layout == "coordinate")) {
    parse_error(source, line_no, "unsupported symmetry '" + symmetry + "'");
  }

  auto next_content = [&](std::vector<std::string_view>& tokens) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto view = trim(line);
      if (view.empty() || view.front() == '%') continue;
      tokens = split_whitespace(line);
      return true;
    }
    return false;
  };

  std::vector<std::string_view> tokens;
  if (!next_content(tokens)) fail(ErrorCode::parse, source + ": empty matrix");

  auto index_at = [&](std::size_t i) {
    const auto v = parse_index(tokens[i]);
    if (!v) parse_error(source, line_no, "entry " + std::to_string(i + 1) + ": not an index");
    return *v;
  };
  auto value_at = [&](std::size_t i) {
    const auto v = parse_double(tokens[i]);
    if (!v || !std::isfinite(*v)) {
      parse_error(source, line_no, "entry " + std::to_string(i + 1) + ": invalid value");
    }
    return *v;
  };

  if (layout == "array") {
    if (tokens.size() != 2) parse_error(source, line_no, "expected 'rows cols'");
    const std::size_t rows = index_at(0);
    const std::size_t cols = index_at(1);
    if (rows == 0 || cols == 0) fail(ErrorCode::parse, source + ": empty matrix");
    std::vector<double> values(rows * cols);
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < rows; ++i) {
        if (!next_content(tokens)) {
          fail(ErrorCode::parse, source + ": expected " + std::to_string(rows * cols) +
                                     " values, file ends early");
        }
        if (tokens.size() != 1) parse_error(source, line_no, "expected one value per line");
        values[i * cols + j] = value_at(0);
      }
    }
    return DenseMatrix(rows, cols, std::move(values));
  }

  if (tokens.size() != 3) parse_error(source, line_no, "expected 'rows cols entries'");
  const std::size_t rows = index_at(0);
  const std::size_t cols = index_at(1);
  const std::size_t entries = index_at(2);
  if (rows == 0 || cols == 0) fail(ErrorCode::parse, source + ": empty matrix");

  const std::size_t width = field == "pattern" ? 2 : 3;
  std::vector<Triplet> triplets;
  triplets.reserve(symmetry == "symmetric" ? 2 * entries : entries);
  for (std::size_t e = 0; e < entries; ++e) {
    if (!next_content(tokens)) {
      fail(ErrorCode::parse, source + ": expected " + std::to_string(entries) +
                                 " entries, found " + std::to_string(e));
    }
    if (tokens.size() != width) {
      parse_error(source, line_no, "expected " + std::to_string(width) + " fields");
    }
    const std::size_t i = index_at(0);
    const std::size_t j = index_at(1);
    if (i == 0 || j == 0 || i > rows || j > cols) {
      parse_error(source, line_no, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                       ") outside " + shape_str(rows, cols));
    }
    const double v = width == 3 ? value_at(2) : 1.0;
    triplets.push_back({i - 1, j - 1, v});
    if (symmetry == "symmetric" && i != j) triplets.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

AnyMatrix load_mtx(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_mtx(in, path.string());
}

void write_mtx(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      out << (i + 1) << ' ' << (ci[p] + 1) << ' ' << format_double(vals[p]) << '\n';
    }
  }
}

void save_mtx(const std::filesystem::path& path, const SparseMatrix& m) {
  auto out = open_out(path);
  write_mtx(out, m);
  finish(out, path);
}

namespace {

FileFormat resolve(const std::filesystem::path& path, FileFormat format) {
  if (format != FileFormat::automatic) return format;
  const auto ext = lower(path.extension().string());
  return ext == ".mtx" || ext == ".mm" ? FileFormat::mtx : FileFormat::csv;
}

}  // namespace

AnyMatrix load_matrix(const std::filesystem::path& path, FileFormat format) {
  if (resolve(path, format) == FileFormat::mtx) return load_mtx(path);
  return load_csv(path);
}

void save_matrix(const std::filesystem::path& path, const AnyMatrix& m, FileFormat format) {
  if (resolve(path, format) == FileFormat::mtx) {
    if (const auto* s = std::get_if<SparseMatrix>(&m)) {
      save_mtx(path, *s);
    } else {
      save_mtx(path, SparseMatrix::from_dense(std::get<DenseMatrix>(m)));
    }
    return;
  }
  if (const auto* d = std::get_if<DenseMatrix>(&m)) {
    save_csv(path, *d);
  } else {
    save_csv(path, std::get<SparseMatrix>(m).to_dense());
  }
}

// ---------------------------------------------------------------- bundles

namespace {

void write_bundle(const std::filesystem::path& dir, const DenseMatrix& u,
                  const std::vector<double>& sigma, const DenseMatrix& v, const Vector& mean,
                  const RsvdParams& params, const Metadata& extra) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create directory '" + dir.string() + "': " + ec.message());

  save_csv(dir / "U.csv", u);
  save_vector_csv(dir / "S.csv", sigma);
  save_csv(dir / "V.csv", v);
  const bool shifted = !mean.is_zero();
  if (shifted) {
    save_vector_csv(dir / "mean.csv", {mean.values().begin(), mean.values().end()});
  } else {
    std::filesystem::remove(dir / "mean.csv", ec);
  }

  Metadata meta = extra;
  meta["rank"] = std::to_string(params.rank);
  meta["sketch_width"] = std::to_string(params.sketch_width);
  meta["power_iters"] = std::to_string(params.power_iters);
  meta["seed"] = std::to_string(params.seed);
  meta["rows"] = std::to_string(u.rows());
  meta["cols"] = std::to_string(v.rows());
  meta["shifted"] = shifted ? "1" : "0";

  const auto path = dir / "meta.txt";
  auto out = open_out(path);
  for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
  finish(out, path);
}

std::size_t meta_count(const Metadata& meta, const std::string& key, const std::string& source) {
  const auto it = meta.find(key);
  if (it == meta.end()) fail(ErrorCode::parse, source + ": missing key '" + key + "'");
  const auto v = parse_index(it->second);
  if (!v) fail(ErrorCode::parse, source + ": key '" + key + "' is not a count");
  return *v;
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const SvdResult& result, const Metadata& extra) {
  write_bundle(dir, result.factors.u, result.factors.sigma, result.factors.v, result.shift,
               result.params, extra);
}

void save_bundle(const std::filesystem::path& dir, const PcaModel& model, const Metadata& extra) {
  write_bundle(dir, model.components, model.sigma, model.right_vectors, model.mean, model.params,
               extra);
}

Metadata load_metadata(const std::filesystem::path& path) {
  auto in = open_in(path);
  Metadata meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) parse_error(path.string(), line_no, "expected key=value");
    meta[std::string(trim(view.substr(0, eq)))] = std::string(trim(view.substr(eq + 1)));
  }
  return meta;
}

PcaModel load_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.txt";
  const Metadata meta = load_metadata(meta_path);
  RsvdParams params;
  params.rank = meta_count(meta, "rank", meta_path.string());
  params.sketch_width = meta_count(meta, "sketch_width", meta_path.string());
  params.power_iters = meta_count(meta, "power_iters", meta_path.string());
  params.seed = meta_count(meta, "seed", meta_path.string());

  DenseMatrix u = load_csv(dir / "U.csv");
  std::vector<double> sigma = load_vector_csv(dir / "S.csv");
  DenseMatrix v = load_csv(dir / "V.csv");
  if (u.cols() != sigma.size() || v.cols() != sigma.size()) {
    fail(ErrorCode::parse, dir.string() + ": U, S and V disagree on the rank");
  }
  Vector mean = std::filesystem::exists(dir / "mean.csv")
                    ? Vector(load_vector_csv(dir / "mean.csv"))
                    : Vector::zeros(u.rows());
  if (mean.size() != u.rows()) {
    fail(ErrorCode::parse, dir.string() + ": mean.csv length does not match U");
  }
  return {std::move(mean), std::move(u), std::move(sigma), std::move(v), params};
}

}  // namespace srsvd
