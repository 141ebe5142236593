#pragma once

// Text formats:
//   dense CSV      no header, one matrix row per line, values printed with
//                  17 significant digits so every double round-trips exactly;
//                  vectors are single-column CSV
//   Matrix Market  "coordinate real general" with 1-based indices on output;
//                  coordinate real/integer/pattern (general or symmetric) and
//                  "array real general" are accepted on input
//   bundle         directory holding U.csv, S.csv, V.csv, optional mean.csv and
//                  a key=value meta.txt

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srsvd/matrix.hpp"
#include "srsvd/pca.hpp"
#include "srsvd/rsvd.hpp"

namespace srsvd {

enum class FileFormat { automatic, csv, mtx };

FileFormat parse_file_format(const std::string& name);

// "%.17g"
std::string format_double(double value);

DenseMatrix read_csv(std::istream& in, const std::string& source = "<stream>");
DenseMatrix load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const DenseMatrix& m);
void save_csv(const std::filesystem::path& path, const DenseMatrix& m);

std::vector<double> load_vector_csv(const std::filesystem::path& path);
void save_vector_csv(const std::filesystem::path& path, const std::vector<double>& values);

AnyMatrix read_mtx(std::istream& in, const std::string& source = "<stream>");
AnyMatrix load_mtx(const std::filesystem::path& path);
void write_mtx(std::ostream& out, const SparseMatrix& m);
void save_mtx(const std::filesystem::path& path, const SparseMatrix& m);

// `automatic` picks Matrix Market for .mtx/.mm files and CSV otherwise.
AnyMatrix load_matrix(const std::filesystem::path& path, FileFormat format = FileFormat::automatic);
void save_matrix(const std::filesystem::path& path, const AnyMatrix& m,
                 FileFormat format = FileFormat::automatic);

using Metadata = std::map<std::string, std::string>;

// Writes U.csv, S.csv, V.csv, meta.txt, and mean.csv when the shift is nonzero.
// The elapsed time is not stored so identical runs give identical bundles.
void save_bundle(const std::filesystem::path& dir, const SvdResult& result,
                 const Metadata& extra = {});
void save_bundle(const std::filesystem::path& dir, const PcaModel& model,
                 const Metadata& extra = {});
PcaModel load_bundle(const std::filesystem::path& dir);

Metadata load_metadata(const std::filesystem::path& path);

}  // namespace srsvd
