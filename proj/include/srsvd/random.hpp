#pragma once

// Pinned random stream: std::mt19937_64 (its output sequence is fixed by the
// C++ standard), 53-bit uniforms, and Box-Muller normals consumed in pairs.
// std::normal_distribution is deliberately not used since its algorithm is
// implementation-defined.

#include <cstddef>
#include <cstdint>
#include <random>

#include "srsvd/matrix.hpp"

namespace srsvd {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal by Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// rows x cols standard Gaussian matrix, filled column by column.
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

// Independent stream seed for trial `index` of a run seeded with `master`
// (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace srsvd
