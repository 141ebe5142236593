#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srsvd/matrix.hpp"

namespace srsvd {

enum class Distribution { uniform, normal, zipf, poisson, lowrank };

Distribution parse_distribution(std::string_view name);
std::string_view to_string(Distribution d);

// Parameters per kind (empty list selects the defaults):
//   uniform  low, high        (0, 1)
//   normal   mean, stddev     (0, 1)
//   zipf     exponent, N      (1.5, 1000)   support 1..N, exponent > 1
//   poisson  rate             (4)           0 < rate <= 30
//   lowrank  rank, noise      (20, 0.05)    image-like W H / rank + noise N(0, noise^2),
//                                           W and H uniform on [0, 1]
struct DistributionSpec {
  Distribution kind = Distribution::uniform;
  std::vector<double> parameters;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::uint64_t seed = 0;

  // Parameters with defaults filled in; throws when they are invalid.
  std::vector<double> resolved_parameters() const;
};

// Entries generated in row-major order from a stream seeded by spec.seed; i.i.d.
// for every kind except lowrank, which draws W, then H, then the noise.
DenseMatrix generate(const DistributionSpec& spec);

struct TTestResult {
  double t = 0.0;
  std::size_t dof = 0;
  double p = 1.0;
  // Differences with zero spread but nonzero mean: t is infinite and p = 0.
  bool degenerate = false;
};

// Two-sided paired t-test on a - b.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Two-sided tail P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double t_sf(double t, std::size_t dof);

// I_x(a, b), continued fraction (modified Lentz).
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace srsvd
