#include "srsvd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srsvd/error.hpp"
#include "srsvd/random.hpp"

namespace srsvd {

namespace {

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::invalid_argument, what); }

std::vector<double> zipf_cdf(double exponent, std::size_t support) {
  std::vector<double> cdf(support);
  double total = 0.0;
  for (std::size_t r = 1; r <= support; ++r) {
    total += std::pow(static_cast<double>(r), -exponent);
    cdf[r - 1] = total;
  }
  for (auto& c : cdf) c /= total;
  cdf.back() = 1.0;
  return cdf;
}

double poisson_inversion(double rate, Rng& rng) {
  const double u = rng.uniform();
  double term = std::exp(-rate);
  double cumulative = term;
  std::size_t k = 0;
  // The tail beyond a few hundred is below double resolution for rate <= 30.
  while (u > cumulative && k < 1000) {
    ++k;
    term *= rate / static_cast<double>(k);
    cumulative += term;
  }
  return static_cast<double>(k);
}

}  // namespace

Distribution parse_distribution(std::string_view name) {
  if (name == "uniform") return Distribution::uniform;
  if (name == "normal") return Distribution::normal;
  if (name == "zipf") return Distribution::zipf;
  if (name == "poisson") return Distribution::poisson;
  if (name == "lowrank") return Distribution::lowrank;
  invalid("unknown distribution '" + std::string(name) +
          "' (expected uniform, normal, zipf, poisson or lowrank)");
}

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::uniform: return "uniform";
    case Distribution::normal: return "normal";
    case Distribution::zipf: return "zipf";
    case Distribution::poisson: return "poisson";
    case Distribution::lowrank: return "lowrank";
  }
  return "unknown";
}

std::vector<double> DistributionSpec::resolved_parameters() const {
  std::vector<double> p = parameters;
  auto defaults = [&](std::vector<double> d) {
    if (p.size() > d.size()) {
      invalid(std::string(to_string(kind)) + " takes at most " + std::to_string(d.size()) +
              " parameters");
    }
    for (std::size_t i = p.size(); i < d.size(); ++i) p.push_back(d[i]);
  };
  for (double v : p) {
    if (!std::isfinite(v)) invalid("distribution parameters must be finite");
  }
  switch (kind) {
    case Distribution::uniform:
      defaults({0.0, 1.0});
      if (!(p[0] < p[1])) invalid("uniform needs low < high");
      break;
    case Distribution::normal:
      defaults({0.0, 1.0});
      if (!(p[1] > 0.0)) invalid("normal needs stddev > 0");
      break;
    case Distribution::zipf:
      defaults({1.5, 1000.0});
      if (!(p[0] > 1.0)) invalid("zipf needs exponent > 1");
      if (!(p[1] >= 1.0) || p[1] != std::floor(p[1]) || p[1] > 1e8) {
        invalid("zipf support size must be a positive integer");
      }
      break;
    case Distribution::poisson:
      defaults({4.0});
      if (!(p[0] > 0.0 && p[0] <= 30.0)) invalid("poisson rate must lie in (0, 30]");
      break;
    case Distribution::lowrank:
      defaults({20.0, 0.05});
      if (!(p[0] >= 1.0) || p[0] != std::floor(p[0]) || p[0] > 1e4) {
        invalid("lowrank rank must be a positive integer");
      }
      if (!(p[1] >= 0.0)) invalid("lowrank noise must be nonnegative");
      break;
  }
  return p;
}

DenseMatrix generate(const DistributionSpec& spec) {
  const std::vector<double> p = spec.resolved_parameters();
  DenseMatrix out(spec.rows, spec.cols);
  Rng rng(spec.seed);

  switch (spec.kind) {
    case Distribution::uniform: {
      const double width = p[1] - p[0];
      for (std::size_t i = 0; i < spec.rows; ++i) {
        for (auto& v : out.row(i)) v = p[0] + width * rng.uniform();
      }
      break;
    }
    case Distribution::normal:
      for (std::size_t i = 0; i < spec.rows; ++i) {
        for (auto& v : out.row(i)) v = p[0] + p[1] * rng.normal();
      }
      break;
    case Distribution::zipf: {
      const auto cdf = zipf_cdf(p[0], static_cast<std::size_t>(p[1]));
      for (std::size_t i = 0; i < spec.rows; ++i) {
        for (auto& v : out.row(i)) {
          const double u = rng.uniform();
          const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
          v = static_cast<double>(it - cdf.begin() + 1);
        }
      }
      break;
    }
    case Distribution::poisson:
      for (std::size_t i = 0; i < spec.rows; ++i) {
        for (auto& v : out.row(i)) v = poisson_inversion(p[0], rng);
      }
      break;
    case Distribution::lowrank: {
      const auto r = static_cast<std::size_t>(p[0]);
      DenseMatrix w(spec.rows, r);
      DenseMatrix h(r, spec.cols);
      for (std::size_t i = 0; i < spec.rows; ++i) {
        for (auto& v : w.row(i)) v = rng.uniform();
      }
      for (std::size_t l = 0; l < r; ++l) {
        for (auto& v : h.row(l)) v = rng.uniform() / static_cast<double>(r);
      }
      out = multiply(w, h);
      if (p[1] > 0.0) {
        for (std::size_t i = 0; i < spec.rows; ++i) {
          for (auto& v : out.row(i)) v += p[1] * rng.normal();
        }
      }
      break;
    }
  }
  return out;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) invalid("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) invalid("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  // The continued fraction converges quickly for x < (a + 1) / (a + b + 2);
  // otherwise evaluate the complement through I_x(a, b) = 1 - I_{1-x}(b, a).
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front) / a;

  constexpr double tiny = 1e-300;
  constexpr double tolerance = 1e-15;
  constexpr int max_terms = 20000;

  double f = 1.0;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  f = d;
  for (int m = 1; m <= max_terms; ++m) {
    const double md = m;
    // Even step.
    double num = md * (b - md) * x / ((a + 2.0 * md - 1.0) * (a + 2.0 * md));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;
    // Odd step.
    num = -(a + md) * (a + b + md) * x / ((a + 2.0 * md) * (a + 2.0 * md + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < tolerance) return front * f;
  }
  fail(ErrorCode::numeric, "incomplete beta continued fraction did not converge");
}

double t_sf(double t, std::size_t dof) {
  if (dof == 0) invalid("t distribution needs dof >= 1");
  if (std::isnan(t)) invalid("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double nu = static_cast<double>(dof);
  return regularized_incomplete_beta(0.5 * nu, 0.5, nu / (nu + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::dimension_mismatch, "paired t-test on samples of sizes " +
                                            std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
  }
  if (a.size() < 2) invalid("paired t-test needs at least two pairs");

  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];

  double sum = 0.0;
  for (double v : d) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult out;
  out.dof = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) return out;
    out.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
    out.p = 0.0;
    out.degenerate = true;
    return out;
  }
  out.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  out.p = std::clamp(t_sf(out.t, out.dof), 0.0, 1.0);
  return out;
}

}  // namespace srsvd
