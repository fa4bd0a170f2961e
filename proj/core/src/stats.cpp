#include "mutakill/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "mutakill/errors.hpp"

namespace mutakill::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative guard when comparing point probabilities in the two-sided sum,
// matching the convention of the reference implementations of the test.
constexpr double kTieTolerance = 1e-7;

constexpr std::size_t kLogFactTableSize = 1 << 16;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactTableSize);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    }
    return t;
  }();
  return table;
}

double two_sided_p_from_t(double t, double df) {
  const boost::math::students_t dist(df);
  const double tail = boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(2.0 * tail, 0.0, 1.0);
}

}  // namespace

void ContingencyTable::validate() const {
  if (a < 0 || b < 0 || c < 0 || d < 0) {
    throw UsageError("contingency table counts must be non-negative");
  }
  if (row_original() < 1 || row_mutant() < 1) {
    throw UsageError("contingency table needs at least one instance per row");
  }
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw UsageError("log_factorial of negative value");
  const auto& table = log_factorial_table();
  if (static_cast<std::size_t>(n) < table.size()) {
    return table[static_cast<std::size_t>(n)];
  }
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -kInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double hypergeom_point_prob(const ContingencyTable& t) {
  t.validate();
  const double lp = log_binomial(t.row_original(), t.a) + log_binomial(t.row_mutant(), t.c) -
                    log_binomial(t.total(), t.col_correct());
  return std::clamp(std::exp(lp), 0.0, 1.0);
}

TestResult fisher_exact(const ContingencyTable& t, FisherTail tail) {
  t.validate();
  const std::int64_t row_o = t.row_original();
  const std::int64_t row_m = t.row_mutant();
  const std::int64_t col = t.col_correct();
  const std::int64_t n = t.total();

  // Support of the original-correct count k under fixed margins.
  const std::int64_t k_lo = std::max<std::int64_t>(0, col - row_m);
  const std::int64_t k_hi = std::min(row_o, col);

  const double log_denom = log_binomial(n, col);
  auto log_pmf = [&](std::int64_t k) {
    return log_binomial(row_o, k) + log_binomial(row_m, col - k) - log_denom;
  };

  const double log_obs = log_pmf(t.a);
  double p = 0.0;
  if (tail == FisherTail::one_sided_greater) {
    for (std::int64_t k = t.a; k <= k_hi; ++k) {
      p += std::exp(log_pmf(k));
    }
  } else {
    const double cutoff = log_obs + std::log1p(kTieTolerance);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
      const double lp = log_pmf(k);
      if (lp <= cutoff) p += std::exp(lp);
    }
  }

  TestResult result;
  result.p_value = std::min(p, 1.0);
  return result;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw UsageError("mean of empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw UsageError("sample variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) {
    const double dev = x - m;
    ss += dev * dev;
  }
  return ss / static_cast<double>(xs.size() - 1);
}

TestResult two_sample_ttest(std::span<const double> x, std::span<const double> y,
                            TTestVariant variant) {
  if (x.size() < 2 || y.size() < 2) {
    throw UsageError("t-test needs at least two values per sample");
  }
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double mx = mean(x);
  const double my = mean(y);
  const double vx = sample_variance(x);
  const double vy = sample_variance(y);

  TestResult result;
  if (vx == 0.0 && vy == 0.0) {
    // Degenerate separation: identical values within each group.
    if (mx == my) {
      result.p_value = 1.0;
      result.statistic = 0.0;
    } else {
      result.p_value = 0.0;
      result.statistic = mx > my ? kInf : -kInf;
    }
    return result;
  }

  double t = 0.0;
  double df = 0.0;
  if (variant == TTestVariant::student_pooled) {
    const double pooled = ((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0);
    t = (mx - my) / std::sqrt(pooled * (1.0 / nx + 1.0 / ny));
    df = nx + ny - 2.0;
  } else {
    const double sx = vx / nx;
    const double sy = vy / ny;
    t = (mx - my) / std::sqrt(sx + sy);
    df = (sx + sy) * (sx + sy) / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
  }

  result.p_value = two_sided_p_from_t(t, df);
  result.statistic = t;
  return result;
}

double cohens_d(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw UsageError("Cohen's d needs at least two values per sample");
  }
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double mx = mean(x);
  const double my = mean(y);
  const double vx = sample_variance(x);
  const double vy = sample_variance(y);

  const double pooled = ((nx - 1.0) * vx + (ny - 1.0) * vy) / (nx + ny - 2.0);
  if (pooled == 0.0) {
    if (mx == my) return 0.0;
    return mx > my ? kInf : -kInf;
  }
  return (mx - my) / std::sqrt(pooled);
}

}  // namespace mutakill::stats
