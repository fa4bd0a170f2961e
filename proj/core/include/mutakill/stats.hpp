#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace mutakill::stats {

/// 2x2 table of correct/incorrect prediction counts, original model
/// instances on the top row, mutant instances on the bottom row.
struct ContingencyTable {
  std::int64_t a = 0;  // original, correct
  std::int64_t b = 0;  // original, incorrect
  std::int64_t c = 0;  // mutant, correct
  std::int64_t d = 0;  // mutant, incorrect

  std::int64_t row_original() const { return a + b; }
  std::int64_t row_mutant() const { return c + d; }
  std::int64_t col_correct() const { return a + c; }
  std::int64_t total() const { return a + b + c + d; }

  /// Counts must be non-negative and each row must hold at least one
  /// instance. Throws UsageError otherwise.
  void validate() const;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Outcome of a hypothesis test. `statistic` and `effect_size` are set
/// only where the test defines them. Zero-variance samples with unequal
/// means produce p = 0 with a +/-infinity sentinel instead of NaN.
struct TestResult {
  double p_value = 1.0;
  std::optional<double> statistic;
  std::optional<double> effect_size;
};

enum class TTestVariant { student_pooled, welch };

enum class FisherTail {
  two_sided,          // default; sums all tables at most as probable as observed
  one_sided_greater,  // tail where the original model is more often correct
};

/// log(n!) via a precomputed table, falling back to lgamma for large n.
/// Thread-safe after first use; supports margins well beyond 10^4 instances.
double log_factorial(std::int64_t n);

/// log of the binomial coefficient C(n, k). Returns -inf for k outside [0, n].
double log_binomial(std::int64_t n, std::int64_t k);

/// Point probability of the observed table under fixed margins:
/// C(a+b, a) * C(c+d, c) / C(a+b+c+d, a+c), computed in log space.
double hypergeom_point_prob(const ContingencyTable& t);

/// Fisher's exact test. Two-sided p sums the point probabilities of all
/// tables with the observed margins whose probability does not exceed the
/// observed one (with a 1 + 1e-7 relative tie guard). Result is in (0, 1].
TestResult fisher_exact(const ContingencyTable& t, FisherTail tail = FisherTail::two_sided);

/// Two-sided two-sample t-test. The statistic is positive when mean(x)
/// exceeds mean(y). Requires at least two values per sample.
TestResult two_sample_ttest(std::span<const double> x, std::span<const double> y,
                            TTestVariant variant = TTestVariant::student_pooled);

/// Cohen's d with pooled standard deviation (n-1 sample variances),
/// signed as mean(x) - mean(y). Zero-variance samples yield 0 when the
/// means agree and +/-infinity when they do not.
double cohens_d(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> xs);

/// Unbiased sample variance (n-1 denominator). Requires size >= 2.
double sample_variance(std::span<const double> xs);

}  // namespace mutakill::stats
