#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "mutakill/errors.hpp"
#include "mutakill/stats.hpp"
#include "oracles.hpp"

using namespace mutakill;

namespace {

std::vector<double> random_sample(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> xs(n);
  for (auto& x : xs) {
    x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return xs;
}

}  // namespace

TEST_CASE("log_factorial matches direct products") {
  CHECK(stats::log_factorial(0) == 0.0);
  CHECK(stats::log_factorial(1) == 0.0);
  CHECK(stats::log_factorial(5) == doctest::Approx(std::log(120.0)).epsilon(1e-14));
  CHECK(stats::log_factorial(20) ==
        doctest::Approx(std::lgamma(21.0)).epsilon(1e-13));
  // Past the table, lgamma takes over seamlessly.
  CHECK(stats::log_factorial(100000) ==
        doctest::Approx(std::lgamma(100001.0)).epsilon(1e-12));
  CHECK_THROWS_AS(stats::log_factorial(-1), UsageError);
}

TEST_CASE("log_binomial handles the support edges") {
  CHECK(stats::log_binomial(10, 3) == doctest::Approx(std::log(120.0)).epsilon(1e-13));
  CHECK(stats::log_binomial(10, 0) == 0.0);
  CHECK(stats::log_binomial(10, 10) == 0.0);
  CHECK(stats::log_binomial(10, 11) == -std::numeric_limits<double>::infinity());
  CHECK(stats::log_binomial(10, -1) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("hypergeometric point probability") {
  const stats::ContingencyTable table{17, 3, 11, 9};
  CHECK(stats::hypergeom_point_prob(table) ==
        doctest::Approx(oracles::hypergeom_point(17, 3, 11, 9)).epsilon(1e-12));

  SUBCASE("point probabilities over a fixed-margin family sum to one") {
    const std::int64_t row_o = 20, row_m = 20, col = 28;
    double sum = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(0, col - row_m);
         k <= std::min(row_o, col); ++k) {
      sum += stats::hypergeom_point_prob({k, row_o - k, col - k, row_m - (col - k)});
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fisher_exact reproduces the worked contingency tables") {
  CHECK(stats::fisher_exact({17, 3, 11, 9}).p_value == doctest::Approx(0.082).epsilon(6e-3));
  CHECK(stats::fisher_exact({18, 2, 11, 9}).p_value == doctest::Approx(0.031).epsilon(2e-2));
  // Pinned against an exact big-integer enumeration.
  CHECK(stats::fisher_exact({17, 3, 11, 9}).p_value ==
        doctest::Approx(oracles::fisher_two_sided(17, 3, 11, 9)).epsilon(1e-12));
  CHECK(stats::fisher_exact({18, 2, 11, 9}).p_value ==
        doctest::Approx(oracles::fisher_two_sided(18, 2, 11, 9)).epsilon(1e-12));
  CHECK(stats::fisher_exact({17, 3, 11, 9}, stats::FisherTail::one_sided_greater).p_value ==
        doctest::Approx(oracles::fisher_one_sided_greater(17, 3, 11, 9)).epsilon(1e-12));
}

TEST_CASE("fisher_exact degenerate and symmetric tables") {
  CHECK(stats::fisher_exact({5, 0, 5, 0}).p_value == doctest::Approx(1.0));
  CHECK(stats::fisher_exact({0, 5, 0, 5}).p_value == doctest::Approx(1.0));
  CHECK(stats::fisher_exact({10, 10, 10, 10}).p_value == doctest::Approx(1.0));
  CHECK(stats::fisher_exact({20, 0, 0, 20}).p_value ==
        doctest::Approx(oracles::fisher_two_sided(20, 0, 0, 20)).epsilon(1e-10));
  CHECK_THROWS_AS(stats::fisher_exact({-1, 2, 3, 4}), UsageError);
  CHECK_THROWS_AS(stats::fisher_exact({0, 0, 3, 4}), UsageError);
}

TEST_CASE("fisher_exact equals exact enumeration on random tables") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 200; ++i) {
    const auto row_o = static_cast<std::int64_t>(1 + rng() % 30);
    const auto row_m = static_cast<std::int64_t>(1 + rng() % 30);
    const auto a = static_cast<std::int64_t>(rng() % (row_o + 1));
    const auto c = static_cast<std::int64_t>(rng() % (row_m + 1));
    const stats::ContingencyTable table{a, row_o - a, c, row_m - c};
    const double expected = oracles::fisher_two_sided(a, row_o - a, c, row_m - c);
    CHECK(stats::fisher_exact(table).p_value == doctest::Approx(expected).epsilon(1e-10));
    CHECK(stats::fisher_exact(table).p_value > 0.0);
    CHECK(stats::fisher_exact(table).p_value <= 1.0);
  }
}

TEST_CASE("two_sample_ttest matches the textbook oracle") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_sample(rng, 2 + rng() % 30);
    const auto y = random_sample(rng, 2 + rng() % 30);

    const auto pooled = stats::two_sample_ttest(x, y);
    const auto pooled_oracle = oracles::ttest_pooled(x, y);
    CHECK(*pooled.statistic == doctest::Approx(pooled_oracle.t).epsilon(1e-11));
    CHECK(pooled.p_value == doctest::Approx(pooled_oracle.p).epsilon(1e-10));

    const auto welch = stats::two_sample_ttest(x, y, stats::TTestVariant::welch);
    const auto welch_oracle = oracles::ttest_welch(x, y);
    CHECK(*welch.statistic == doctest::Approx(welch_oracle.t).epsilon(1e-11));
    CHECK(welch.p_value == doctest::Approx(welch_oracle.p).epsilon(1e-10));

    CHECK(stats::cohens_d(x, y) == doctest::Approx(pooled_oracle.d).epsilon(1e-11));
  }
}

TEST_CASE("t-test degenerate samples") {
  const std::vector<double> flat{0.5, 0.5, 0.5};
  const std::vector<double> flat_high{0.9, 0.9, 0.9};

  SUBCASE("identical groups") {
    const auto result = stats::two_sample_ttest(flat, flat);
    CHECK(result.p_value == 1.0);
    CHECK(*result.statistic == 0.0);
    CHECK(stats::cohens_d(flat, flat) == 0.0);
  }
  SUBCASE("separated constant groups") {
    const auto result = stats::two_sample_ttest(flat_high, flat);
    CHECK(result.p_value == 0.0);
    CHECK(std::isinf(*result.statistic));
    CHECK(*result.statistic > 0.0);
    CHECK(std::isinf(stats::cohens_d(flat_high, flat)));
    CHECK(stats::cohens_d(flat, flat_high) < 0.0);
  }
  SUBCASE("undersized samples are rejected") {
    const std::vector<double> one{0.5};
    CHECK_THROWS_AS(stats::two_sample_ttest(one, flat), UsageError);
    CHECK_THROWS_AS(stats::cohens_d(flat, one), UsageError);
    CHECK_THROWS_AS(stats::sample_variance(one), UsageError);
    CHECK_THROWS_AS(stats::mean({}), UsageError);
  }
}

TEST_CASE("t statistic sign tracks the mean difference") {
  const std::vector<double> lo{0.1, 0.2, 0.3, 0.2};
  const std::vector<double> hi{0.7, 0.8, 0.9, 0.8};
  CHECK(*stats::two_sample_ttest(hi, lo).statistic > 0.0);
  CHECK(*stats::two_sample_ttest(lo, hi).statistic < 0.0);
  CHECK(stats::cohens_d(hi, lo) > 0.0);
  CHECK(stats::two_sample_ttest(hi, lo).p_value ==
        doctest::Approx(stats::two_sample_ttest(lo, hi).p_value).epsilon(1e-14));
}

TEST_CASE("shift and scale invariance") {
  std::mt19937_64 rng(99);
  const auto x = random_sample(rng, 12);
  const auto y = random_sample(rng, 9);

  auto shifted = [](std::vector<double> v, double c) {
    for (auto& e : v) e += c;
    return v;
  };
  auto scaled = [](std::vector<double> v, double c) {
    for (auto& e : v) e *= c;
    return v;
  };

  const auto base = stats::two_sample_ttest(x, y);
  const auto moved = stats::two_sample_ttest(shifted(x, 3.25), shifted(y, 3.25));
  CHECK(*moved.statistic == doctest::Approx(*base.statistic).epsilon(1e-9));
  CHECK(moved.p_value == doctest::Approx(base.p_value).epsilon(1e-9));
  CHECK(stats::cohens_d(shifted(x, 3.25), shifted(y, 3.25)) ==
        doctest::Approx(stats::cohens_d(x, y)).epsilon(1e-9));
  CHECK(stats::cohens_d(scaled(x, 4.0), scaled(y, 4.0)) ==
        doctest::Approx(stats::cohens_d(x, y)).epsilon(1e-9));
}

TEST_CASE("contingency table helpers") {
  const stats::ContingencyTable t{17, 3, 11, 9};
  CHECK(t.row_original() == 20);
  CHECK(t.row_mutant() == 20);
  CHECK(t.col_correct() == 28);
  CHECK(t.total() == 40);
}
