#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "mutakill/errors.hpp"
#include "mutakill/monotonicity.hpp"
#include "mutakill/sim_gen.hpp"
#include "oracles.hpp"

using namespace mutakill;

namespace {

CorrectnessMatrix matrix_from_rows(std::string model_id,
                                   const std::vector<std::vector<int>>& rows) {
  CorrectnessMatrix cm;
  cm.model_id = std::move(model_id);
  cm.bits = BoolMatrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      cm.bits.set(i, j, rows[i][j] != 0);
    }
  }
  return cm;
}

AccuracySample prefix_accuracy(const BoolMatrix& m, std::size_t size) {
  AccuracySample s;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::int64_t correct = 0;
    for (std::size_t j = 0; j < size; ++j) correct += m.at(i, j) ? 1 : 0;
    s.values.push_back(static_cast<double>(correct) / static_cast<double>(size));
  }
  return s;
}

AuditInputs correctness_inputs(const MatrixPair& pair) {
  AuditInputs in;
  in.original_correctness = &pair.original;
  in.mutant_correctness = &pair.mutant;
  return in;
}

}  // namespace

TEST_CASE("statistical killing is not monotone on the adversarial fixture") {
  const auto pair = adversarial_kd1(20, 100, 9900);
  AuditConfig cfg;
  cfg.definition = KillDefinition::kd1;

  const auto trace = audit(correctness_inputs(pair), cfg);
  REQUIRE(trace.sizes.size() == 100);
  CHECK(trace.sizes.front() == 100);
  CHECK(trace.sizes.back() == 10000);

  // Killed on every prefix up to 700, spared from 800 onward.
  for (std::size_t idx = 0; idx < trace.sizes.size(); ++idx) {
    CHECK(trace.killed[idx] == (trace.sizes[idx] <= 700 ? 1 : 0));
  }
  CHECK_FALSE(is_monotone(trace));
  REQUIRE(trace.violations.size() == 1);
  CHECK(trace.violations.front() == AuditTrace::Violation{700, 800});
  CHECK(trace.witness_pair_count == 7 * 93);

  // The flip happens because the p-value crosses alpha between the sizes.
  const auto idx_of = [](std::int64_t size) { return static_cast<std::size_t>(size / 100 - 1); };
  CHECK(*trace.p_values[idx_of(700)] == doctest::Approx(0.046820350766430395).epsilon(1e-9));
  CHECK(*trace.p_values[idx_of(800)] == doctest::Approx(0.08623954159712541).epsilon(1e-9));
  CHECK(*trace.p_values[idx_of(700)] < 0.05);
  CHECK(*trace.p_values[idx_of(800)] >= 0.05);

  // Cross-check a few sizes against the reference t-test on accuracies
  // recomputed straight from the matrices.
  for (const std::int64_t size : {300L, 700L, 800L, 5000L, 10000L}) {
    const auto orig = prefix_accuracy(pair.original.bits, static_cast<std::size_t>(size));
    const auto mut = prefix_accuracy(pair.mutant.bits, static_cast<std::size_t>(size));
    const auto oracle = oracles::ttest_pooled(orig.values, mut.values);
    CHECK(*trace.p_values[idx_of(size)] == doctest::Approx(oracle.p).epsilon(1e-10));
    CHECK(*trace.effect_sizes[idx_of(size)] == doctest::Approx(oracle.d).epsilon(1e-10));
  }
}

TEST_CASE("fisher-based killing is monotone on the adversarial fixture") {
  const auto pair = adversarial_kd1(20, 100, 9900);
  AuditConfig cfg;
  cfg.definition = KillDefinition::kdf;

  const auto trace = audit(correctness_inputs(pair), cfg);
  CHECK(is_monotone(trace));
  CHECK(trace.violations.empty());
  CHECK(trace.witness_pair_count == 0);
  // All 100 strong columns kill; the noise columns, identical across
  // models, never do. NKI is therefore flat at 100.
  for (std::size_t idx = 0; idx < trace.sizes.size(); ++idx) {
    CHECK(trace.killed[idx] == 1);
    CHECK(*trace.nki[idx] == 100);
  }
}

TEST_CASE("nki never decreases along any kdf audit") {
  const auto pair = adversarial_kd1(20, 13, 37);
  AuditConfig cfg;
  cfg.definition = KillDefinition::kdf;
  cfg.start = 1;
  cfg.step = 3;
  for (const bool bonferroni : {false, true}) {
    cfg.params.bonferroni = bonferroni;
    const auto trace = audit(correctness_inputs(pair), cfg);
    if (!bonferroni) {
      for (std::size_t idx = 1; idx < trace.sizes.size(); ++idx) {
        CHECK(*trace.nki[idx] >= *trace.nki[idx - 1]);
      }
      CHECK(is_monotone(trace));
      // All 13 strong columns kill once present; the grid hits size 49.
      CHECK(*trace.nki.back() == 13);
    }
    // Either way every size got a count.
    for (const auto& count : trace.nki) CHECK(count.has_value());
  }
}

TEST_CASE("kd2 audit kills once the first witness column enters") {
  const auto orig = matrix_from_rows("orig", {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1}});
  const auto mut = matrix_from_rows("mut", {{1, 1, 1, 1, 1, 1, 0, 1, 1, 1}});
  AuditInputs in;
  in.original_correctness = &orig;
  in.mutant_correctness = &mut;
  AuditConfig cfg;
  cfg.definition = KillDefinition::kd2;
  cfg.start = 2;
  cfg.step = 2;

  const auto trace = audit(in, cfg);
  CHECK(trace.sizes == std::vector<std::int64_t>{2, 4, 6, 8, 10});
  CHECK(trace.killed == std::vector<std::uint8_t>{0, 0, 0, 1, 1});
  CHECK(is_monotone(trace));
  // No statistics for the existential definitions.
  for (const auto& p : trace.p_values) CHECK_FALSE(p.has_value());
  for (const auto& count : trace.nki) CHECK_FALSE(count.has_value());
}

TEST_CASE("kd2 audit respects the instance pairing") {
  const auto orig = matrix_from_rows("orig", {{1, 1, 1, 1}, {1, 1, 1, 1}});
  const auto mut = matrix_from_rows("mut", {{1, 1, 1, 1}, {0, 1, 1, 1}});
  AuditInputs in;
  in.original_correctness = &orig;
  in.mutant_correctness = &mut;
  AuditConfig cfg;
  cfg.definition = KillDefinition::kd2;
  cfg.start = 1;
  cfg.step = 1;

  CHECK(audit(in, cfg).killed == std::vector<std::uint8_t>{0, 0, 0, 0});
  cfg.mutant_instance = 1;
  CHECK(audit(in, cfg).killed == std::vector<std::uint8_t>{1, 1, 1, 1});
  cfg.mutant_instance = 2;
  CHECK_THROWS_AS(audit(in, cfg), UsageError);
}

TEST_CASE("kd3 and kd4 audits see different first witnesses") {
  GroundTruth truth;
  truth.input_ids = {"t0", "t1", "t2", "t3", "t4", "t5"};
  truth.true_labels = {"a", "a", "a", "a", "a", "a"};
  PredictionMatrix orig;
  orig.model_id = "orig";
  orig.instance_ids = {"r0"};
  // Column 1: both wrong but differently (kd4 witness, not kd3).
  // Column 3: original right, mutant wrong (witness for both).
  orig.predictions = {{"a", "b", "a", "a", "a", "a"}};
  PredictionMatrix mut = orig;
  mut.model_id = "mut";
  mut.predictions = {{"a", "c", "a", "b", "a", "a"}};

  AuditInputs in;
  in.original_predictions = &orig;
  in.mutant_predictions = &mut;
  in.truth = &truth;
  AuditConfig cfg;
  cfg.start = 1;
  cfg.step = 1;

  cfg.definition = KillDefinition::kd4;
  CHECK(audit(in, cfg).killed == std::vector<std::uint8_t>{0, 1, 1, 1, 1, 1});
  cfg.definition = KillDefinition::kd3;
  CHECK(audit(in, cfg).killed == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1});

  // kd4 needs no ground truth at all.
  in.truth = nullptr;
  cfg.definition = KillDefinition::kd4;
  CHECK(audit(in, cfg).killed.back() == 1);
}

TEST_CASE("audit input requirements") {
  const auto pair = adversarial_kd1(4, 2, 6);
  GroundTruth truth;
  PredictionMatrix pm;
  AuditConfig cfg;
  cfg.start = 1;
  cfg.step = 1;

  SUBCASE("kd1 without correctness or predictions") {
    AuditInputs in;
    cfg.definition = KillDefinition::kd1;
    CHECK_THROWS_WITH_AS(audit(in, cfg), doctest::Contains("correctness"), UsageError);
  }
  SUBCASE("kd1 with a single instance") {
    const auto orig = matrix_from_rows("orig", {{1, 1, 1}});
    const auto mut = matrix_from_rows("mut", {{1, 0, 1}});
    AuditInputs in;
    in.original_correctness = &orig;
    in.mutant_correctness = &mut;
    cfg.definition = KillDefinition::kd1;
    CHECK_THROWS_WITH_AS(audit(in, cfg), doctest::Contains("two instances"), UsageError);
  }
  SUBCASE("kd3 without predictions") {
    cfg.definition = KillDefinition::kd3;
    CHECK_THROWS_WITH_AS(audit(correctness_inputs(pair), cfg),
                         doctest::Contains("prediction"), UsageError);
  }
  SUBCASE("kd3 without truth") {
    PredictionMatrix orig;
    orig.model_id = "orig";
    orig.instance_ids = {"r0"};
    orig.predictions = {{"a", "b"}};
    PredictionMatrix mut = orig;
    mut.model_id = "mut";
    AuditInputs in;
    in.original_predictions = &orig;
    in.mutant_predictions = &mut;
    cfg.definition = KillDefinition::kd3;
    CHECK_THROWS_WITH_AS(audit(in, cfg), doctest::Contains("ground truth"), UsageError);
  }
  SUBCASE("correctness derived from predictions plus truth") {
    truth.input_ids = {"t0", "t1"};
    truth.true_labels = {"a", "b"};
    PredictionMatrix orig;
    orig.model_id = "orig";
    orig.instance_ids = {"r0"};
    orig.predictions = {{"a", "b"}};
    PredictionMatrix mut = orig;
    mut.model_id = "mut";
    mut.predictions = {{"a", "x"}};
    AuditInputs in;
    in.original_predictions = &orig;
    in.mutant_predictions = &mut;
    in.truth = &truth;
    cfg.definition = KillDefinition::kd2;
    const auto trace = audit(in, cfg);
    CHECK(trace.killed == std::vector<std::uint8_t>{0, 1});
  }
}

TEST_CASE("size grid validation and contents") {
  const auto orig = matrix_from_rows("orig", {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}});
  const auto mut = matrix_from_rows("mut", {{0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}});
  AuditInputs in;
  in.original_correctness = &orig;
  in.mutant_correctness = &mut;
  AuditConfig cfg;
  cfg.definition = KillDefinition::kd2;
  cfg.start = 3;
  cfg.step = 4;

  CHECK(audit(in, cfg).sizes == std::vector<std::int64_t>{3, 7, 11});
  cfg.end = 7;
  CHECK(audit(in, cfg).sizes == std::vector<std::int64_t>{3, 7});
  cfg.end = 13;
  CHECK_THROWS_WITH_AS(audit(in, cfg), doctest::Contains("exceeds the input count"), UsageError);
  cfg.end = 2;
  CHECK_THROWS_WITH_AS(audit(in, cfg), doctest::Contains("exceeds end"), UsageError);
  cfg.end.reset();
  cfg.start = 0;
  CHECK_THROWS_AS(audit(in, cfg), UsageError);
  cfg.start = 3;
  cfg.step = 0;
  CHECK_THROWS_AS(audit(in, cfg), UsageError);
}

TEST_CASE("deterministic permutation properties") {
  const auto perm = deterministic_permutation(50, 1);
  CHECK(perm == deterministic_permutation(50, 1));
  CHECK(perm != deterministic_permutation(50, 2));
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == all_columns(50));
  CHECK(deterministic_permutation(0, 9).empty());
  CHECK(deterministic_permutation(1, 9) == std::vector<std::size_t>{0});
}

TEST_CASE("shuffled audits are reproducible and keep the full-set verdict") {
  const auto pair = adversarial_kd1(4, 5, 20);
  AuditConfig cfg;
  cfg.definition = KillDefinition::kdf;
  cfg.start = 1;
  cfg.step = 3;

  const auto plain = audit(correctness_inputs(pair), cfg);
  cfg.shuffle_seed = 7;
  const auto shuffled = audit(correctness_inputs(pair), cfg);
  const auto shuffled_again = audit(correctness_inputs(pair), cfg);
  CHECK(trace_to_csv(shuffled) == trace_to_csv(shuffled_again));
  // 25 columns: the grid ends at 25 in both traces, where the prefix is the
  // whole set and the permutation cannot matter.
  REQUIRE(plain.sizes.back() == 25);
  REQUIRE(shuffled.sizes.back() == 25);
  CHECK(plain.killed.back() == shuffled.killed.back());
  CHECK(*plain.nki.back() == *shuffled.nki.back());
}

TEST_CASE("trace csv layout") {
  AuditTrace trace;
  trace.definition = KillDefinition::kd1;
  trace.sizes = {10, 20};
  trace.killed = {1, 0};
  trace.p_values = {0.25, std::nullopt};
  trace.effect_sizes = {std::nullopt, 1.5};
  trace.nki = {std::nullopt, 3};

  CHECK(trace_to_csv(trace) ==
        "size,killed,p_value,effect_size,nki\n"
        "10,true,0.25,,\n"
        "20,false,,1.5,3\n");
}

TEST_CASE("trace json parses back with the summary fields") {
  AuditTrace trace;
  trace.definition = KillDefinition::kdf;
  trace.sizes = {5, 10, 15};
  trace.killed = {1, 0, 0};
  trace.p_values = {std::nullopt, std::nullopt, std::nullopt};
  trace.effect_sizes = trace.p_values;
  trace.nki = {2, 0, 0};
  trace.violations.push_back({5, 10});
  trace.witness_pair_count = 2;

  const auto doc = nlohmann::json::parse(trace_to_json(trace));
  CHECK(doc["definition"] == "kdf");
  CHECK(doc["monotone"] == false);
  CHECK(doc["witness_pair_count"] == 2);
  REQUIRE(doc["violations"].size() == 1);
  CHECK(doc["violations"][0]["size_killed"] == 5);
  CHECK(doc["violations"][0]["size_not_killed"] == 10);
  CHECK(doc["sizes"] == nlohmann::json({5, 10, 15}));
  CHECK(doc["killed"] == nlohmann::json({true, false, false}));
  CHECK(doc["p_values"][0].is_null());
  CHECK(doc["nki"] == nlohmann::json({2, 0, 0}));
}

TEST_CASE("monotone flag over hand-built sequences") {
  AuditTrace trace;
  const auto with_killed = [&](std::vector<std::uint8_t> killed) {
    trace.killed = std::move(killed);
    trace.sizes.assign(trace.killed.size(), 0);
    return is_monotone(trace);
  };
  CHECK(with_killed({}));
  CHECK(with_killed({0, 0, 0}));
  CHECK(with_killed({0, 1, 1}));
  CHECK(with_killed({1, 1, 1}));
  CHECK_FALSE(with_killed({1, 0, 1}));
  CHECK_FALSE(with_killed({0, 1, 0}));
}
