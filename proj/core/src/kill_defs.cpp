#include "mutakill/kill_defs.hpp"

#include <algorithm>
#include <cctype>

#include "mutakill/errors.hpp"
#include "mutakill/parallel.hpp"
#include "text_util.hpp"

namespace mutakill {

namespace {

void check_equal_length(std::size_t lhs, std::size_t rhs, const char* what) {
  if (lhs != rhs) {
    throw UsageError(std::string(what) + ": length mismatch (" + std::to_string(lhs) + " vs " +
                     std::to_string(rhs) + ")");
  }
}

void check_alignment(const CorrectnessMatrix& original, const CorrectnessMatrix& mutant) {
  if (original.n_inputs() != mutant.n_inputs()) {
    throw UsageError("correctness matrices are not column-aligned");
  }
  if (original.instance_count() == 0 || mutant.instance_count() == 0) {
    throw UsageError("correctness matrices need at least one instance");
  }
}

void attach_killing_inputs(KillVerdict& verdict, std::vector<std::size_t> columns,
                           std::span<const std::string> input_ids) {
  if (!input_ids.empty()) {
    std::vector<std::string> ids;
    ids.reserve(columns.size());
    for (std::size_t col : columns) ids.push_back(input_ids[col]);
    verdict.killing_input_ids = std::move(ids);
  }
  verdict.killing_columns = std::move(columns);
}

}  // namespace

std::string to_string(KillDefinition def) {
  switch (def) {
    case KillDefinition::kd1: return "kd1";
    case KillDefinition::kd2: return "kd2";
    case KillDefinition::kd3: return "kd3";
    case KillDefinition::kd4: return "kd4";
    case KillDefinition::kdf: return "kdf";
  }
  throw UsageError("unknown kill definition");
}

KillDefinition kill_definition_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "kd1") return KillDefinition::kd1;
  if (lower == "kd2") return KillDefinition::kd2;
  if (lower == "kd3") return KillDefinition::kd3;
  if (lower == "kd4") return KillDefinition::kd4;
  if (lower == "kdf") return KillDefinition::kdf;
  throw UsageError("unknown kill definition `" + name + "` (expected kd1..kd4 or kdf)");
}

void KillParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  if (beta < 0.0) throw UsageError("beta must be >= 0");
  if (tau < 1) throw UsageError("tau must be >= 1");
}

KillVerdict kd1_killed(const AccuracySample& original, const AccuracySample& mutant,
                       const KillParams& params) {
  params.validate();
  const auto test =
      stats::two_sample_ttest(original.values, mutant.values, params.ttest_variant);
  const double d = stats::cohens_d(original.values, mutant.values);
  const double mean_orig = stats::mean(original.values);
  const double mean_mut = stats::mean(mutant.values);

  KillVerdict verdict;
  verdict.definition = KillDefinition::kd1;
  verdict.p_value = test.p_value;
  verdict.effect_size = d;
  verdict.killed = test.p_value < params.alpha && d >= params.beta &&
                   (!params.directional || mean_orig > mean_mut);
  return verdict;
}

KillVerdict kd2_killed(BoolSpan original_row, BoolSpan mutant_row,
                       std::span<const std::string> input_ids) {
  check_equal_length(original_row.size(), mutant_row.size(), "kd2 rows");
  if (original_row.empty()) throw UsageError("kd2 rows must be non-empty");

  std::vector<std::size_t> killing;
  for (std::size_t j = 0; j < original_row.size(); ++j) {
    if (original_row[j] && !mutant_row[j]) killing.push_back(j);
  }

  KillVerdict verdict;
  verdict.definition = KillDefinition::kd2;
  verdict.killed = !killing.empty();
  attach_killing_inputs(verdict, std::move(killing), input_ids);
  return verdict;
}

KillVerdict kd3_killed_class(std::span<const std::string> original_preds,
                             std::span<const std::string> mutant_preds, const GroundTruth& truth) {
  truth.validate();
  check_equal_length(original_preds.size(), truth.n_inputs(), "kd3 original predictions");
  check_equal_length(mutant_preds.size(), truth.n_inputs(), "kd3 mutant predictions");

  std::map<std::string, bool> per_class;
  for (const auto& label : truth.true_labels) {
    per_class.emplace(std::string(detail::trim(label)), false);
  }
  for (std::size_t t = 0; t < truth.n_inputs(); ++t) {
    const auto true_label = detail::trim(truth.true_labels[t]);
    if (detail::trim(original_preds[t]) == true_label &&
        detail::trim(mutant_preds[t]) != true_label) {
      per_class[std::string(true_label)] = true;
    }
  }

  KillVerdict verdict;
  verdict.definition = KillDefinition::kd3;
  verdict.killed = std::any_of(per_class.begin(), per_class.end(),
                               [](const auto& entry) { return entry.second; });
  verdict.per_class = std::move(per_class);
  return verdict;
}

KillVerdict kd4_killed(std::span<const std::string> original_preds,
                       std::span<const std::string> mutant_preds,
                       std::span<const std::string> input_ids) {
  check_equal_length(original_preds.size(), mutant_preds.size(), "kd4 predictions");

  std::vector<std::size_t> killing;
  for (std::size_t j = 0; j < original_preds.size(); ++j) {
    if (detail::trim(original_preds[j]) != detail::trim(mutant_preds[j])) killing.push_back(j);
  }

  KillVerdict verdict;
  verdict.definition = KillDefinition::kd4;
  verdict.killed = !killing.empty();
  attach_killing_inputs(verdict, std::move(killing), input_ids);
  return verdict;
}

stats::ContingencyTable column_table(const CorrectnessMatrix& original,
                                     const CorrectnessMatrix& mutant, std::size_t column) {
  check_alignment(original, mutant);
  if (column >= original.n_inputs()) throw UsageError("column index out of range");

  stats::ContingencyTable table;
  for (std::size_t i = 0; i < original.instance_count(); ++i) {
    original.bits.at(i, column) ? ++table.a : ++table.b;
  }
  for (std::size_t i = 0; i < mutant.instance_count(); ++i) {
    mutant.bits.at(i, column) ? ++table.c : ++table.d;
  }
  return table;
}

InputKillResult kdf_input_kills(const stats::ContingencyTable& table, double alpha,
                                stats::FisherTail tail) {
  InputKillResult result;
  result.table = table;
  result.p_value = stats::fisher_exact(table, tail).p_value;
  result.kills = result.p_value < alpha;
  return result;
}

InputKillResult kdf_input_kills(BoolSpan original_column, BoolSpan mutant_column, double alpha,
                                stats::FisherTail tail) {
  if (original_column.empty() || mutant_column.empty()) {
    throw UsageError("kdf columns need at least one instance per model");
  }
  stats::ContingencyTable table;
  for (auto bit : original_column) bit ? ++table.a : ++table.b;
  for (auto bit : mutant_column) bit ? ++table.c : ++table.d;
  return kdf_input_kills(table, alpha, tail);
}

KillVerdict kdf_killed(const CorrectnessMatrix& original, const CorrectnessMatrix& mutant,
                       std::span<const std::size_t> subset, const KillParams& params,
                       std::span<const std::string> input_ids) {
  params.validate();
  check_alignment(original, mutant);
  if (subset.empty()) throw UsageError("kdf subset must be non-empty");
  for (std::size_t col : subset) {
    if (col >= original.n_inputs()) throw UsageError("kdf subset index out of range");
  }

  const double alpha = params.bonferroni
                           ? params.alpha / static_cast<double>(subset.size())
                           : params.alpha;
  const auto tail = params.one_sided_fisher ? stats::FisherTail::one_sided_greater
                                            : stats::FisherTail::two_sided;

  // One Fisher test per column, each writing its own slot; the killing
  // list is then assembled in subset order.
  std::vector<std::uint8_t> kills(subset.size(), 0);
  parallel_for_index(subset.size(), [&](std::size_t k) {
    kills[k] = kdf_input_kills(column_table(original, mutant, subset[k]), alpha, tail).kills;
  });
  std::vector<std::size_t> killing;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (kills[k]) killing.push_back(subset[k]);
  }

  KillVerdict verdict;
  verdict.definition = KillDefinition::kdf;
  verdict.nki = static_cast<std::int64_t>(killing.size());
  verdict.killed = *verdict.nki >= params.tau;
  attach_killing_inputs(verdict, std::move(killing), input_ids);
  return verdict;
}

std::int64_t nki(const CorrectnessMatrix& original, const CorrectnessMatrix& mutant,
                 std::span<const std::size_t> subset, double alpha) {
  KillParams params;
  params.alpha = alpha;
  return *kdf_killed(original, mutant, subset, params).nki;
}

double mutation_score(std::span<const KillVerdict> verdicts) {
  if (verdicts.empty()) throw UsageError("mutation score of an empty verdict list");
  const KillDefinition def = verdicts.front().definition;
  std::size_t killed = 0;
  for (const auto& v : verdicts) {
    if (v.definition != def) {
      throw UsageError("mutation score requires verdicts of a single definition");
    }
    if (v.killed) ++killed;
  }
  return static_cast<double>(killed) / static_cast<double>(verdicts.size());
}

double class_kill_fraction(const KillVerdict& verdict) {
  if (!verdict.per_class || verdict.per_class->empty()) {
    throw UsageError("class kill fraction needs a KD3 verdict with per-class results");
  }
  std::size_t killed = 0;
  for (const auto& [cls, hit] : *verdict.per_class) {
    if (hit) ++killed;
  }
  return static_cast<double>(killed) / static_cast<double>(verdict.per_class->size());
}

}  // namespace mutakill
