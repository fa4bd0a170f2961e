#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mutakill/matrix_io.hpp"
#include "mutakill/stats.hpp"

namespace mutakill {

enum class KillDefinition { kd1, kd2, kd3, kd4, kdf };

std::string to_string(KillDefinition def);
KillDefinition kill_definition_from_string(const std::string& name);

/// Thresholds and toggles shared by the kill definitions.
struct KillParams {
  double alpha = 0.05;     // significance level
  double beta = 0.2;       // Cohen's d threshold (KD1)
  std::int64_t tau = 1;    // killing-input count threshold (KDF)
  bool directional = true;  // KD1 additionally requires mean(original) > mean(mutant)
  stats::TTestVariant ttest_variant = stats::TTestVariant::student_pooled;
  bool one_sided_fisher = false;
  bool bonferroni = false;  // divide alpha by the subset size for per-input tests

  void validate() const;
};

/// Verdict of one kill definition for one mutant. Optional fields are set
/// only where the definition produces them.
struct KillVerdict {
  KillDefinition definition = KillDefinition::kdf;
  bool killed = false;
  std::optional<double> p_value;
  std::optional<double> effect_size;
  std::optional<std::int64_t> nki;
  std::optional<std::vector<std::string>> killing_input_ids;
  std::optional<std::vector<std::size_t>> killing_columns;
  std::optional<std::map<std::string, bool>> per_class;  // KD3 only
};

/// Per-input Fisher outcome for one (original, mutant) column pair.
struct InputKillResult {
  bool kills = false;
  double p_value = 1.0;
  stats::ContingencyTable table;
};

using BoolSpan = std::span<const std::uint8_t>;  // nonzero = correct prediction

/// Statistical killing: significant accuracy difference over model
/// instances (t-test p < alpha, Cohen's d >= beta, and, when directional,
/// mean(original) > mean(mutant)). d is signed original minus mutant.
KillVerdict kd1_killed(const AccuracySample& original, const AccuracySample& mutant,
                       const KillParams& params);

/// Standard killing: some input where the original instance is correct and
/// the mutant instance is incorrect.
KillVerdict kd2_killed(BoolSpan original_row, BoolSpan mutant_row,
                       std::span<const std::string> input_ids = {});

/// Class-level killing: per class C, some input of true class C that the
/// original predicts as C and the mutant does not.
KillVerdict kd3_killed_class(std::span<const std::string> original_preds,
                             std::span<const std::string> mutant_preds, const GroundTruth& truth);

/// Input-level killing: some input where the two models' labels differ
/// (ground truth plays no role).
KillVerdict kd4_killed(std::span<const std::string> original_preds,
                       std::span<const std::string> mutant_preds,
                       std::span<const std::string> input_ids = {});

/// Contingency table of one input: correct/incorrect counts per model.
stats::ContingencyTable column_table(const CorrectnessMatrix& original,
                                     const CorrectnessMatrix& mutant, std::size_t column);

/// Fisher's exact test on one input's contingency table; the input kills
/// the mutant when p < alpha.
InputKillResult kdf_input_kills(BoolSpan original_column, BoolSpan mutant_column, double alpha,
                                stats::FisherTail tail = stats::FisherTail::two_sided);
InputKillResult kdf_input_kills(const stats::ContingencyTable& table, double alpha,
                                stats::FisherTail tail = stats::FisherTail::two_sided);

/// Fisher-based killing over a column subset: killed iff at least tau
/// inputs in the subset kill the mutant. When input_ids is provided (full
/// matrix width, ground-truth order) the verdict lists the killing ids.
KillVerdict kdf_killed(const CorrectnessMatrix& original, const CorrectnessMatrix& mutant,
                       std::span<const std::size_t> subset, const KillParams& params,
                       std::span<const std::string> input_ids = {});

/// Number of killing inputs in the subset.
std::int64_t nki(const CorrectnessMatrix& original, const CorrectnessMatrix& mutant,
                 std::span<const std::size_t> subset, double alpha);

/// Fraction of killed mutants. All verdicts must share one definition.
double mutation_score(std::span<const KillVerdict> verdicts);

/// Fraction of KD3-killed classes for one verdict (the per-class view).
double class_kill_fraction(const KillVerdict& verdict);

}  // namespace mutakill
