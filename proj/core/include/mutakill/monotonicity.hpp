#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mutakill/kill_defs.hpp"
#include "mutakill/matrix_io.hpp"

namespace mutakill {

/// Cumulative sweep configuration. Prefix sizes are start, start+step, ...
/// up to end (end defaults to the full input count and is included only
/// when the grid lands on it exactly).
struct AuditConfig {
  std::int64_t start = 100;
  std::int64_t step = 100;
  std::optional<std::int64_t> end;
  KillDefinition definition = KillDefinition::kdf;
  KillParams params;

  /// Deterministic column permutation applied before the sweep; absent
  /// means ground-truth file order.
  std::optional<std::uint64_t> shuffle_seed;

  /// Instance pairing for the non-statistical definitions (KD2-KD4).
  std::size_t original_instance = 0;
  std::size_t mutant_instance = 0;
};

/// Which inputs an audit can draw on. Correctness matrices serve KD1, KD2
/// and KDF; prediction matrices (plus truth for KD3) serve KD3 and KD4.
/// Correctness is derived on the fly when only predictions are given.
struct AuditInputs {
  const CorrectnessMatrix* original_correctness = nullptr;
  const CorrectnessMatrix* mutant_correctness = nullptr;
  const PredictionMatrix* original_predictions = nullptr;
  const PredictionMatrix* mutant_predictions = nullptr;
  const GroundTruth* truth = nullptr;
};

/// Kill status per cumulative test-set size, with monotonicity violations.
struct AuditTrace {
  KillDefinition definition = KillDefinition::kdf;
  std::vector<std::int64_t> sizes;
  std::vector<std::uint8_t> killed;  // aligned with sizes, 0/1
  std::vector<std::optional<double>> p_values;
  std::vector<std::optional<double>> effect_sizes;
  std::vector<std::optional<std::int64_t>> nki;

  struct Violation {
    std::int64_t size_killed = 0;
    std::int64_t size_not_killed = 0;
    friend bool operator==(const Violation&, const Violation&) = default;
  };

  /// Consecutive killed -> not-killed transitions, in size order.
  std::vector<Violation> violations;
  /// Count of all ordered pairs (i, j), i < j, killed at i but not at j.
  std::int64_t witness_pair_count = 0;
};

/// Sweeps cumulative prefixes and records the verdict per size.
AuditTrace audit(const AuditInputs& inputs, const AuditConfig& config);

/// True iff the killed sequence, once true, never returns to false.
bool is_monotone(const AuditTrace& trace);

/// Plot data: `size,killed,p_value,effect_size,nki` with empty cells where
/// a field does not apply to the definition.
std::string trace_to_csv(const AuditTrace& trace);

/// The same trace plus monotonicity summary as a JSON document.
std::string trace_to_json(const AuditTrace& trace, int indent = 2);

/// Deterministic Fisher-Yates permutation of {0..n-1}; the generator and
/// draw discipline are fixed, so results are platform-independent.
std::vector<std::size_t> deterministic_permutation(std::size_t n, std::uint64_t seed);

}  // namespace mutakill
