#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mutakill/kill_defs.hpp"
#include "mutakill/matrix_io.hpp"

namespace mutakill {

/// What to compute for each mutant and against which original.
struct AnalysisOptions {
  std::string original_model_id;
  std::vector<KillDefinition> definitions;
  KillParams params;

  /// Instance pairing for KD2-KD4, which compare one trained instance per
  /// model. KD1 and KDF always use all instances.
  std::size_t original_instance = 0;
  std::size_t mutant_instance = 0;
};

struct MutantAnalysis {
  std::string model_id;
  std::vector<KillVerdict> verdicts;  // aligned with the requested definitions
};

/// Digest of one input file, recorded so a report names its exact inputs.
struct FileDigest {
  std::string path;
  std::string sha256;
};

struct AnalysisReport {
  int schema_version = 0;
  std::string tool_version;
  std::optional<std::string> timestamp;  // absent when suppressed
  std::map<std::string, FileDigest> inputs;  // keyed by role, e.g. "predictions"
  std::string original_model_id;
  std::vector<KillDefinition> definitions;
  KillParams params;
  std::vector<MutantAnalysis> mutants;  // sorted by model_id
  std::map<KillDefinition, double> mutation_scores;
};

/// Evaluates every requested definition for every mutant (all models other
/// than the original) and aggregates mutation scores. Throws UsageError
/// when the original is missing, no mutant remains, or KD1 is requested
/// with fewer than two instances on either side.
AnalysisReport analyze(const LoadedPredictions& data, const AnalysisOptions& options);

std::string report_to_json(const AnalysisReport& report, int indent = 2);

/// Flag spellings of the t-test variants: "pooled" and "welch".
std::string to_string(stats::TTestVariant variant);
stats::TTestVariant ttest_variant_from_string(const std::string& name);

/// Streaming SHA-256 of a file's bytes, lowercase hex.
std::string sha256_hex_of_file(const std::filesystem::path& path);

/// RFC 3339 UTC timestamp with second precision, e.g. 2026-08-18T07:01:02Z.
std::string current_timestamp_utc();

}  // namespace mutakill
