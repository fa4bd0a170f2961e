#include "mutakill/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "mutakill/errors.hpp"
#include "mutakill/version.hpp"
#include "json_util.hpp"

namespace mutakill {

namespace {

using nlohmann::ordered_json;

KillVerdict evaluate(KillDefinition def, const PredictionMatrix& original_pm,
                     const PredictionMatrix& mutant_pm, const CorrectnessMatrix& original_cm,
                     const CorrectnessMatrix& mutant_cm, const GroundTruth& truth,
                     const AnalysisOptions& opt) {
  const auto instance_row = [&](const PredictionMatrix& pm, const CorrectnessMatrix& cm,
                                std::size_t instance, const char* which) {
    if (instance >= pm.instance_count()) {
      throw UsageError(std::string(which) + " instance index " + std::to_string(instance) +
                       " out of range for model `" + pm.model_id + "`");
    }
    return std::pair{std::span<const std::string>(pm.predictions[instance]),
                     cm.bits.row(instance)};
  };

  switch (def) {
    case KillDefinition::kd1: {
      if (original_cm.instance_count() < 2 || mutant_cm.instance_count() < 2) {
        throw UsageError("KD1 needs at least two instances per model, got " +
                         std::to_string(original_cm.instance_count()) + " original and " +
                         std::to_string(mutant_cm.instance_count()) + " mutant");
      }
      const auto columns = all_columns(truth.n_inputs());
      return kd1_killed(accuracy_sample(original_cm, columns),
                        accuracy_sample(mutant_cm, columns), opt.params);
    }
    case KillDefinition::kd2: {
      const auto orig = instance_row(original_pm, original_cm, opt.original_instance, "original");
      const auto mut = instance_row(mutant_pm, mutant_cm, opt.mutant_instance, "mutant");
      return kd2_killed(orig.second, mut.second, truth.input_ids);
    }
    case KillDefinition::kd3: {
      const auto orig = instance_row(original_pm, original_cm, opt.original_instance, "original");
      const auto mut = instance_row(mutant_pm, mutant_cm, opt.mutant_instance, "mutant");
      return kd3_killed_class(orig.first, mut.first, truth);
    }
    case KillDefinition::kd4: {
      const auto orig = instance_row(original_pm, original_cm, opt.original_instance, "original");
      const auto mut = instance_row(mutant_pm, mutant_cm, opt.mutant_instance, "mutant");
      return kd4_killed(orig.first, mut.first, truth.input_ids);
    }
    case KillDefinition::kdf:
      return kdf_killed(original_cm, mutant_cm, all_columns(truth.n_inputs()), opt.params,
                        truth.input_ids);
  }
  throw UsageError("unknown kill definition");
}

ordered_json verdict_to_json(const KillVerdict& v) {
  ordered_json doc;
  doc["killed"] = v.killed;
  if (v.p_value) doc["p_value"] = detail::json_number(*v.p_value);
  if (v.effect_size) doc["effect_size"] = detail::json_number(*v.effect_size);
  if (v.nki) doc["nki"] = *v.nki;
  if (v.killing_input_ids) doc["killing_input_ids"] = *v.killing_input_ids;
  if (v.per_class) doc["per_class"] = *v.per_class;
  return doc;
}

ordered_json params_to_json(const KillParams& p) {
  ordered_json doc;
  doc["alpha"] = p.alpha;
  doc["beta"] = p.beta;
  doc["tau"] = p.tau;
  doc["directional"] = p.directional;
  doc["ttest"] = to_string(p.ttest_variant);
  doc["one_sided"] = p.one_sided_fisher;
  doc["bonferroni"] = p.bonferroni;
  return doc;
}

}  // namespace

std::string to_string(stats::TTestVariant variant) {
  return variant == stats::TTestVariant::welch ? "welch" : "pooled";
}

stats::TTestVariant ttest_variant_from_string(const std::string& name) {
  if (name == "pooled") return stats::TTestVariant::student_pooled;
  if (name == "welch") return stats::TTestVariant::welch;
  throw UsageError("unknown t-test variant `" + name + "` (expected pooled or welch)");
}

AnalysisReport analyze(const LoadedPredictions& data, const AnalysisOptions& options) {
  options.params.validate();
  if (options.definitions.empty()) throw UsageError("no kill definitions requested");
  for (std::size_t i = 0; i < options.definitions.size(); ++i) {
    for (std::size_t j = i + 1; j < options.definitions.size(); ++j) {
      if (options.definitions[i] == options.definitions[j]) {
        throw UsageError("duplicate kill definition " + to_string(options.definitions[i]));
      }
    }
  }

  const auto original_it =
      std::find_if(data.models.begin(), data.models.end(), [&](const PredictionMatrix& m) {
        return m.model_id == options.original_model_id;
      });
  if (original_it == data.models.end()) {
    throw UsageError("original model `" + options.original_model_id +
                     "` not present in the predictions");
  }
  if (data.models.size() < 2) {
    throw UsageError("predictions contain no mutant besides the original");
  }

  const CorrectnessMatrix original_cm = correctness(*original_it, data.truth);

  AnalysisReport report;
  report.schema_version = kReportSchemaVersion;
  report.tool_version = kToolVersion;
  report.original_model_id = options.original_model_id;
  report.definitions = options.definitions;
  report.params = options.params;

  for (const auto& model : data.models) {
    if (model.model_id == options.original_model_id) continue;
    MutantAnalysis entry;
    entry.model_id = model.model_id;
    const CorrectnessMatrix mutant_cm = correctness(model, data.truth);
    for (KillDefinition def : options.definitions) {
      entry.verdicts.push_back(
          evaluate(def, *original_it, model, original_cm, mutant_cm, data.truth, options));
    }
    report.mutants.push_back(std::move(entry));
  }

  for (std::size_t d = 0; d < options.definitions.size(); ++d) {
    std::vector<KillVerdict> column;
    column.reserve(report.mutants.size());
    for (const auto& mutant : report.mutants) column.push_back(mutant.verdicts[d]);
    report.mutation_scores[options.definitions[d]] = mutation_score(column);
  }
  return report;
}

std::string report_to_json(const AnalysisReport& report, int indent) {
  ordered_json doc;
  doc["schema_version"] = report.schema_version;
  doc["tool"] = {{"name", kToolName}, {"version", report.tool_version}};
  if (report.timestamp) doc["timestamp"] = *report.timestamp;
  if (!report.inputs.empty()) {
    ordered_json inputs;
    for (const auto& [role, digest] : report.inputs) {
      inputs[role] = {{"path", digest.path}, {"sha256", digest.sha256}};
    }
    doc["inputs"] = std::move(inputs);
  }
  doc["original_model_id"] = report.original_model_id;
  auto definitions = ordered_json::array();
  for (KillDefinition def : report.definitions) definitions.push_back(to_string(def));
  doc["definitions"] = std::move(definitions);
  doc["params"] = params_to_json(report.params);
  ordered_json mutants;
  for (const auto& mutant : report.mutants) {
    ordered_json entry;
    for (std::size_t d = 0; d < report.definitions.size(); ++d) {
      entry[to_string(report.definitions[d])] = verdict_to_json(mutant.verdicts[d]);
    }
    mutants[mutant.model_id] = std::move(entry);
  }
  doc["mutants"] = std::move(mutants);
  ordered_json scores;
  for (const auto& [def, score] : report.mutation_scores) scores[to_string(def)] = score;
  doc["mutation_scores"] = std::move(scores);
  return doc.dump(indent);
}

std::string sha256_hex_of_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                    EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 initialization failed");
  }
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx.get(), buffer, static_cast<std::size_t>(got)) != 1) {
      throw Error("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error("sha256 finalization failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string current_timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace mutakill
