#include "mutakill_cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mutakill/errors.hpp"
#include "mutakill/kill_defs.hpp"
#include "mutakill/matrix_io.hpp"
#include "mutakill/monotonicity.hpp"
#include "mutakill/report.hpp"
#include "mutakill/sim_gen.hpp"
#include "mutakill/stats.hpp"
#include "mutakill/version.hpp"

namespace mutakill {

namespace {

// Empty path means stdout.
void write_text(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path);
  file << content;
  if (!file) throw DataError("short write to " + path);
}

struct ParamFlags {
  double alpha = 0.05;
  double beta = 0.2;
  std::int64_t tau = 1;
  std::string ttest = "pooled";
  bool one_sided = false;
  bool bonferroni = false;
  bool non_directional = false;

  KillParams to_params() const {
    KillParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.tau = tau;
    p.directional = !non_directional;
    p.ttest_variant = ttest_variant_from_string(ttest);
    p.one_sided_fisher = one_sided;
    p.bonferroni = bonferroni;
    return p;
  }
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Significance level")->capture_default_str();
  cmd->add_option("--beta", f.beta, "Cohen's d threshold for KD1")->capture_default_str();
  cmd->add_option("--tau", f.tau, "Killing-input count threshold for KDF")->capture_default_str();
  cmd->add_option("--ttest", f.ttest, "t-test variant: pooled or welch")->capture_default_str();
  cmd->add_flag("--one-sided", f.one_sided,
                "One-sided Fisher tail (original more often correct)");
  cmd->add_flag("--bonferroni", f.bonferroni,
                "Divide alpha by the number of tested inputs");
  cmd->add_flag("--non-directional", f.non_directional,
                "Drop KD1's mean(original) > mean(mutant) requirement");
}

struct FisherArgs {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;
  double alpha = 0.05;
  bool one_sided = false;
};

int run_fisher(const FisherArgs& args, std::ostream& out) {
  const stats::ContingencyTable table{args.a, args.b, args.c, args.d};
  table.validate();
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  const auto tail =
      args.one_sided ? stats::FisherTail::one_sided_greater : stats::FisherTail::two_sided;
  const auto result = stats::fisher_exact(table, tail);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", result.p_value);
  out << "p_value: " << buf << '\n'
      << "killed: " << (result.p_value < args.alpha ? "true" : "false") << '\n';
  return 0;
}

struct AnalyzeArgs {
  std::string predictions;
  std::string truth;
  std::string original;
  std::vector<std::string> definitions{"kdf"};
  std::size_t original_instance = 0;
  std::size_t mutant_instance = 0;
  ParamFlags params;
  std::string out_path;
  bool no_timestamp = false;
};

int run_analyze(const AnalyzeArgs& args, std::ostream& out) {
  const LoadedPredictions data = load_predictions(args.predictions, args.truth);

  AnalysisOptions options;
  options.original_model_id = args.original;
  for (const auto& name : args.definitions) {
    options.definitions.push_back(kill_definition_from_string(name));
  }
  options.params = args.params.to_params();
  options.original_instance = args.original_instance;
  options.mutant_instance = args.mutant_instance;

  AnalysisReport report = analyze(data, options);
  report.inputs["predictions"] = {args.predictions, sha256_hex_of_file(args.predictions)};
  report.inputs["truth"] = {args.truth, sha256_hex_of_file(args.truth)};
  if (!args.no_timestamp) report.timestamp = current_timestamp_utc();

  write_text(args.out_path, report_to_json(report) + "\n", out);
  return 0;
}

struct AuditArgs {
  std::string predictions;
  std::string truth;
  std::string original;
  std::string mutant;
  std::string fixture;
  std::size_t instances = 20;
  std::size_t k_strong = 100;
  std::size_t k_noise = 9900;
  std::string definition = "kdf";
  std::int64_t start = 100;
  std::int64_t step = 100;
  std::optional<std::int64_t> end;
  std::optional<std::uint64_t> shuffle_seed;
  std::size_t original_instance = 0;
  std::size_t mutant_instance = 0;
  ParamFlags params;
  std::string out_json;
  std::string out_csv;
};

int run_audit(const AuditArgs& args, std::ostream& out) {
  AuditConfig cfg;
  cfg.start = args.start;
  cfg.step = args.step;
  cfg.end = args.end;
  cfg.definition = kill_definition_from_string(args.definition);
  cfg.params = args.params.to_params();
  cfg.shuffle_seed = args.shuffle_seed;
  cfg.original_instance = args.original_instance;
  cfg.mutant_instance = args.mutant_instance;

  AuditTrace trace;
  if (!args.fixture.empty()) {
    if (args.fixture != "adversarial") {
      throw UsageError("unknown fixture `" + args.fixture + "` (only: adversarial)");
    }
    if (!args.predictions.empty() || !args.truth.empty()) {
      throw UsageError("choose either --fixture or --predictions/--truth");
    }
    const MatrixPair pair = adversarial_kd1(args.instances, args.k_strong, args.k_noise);
    if (cfg.definition == KillDefinition::kd3 || cfg.definition == KillDefinition::kd4) {
      const LoadedPredictions dataset = to_dataset(pair);
      AuditInputs inputs;
      for (const auto& model : dataset.models) {
        if (model.model_id == "original") inputs.original_predictions = &model;
        if (model.model_id == "mutant") inputs.mutant_predictions = &model;
      }
      inputs.truth = &dataset.truth;
      trace = audit(inputs, cfg);
    } else {
      AuditInputs inputs;
      inputs.original_correctness = &pair.original;
      inputs.mutant_correctness = &pair.mutant;
      trace = audit(inputs, cfg);
    }
  } else {
    if (args.predictions.empty() || args.truth.empty() || args.original.empty() ||
        args.mutant.empty()) {
      throw UsageError(
          "audit needs --predictions, --truth, --original and --mutant (or --fixture)");
    }
    if (args.original == args.mutant) {
      throw UsageError("--original and --mutant must name different models");
    }
    const LoadedPredictions data = load_predictions(args.predictions, args.truth);
    const auto find_model = [&](const std::string& id) -> const PredictionMatrix* {
      for (const auto& model : data.models) {
        if (model.model_id == id) return &model;
      }
      throw UsageError("model `" + id + "` not present in the predictions");
    };
    AuditInputs inputs;
    inputs.original_predictions = find_model(args.original);
    inputs.mutant_predictions = find_model(args.mutant);
    inputs.truth = &data.truth;
    trace = audit(inputs, cfg);
  }

  if (!args.out_csv.empty()) write_text(args.out_csv, trace_to_csv(trace), out);
  write_text(args.out_json, trace_to_json(trace) + "\n", out);
  return 0;
}

struct SimulateArgs {
  std::string spec_path;
  std::string fixture;
  std::size_t instances = 20;
  std::size_t k_strong = 100;
  std::size_t k_noise = 9900;
  std::size_t n_inputs = 0;
  std::size_t r_orig = 20;
  std::size_t r_mut = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> blocks;
  std::string out_predictions;
  std::string out_truth;
};

ScenarioBlock parse_block(const std::string& text) {
  std::istringstream in(text);
  std::string width, p_orig, p_mut;
  const bool shaped = std::getline(in, width, ':') && std::getline(in, p_orig, ':') &&
                      std::getline(in, p_mut) && in.eof();
  const auto fail = [&]() -> ScenarioBlock {
    throw UsageError("block must be width:p_orig:p_mut, got `" + text + "`");
  };
  if (!shaped) return fail();
  try {
    const long long w = std::stoll(width);
    if (w < 1) return fail();
    return {static_cast<std::size_t>(w), std::stod(p_orig), std::stod(p_mut)};
  } catch (const std::exception&) {
    return fail();
  }
}

ScenarioSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    nlohmann::json doc;
    in >> doc;
    ScenarioSpec spec;
    spec.n_inputs = doc.at("n_inputs").get<std::size_t>();
    spec.r_orig = doc.at("r_orig").get<std::size_t>();
    spec.r_mut = doc.at("r_mut").get<std::size_t>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& block : doc.at("blocks")) {
      spec.blocks.push_back({block.at("width").get<std::size_t>(),
                             block.at("p_orig").get<double>(),
                             block.at("p_mut").get<double>()});
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid scenario JSON in " + path + ": " + e.what());
  }
}

int run_simulate(const SimulateArgs& args) {
  MatrixPair pair;
  if (!args.fixture.empty()) {
    if (args.fixture != "adversarial") {
      throw UsageError("unknown fixture `" + args.fixture + "` (only: adversarial)");
    }
    if (!args.spec_path.empty() || !args.blocks.empty()) {
      throw UsageError("--fixture excludes --spec and --block");
    }
    pair = adversarial_kd1(args.instances, args.k_strong, args.k_noise);
  } else if (!args.spec_path.empty()) {
    if (!args.blocks.empty() || args.n_inputs != 0) {
      throw UsageError("--spec excludes the inline scenario flags");
    }
    pair = generate(parse_spec_file(args.spec_path));
  } else if (args.n_inputs != 0 || !args.blocks.empty()) {
    ScenarioSpec spec;
    spec.n_inputs = args.n_inputs;
    spec.r_orig = args.r_orig;
    spec.r_mut = args.r_mut;
    spec.seed = args.seed;
    for (const auto& block : args.blocks) spec.blocks.push_back(parse_block(block));
    pair = generate(spec);
  } else {
    throw UsageError("simulate needs --spec, --fixture, or --n-inputs with --block");
  }

  const LoadedPredictions dataset = to_dataset(pair);
  save_predictions(args.out_predictions, dataset.models, dataset.truth);
  save_ground_truth(args.out_truth, dataset.truth);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "Mutation-kill verdicts, killing-input counts and monotonicity audits "
      "over model prediction matrices"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  FisherArgs fisher_args;
  auto* fisher = app.add_subcommand(
      "fisher", "Fisher exact test on one correct/incorrect contingency table");
  fisher->add_option("a", fisher_args.a, "original instances correct")->required();
  fisher->add_option("b", fisher_args.b, "original instances incorrect")->required();
  fisher->add_option("c", fisher_args.c, "mutant instances correct")->required();
  fisher->add_option("d", fisher_args.d, "mutant instances incorrect")->required();
  fisher->add_option("--alpha", fisher_args.alpha, "Significance level")->capture_default_str();
  fisher->add_flag("--one-sided", fisher_args.one_sided,
                   "One-sided tail (original more often correct)");

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Kill verdicts and mutation scores for every mutant in a predictions file");
  analyze_cmd->add_option("--predictions", analyze_args.predictions, "Predictions CSV")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--truth", analyze_args.truth, "Ground-truth CSV")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--original", analyze_args.original, "model_id of the unmutated model")
      ->required();
  analyze_cmd
      ->add_option("--definitions", analyze_args.definitions,
                   "Comma-separated subset of kd1,kd2,kd3,kd4,kdf")
      ->delimiter(',')
      ->capture_default_str();
  analyze_cmd
      ->add_option("--original-instance", analyze_args.original_instance,
                   "Instance row used by KD2-KD4")
      ->capture_default_str();
  analyze_cmd
      ->add_option("--mutant-instance", analyze_args.mutant_instance,
                   "Instance row used by KD2-KD4")
      ->capture_default_str();
  add_param_flags(analyze_cmd, analyze_args.params);
  analyze_cmd->add_option("--out", analyze_args.out_path,
                          "Write the JSON report here instead of stdout");
  analyze_cmd->add_flag("--no-timestamp", analyze_args.no_timestamp,
                        "Omit the timestamp so reruns are byte-identical");

  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand(
      "audit", "Kill verdict versus cumulative test-set size, with monotonicity summary");
  audit_cmd->add_option("--predictions", audit_args.predictions, "Predictions CSV")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--truth", audit_args.truth, "Ground-truth CSV")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--original", audit_args.original, "model_id of the unmutated model");
  audit_cmd->add_option("--mutant", audit_args.mutant, "model_id of the mutant");
  audit_cmd->add_option("--fixture", audit_args.fixture,
                        "Audit a built-in fixture instead of files (adversarial)");
  audit_cmd->add_option("--instances", audit_args.instances, "Fixture instances per model")
      ->capture_default_str();
  audit_cmd->add_option("--k-strong", audit_args.k_strong, "Fixture strong-block width")
      ->capture_default_str();
  audit_cmd->add_option("--k-noise", audit_args.k_noise, "Fixture noise-block width")
      ->capture_default_str();
  audit_cmd->add_option("--definition", audit_args.definition, "kd1, kd2, kd3, kd4 or kdf")
      ->capture_default_str();
  audit_cmd->add_option("--start", audit_args.start, "Smallest prefix size")
      ->capture_default_str();
  audit_cmd->add_option("--step", audit_args.step, "Prefix size increment")
      ->capture_default_str();
  audit_cmd->add_option("--end", audit_args.end, "Largest prefix size (default: all inputs)");
  audit_cmd->add_option("--shuffle-seed", audit_args.shuffle_seed,
                        "Deterministically permute columns before the sweep");
  audit_cmd
      ->add_option("--original-instance", audit_args.original_instance,
                   "Instance row used by KD2-KD4")
      ->capture_default_str();
  audit_cmd
      ->add_option("--mutant-instance", audit_args.mutant_instance,
                   "Instance row used by KD2-KD4")
      ->capture_default_str();
  add_param_flags(audit_cmd, audit_args.params);
  audit_cmd->add_option("--out-json", audit_args.out_json,
                        "Write the JSON trace here instead of stdout");
  audit_cmd->add_option("--out-csv", audit_args.out_csv, "Also write the plot CSV here");

  SimulateArgs simulate_args;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Generate synthetic prediction matrices and ground truth");
  simulate_cmd->add_option("--spec", simulate_args.spec_path, "Scenario JSON file")
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--fixture", simulate_args.fixture,
                           "Emit a built-in fixture (adversarial)");
  simulate_cmd->add_option("--instances", simulate_args.instances, "Fixture instances per model")
      ->capture_default_str();
  simulate_cmd->add_option("--k-strong", simulate_args.k_strong, "Fixture strong-block width")
      ->capture_default_str();
  simulate_cmd->add_option("--k-noise", simulate_args.k_noise, "Fixture noise-block width")
      ->capture_default_str();
  simulate_cmd->add_option("--n-inputs", simulate_args.n_inputs, "Inline scenario input count");
  simulate_cmd->add_option("--r-orig", simulate_args.r_orig, "Inline scenario original instances")
      ->capture_default_str();
  simulate_cmd->add_option("--r-mut", simulate_args.r_mut, "Inline scenario mutant instances")
      ->capture_default_str();
  simulate_cmd->add_option("--seed", simulate_args.seed, "Inline scenario PRNG seed")
      ->capture_default_str();
  simulate_cmd->add_option("--block", simulate_args.blocks,
                           "Inline scenario block width:p_orig:p_mut (repeatable)");
  simulate_cmd->add_option("--out-predictions", simulate_args.out_predictions, "Predictions CSV")
      ->required();
  simulate_cmd->add_option("--out-truth", simulate_args.out_truth, "Ground-truth CSV")
      ->required();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(fisher)) return run_fisher(fisher_args, out);
    if (app.got_subcommand(analyze_cmd)) return run_analyze(analyze_args, out);
    if (app.got_subcommand(audit_cmd)) return run_audit(audit_args, out);
    if (app.got_subcommand(simulate_cmd)) return run_simulate(simulate_args);
    throw UsageError("no subcommand selected");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace mutakill
