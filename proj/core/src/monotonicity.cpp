#include "mutakill/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mutakill/errors.hpp"
#include "mutakill/parallel.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace mutakill {

namespace {

using nlohmann::ordered_json;

struct ResolvedInputs {
  CorrectnessMatrix original_cm;
  CorrectnessMatrix mutant_cm;
  PredictionMatrix original_pm;
  PredictionMatrix mutant_pm;
  GroundTruth truth;
  bool has_correctness = false;
  bool has_predictions = false;
  bool has_truth = false;
};

BoolMatrix permute_columns(const BoolMatrix& m, std::span<const std::size_t> perm) {
  BoolMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out.set(i, j, m.at(i, perm[j]));
    }
  }
  return out;
}

template <typename T>
std::vector<T> permute(const std::vector<T>& v, std::span<const std::size_t> perm) {
  std::vector<T> out;
  out.reserve(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out.push_back(v[perm[j]]);
  return out;
}

// Gathers (and optionally derives or permutes) exactly what the requested
// definition needs, copying into owned storage.
ResolvedInputs resolve(const AuditInputs& in, const AuditConfig& cfg) {
  ResolvedInputs r;
  const bool needs_correctness = cfg.definition == KillDefinition::kd1 ||
                                 cfg.definition == KillDefinition::kd2 ||
                                 cfg.definition == KillDefinition::kdf;
  const bool needs_predictions =
      cfg.definition == KillDefinition::kd3 || cfg.definition == KillDefinition::kd4;
  const bool needs_truth = cfg.definition == KillDefinition::kd3;

  if (in.truth != nullptr) {
    r.truth = *in.truth;
    r.has_truth = true;
  }
  if (in.original_predictions != nullptr && in.mutant_predictions != nullptr) {
    r.original_pm = *in.original_predictions;
    r.mutant_pm = *in.mutant_predictions;
    r.has_predictions = true;
  }
  if (in.original_correctness != nullptr && in.mutant_correctness != nullptr) {
    r.original_cm = *in.original_correctness;
    r.mutant_cm = *in.mutant_correctness;
    r.has_correctness = true;
  } else if (needs_correctness && r.has_predictions && r.has_truth) {
    r.original_cm = correctness(r.original_pm, r.truth);
    r.mutant_cm = correctness(r.mutant_pm, r.truth);
    r.has_correctness = true;
  }

  if (needs_correctness && !r.has_correctness) {
    throw UsageError(to_string(cfg.definition) +
                     " audit needs correctness matrices (or predictions plus ground truth)");
  }
  if (needs_predictions && !r.has_predictions) {
    throw UsageError(to_string(cfg.definition) + " audit needs prediction matrices");
  }
  if (needs_truth && !r.has_truth) {
    throw UsageError("KD3 audit needs the ground truth");
  }
  return r;
}

std::size_t resolved_inputs_width(const ResolvedInputs& r, const AuditConfig& cfg) {
  if (cfg.definition == KillDefinition::kd3 || cfg.definition == KillDefinition::kd4) {
    if (r.original_pm.n_inputs() != r.mutant_pm.n_inputs()) {
      throw UsageError("prediction matrices are not column-aligned");
    }
    return r.original_pm.n_inputs();
  }
  if (r.original_cm.n_inputs() != r.mutant_cm.n_inputs()) {
    throw UsageError("correctness matrices are not column-aligned");
  }
  return r.original_cm.n_inputs();
}

void apply_permutation(ResolvedInputs& r, std::span<const std::size_t> perm) {
  if (r.has_correctness) {
    r.original_cm.bits = permute_columns(r.original_cm.bits, perm);
    r.mutant_cm.bits = permute_columns(r.mutant_cm.bits, perm);
  }
  if (r.has_predictions) {
    for (auto& row : r.original_pm.predictions) row = permute(row, perm);
    for (auto& row : r.mutant_pm.predictions) row = permute(row, perm);
  }
  if (r.has_truth) {
    r.truth.input_ids = permute(r.truth.input_ids, perm);
    r.truth.true_labels = permute(r.truth.true_labels, perm);
  }
}

std::vector<std::int64_t> size_grid(const AuditConfig& cfg, std::size_t n_inputs) {
  if (cfg.start < 1) throw UsageError("audit start must be >= 1");
  if (cfg.step < 1) throw UsageError("audit step must be >= 1");
  const std::int64_t end = cfg.end.value_or(static_cast<std::int64_t>(n_inputs));
  if (end > static_cast<std::int64_t>(n_inputs)) {
    throw UsageError("audit end " + std::to_string(end) + " exceeds the input count " +
                     std::to_string(n_inputs));
  }
  if (cfg.start > end) {
    throw UsageError("audit start " + std::to_string(cfg.start) + " exceeds end " +
                     std::to_string(end));
  }
  std::vector<std::int64_t> sizes;
  for (std::int64_t s = cfg.start; s <= end; s += cfg.step) sizes.push_back(s);
  return sizes;
}

// Per-instance cumulative correct counts; cum[i][s] counts columns [0, s).
std::vector<std::vector<std::int64_t>> prefix_counts(const BoolMatrix& m) {
  std::vector<std::vector<std::int64_t>> cum(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cum[i].resize(m.cols() + 1, 0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      cum[i][j + 1] = cum[i][j] + (m.at(i, j) ? 1 : 0);
    }
  }
  return cum;
}

AccuracySample sample_at(const std::vector<std::vector<std::int64_t>>& cum, std::int64_t size) {
  AccuracySample s;
  s.values.reserve(cum.size());
  for (const auto& row : cum) {
    s.values.push_back(static_cast<double>(row[static_cast<std::size_t>(size)]) /
                       static_cast<double>(size));
  }
  return s;
}

// First column index satisfying the existential kill condition, or n.
std::size_t first_killing_column(const ResolvedInputs& r, const AuditConfig& cfg,
                                 std::size_t n_inputs) {
  const auto check_instance = [](std::size_t count, std::size_t instance, const char* which) {
    if (instance >= count) {
      throw UsageError(std::string(which) + " instance index out of range");
    }
  };
  if (cfg.definition == KillDefinition::kd2) {
    check_instance(r.original_cm.instance_count(), cfg.original_instance, "original");
    check_instance(r.mutant_cm.instance_count(), cfg.mutant_instance, "mutant");
    for (std::size_t j = 0; j < n_inputs; ++j) {
      if (r.original_cm.bits.at(cfg.original_instance, j) &&
          !r.mutant_cm.bits.at(cfg.mutant_instance, j)) {
        return j;
      }
    }
    return n_inputs;
  }
  check_instance(r.original_pm.instance_count(), cfg.original_instance, "original");
  check_instance(r.mutant_pm.instance_count(), cfg.mutant_instance, "mutant");
  const auto& orig = r.original_pm.predictions[cfg.original_instance];
  const auto& mut = r.mutant_pm.predictions[cfg.mutant_instance];
  for (std::size_t j = 0; j < n_inputs; ++j) {
    if (cfg.definition == KillDefinition::kd4) {
      if (detail::trim(orig[j]) != detail::trim(mut[j])) return j;
    } else {  // kd3: original correct on its true class, mutant not
      const auto true_label = detail::trim(r.truth.true_labels[j]);
      if (detail::trim(orig[j]) == true_label && detail::trim(mut[j]) != true_label) return j;
    }
  }
  return n_inputs;
}

void collect_violations(AuditTrace& trace) {
  const std::size_t k = trace.sizes.size();
  // Suffix counts of not-killed entries give the witness-pair total in one pass.
  std::int64_t not_killed_after = 0;
  for (std::size_t i = k; i-- > 0;) {
    if (trace.killed[i]) {
      trace.witness_pair_count += not_killed_after;
    } else {
      ++not_killed_after;
    }
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (trace.killed[i] && !trace.killed[i + 1]) {
      trace.violations.push_back({trace.sizes[i], trace.sizes[i + 1]});
    }
  }
}

}  // namespace

std::vector<std::size_t> deterministic_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm = all_columns(n);
  // Fisher-Yates with raw mt19937_64 draws; std::shuffle is not pinned
  // across standard library implementations, this is.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

AuditTrace audit(const AuditInputs& inputs, const AuditConfig& cfg) {
  cfg.params.validate();
  ResolvedInputs r = resolve(inputs, cfg);
  const std::size_t n_inputs = resolved_inputs_width(r, cfg);
  if (cfg.shuffle_seed) {
    apply_permutation(r, deterministic_permutation(n_inputs, *cfg.shuffle_seed));
  }

  AuditTrace trace;
  trace.definition = cfg.definition;
  trace.sizes = size_grid(cfg, n_inputs);
  const std::size_t k = trace.sizes.size();
  trace.killed.assign(k, 0);
  trace.p_values.assign(k, std::nullopt);
  trace.effect_sizes.assign(k, std::nullopt);
  trace.nki.assign(k, std::nullopt);

  switch (cfg.definition) {
    case KillDefinition::kd1: {
      if (r.original_cm.instance_count() < 2 || r.mutant_cm.instance_count() < 2) {
        throw UsageError("KD1 audit needs at least two instances per model");
      }
      const auto cum_orig = prefix_counts(r.original_cm.bits);
      const auto cum_mut = prefix_counts(r.mutant_cm.bits);
      for (std::size_t idx = 0; idx < k; ++idx) {
        const auto orig = sample_at(cum_orig, trace.sizes[idx]);
        const auto mut = sample_at(cum_mut, trace.sizes[idx]);
        const KillVerdict v = kd1_killed(orig, mut, cfg.params);
        trace.killed[idx] = v.killed ? 1 : 0;
        trace.p_values[idx] = v.p_value;
        trace.effect_sizes[idx] = v.effect_size;
      }
      break;
    }
    case KillDefinition::kdf: {
      // One Fisher test per column; prefixes then only count flags.
      const auto tail = cfg.params.one_sided_fisher ? stats::FisherTail::one_sided_greater
                                                    : stats::FisherTail::two_sided;
      std::vector<double> column_p(n_inputs);
      parallel_for_index(n_inputs, [&](std::size_t j) {
        column_p[j] = stats::fisher_exact(column_table(r.original_cm, r.mutant_cm, j), tail).p_value;
      });
      if (cfg.params.bonferroni) {
        // The corrected threshold shrinks with the prefix, so each size is
        // counted against its own alpha.
        for (std::size_t idx = 0; idx < k; ++idx) {
          const auto size = static_cast<std::size_t>(trace.sizes[idx]);
          const double alpha = cfg.params.alpha / static_cast<double>(size);
          std::int64_t count = 0;
          for (std::size_t j = 0; j < size; ++j) {
            if (column_p[j] < alpha) ++count;
          }
          trace.nki[idx] = count;
          trace.killed[idx] = count >= cfg.params.tau ? 1 : 0;
        }
      } else {
        std::vector<std::int64_t> cum_kills(n_inputs + 1, 0);
        for (std::size_t j = 0; j < n_inputs; ++j) {
          cum_kills[j + 1] = cum_kills[j] + (column_p[j] < cfg.params.alpha ? 1 : 0);
        }
        for (std::size_t idx = 0; idx < k; ++idx) {
          const std::int64_t count = cum_kills[static_cast<std::size_t>(trace.sizes[idx])];
          trace.nki[idx] = count;
          trace.killed[idx] = count >= cfg.params.tau ? 1 : 0;
        }
      }
      break;
    }
    case KillDefinition::kd2:
    case KillDefinition::kd3:
    case KillDefinition::kd4: {
      const std::size_t first = first_killing_column(r, cfg, n_inputs);
      for (std::size_t idx = 0; idx < k; ++idx) {
        trace.killed[idx] = first < static_cast<std::size_t>(trace.sizes[idx]) ? 1 : 0;
      }
      break;
    }
  }

  collect_violations(trace);
  return trace;
}

bool is_monotone(const AuditTrace& trace) {
  bool seen_killed = false;
  for (std::uint8_t flag : trace.killed) {
    if (flag) {
      seen_killed = true;
    } else if (seen_killed) {
      return false;
    }
  }
  return true;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string trace_to_csv(const AuditTrace& trace) {
  std::ostringstream out;
  out << "size,killed,p_value,effect_size,nki\n";
  for (std::size_t i = 0; i < trace.sizes.size(); ++i) {
    out << trace.sizes[i] << ',' << (trace.killed[i] ? "true" : "false") << ',';
    if (trace.p_values[i]) out << format_double(*trace.p_values[i]);
    out << ',';
    if (trace.effect_sizes[i]) out << format_double(*trace.effect_sizes[i]);
    out << ',';
    if (trace.nki[i]) out << *trace.nki[i];
    out << '\n';
  }
  return out.str();
}

std::string trace_to_json(const AuditTrace& trace, int indent) {
  ordered_json doc;
  doc["definition"] = to_string(trace.definition);
  doc["monotone"] = is_monotone(trace);
  doc["witness_pair_count"] = trace.witness_pair_count;
  doc["violations"] = ordered_json::array();
  for (const auto& v : trace.violations) {
    doc["violations"].push_back(
        {{"size_killed", v.size_killed}, {"size_not_killed", v.size_not_killed}});
  }
  doc["sizes"] = trace.sizes;
  auto killed = ordered_json::array();
  for (std::uint8_t flag : trace.killed) killed.push_back(flag != 0);
  doc["killed"] = std::move(killed);
  auto opt_array = [](const auto& values, auto&& convert) {
    auto arr = ordered_json::array();
    for (const auto& v : values) {
      if (v) {
        arr.push_back(convert(*v));
      } else {
        arr.push_back(nullptr);
      }
    }
    return arr;
  };
  doc["p_values"] = opt_array(trace.p_values, [](double v) { return detail::json_number(v); });
  doc["effect_sizes"] =
      opt_array(trace.effect_sizes, [](double v) { return detail::json_number(v); });
  doc["nki"] = opt_array(trace.nki, [](std::int64_t v) { return ordered_json(v); });
  return doc.dump(indent);
}

}  // namespace mutakill
