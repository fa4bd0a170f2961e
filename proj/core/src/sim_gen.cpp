#include "mutakill/sim_gen.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "mutakill/errors.hpp"

namespace mutakill {

namespace {

// 53-bit mantissa uniform in [0, 1), the same construction
// std::generate_canonical uses but pinned so streams never drift between
// standard library versions.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_rows(BoolMatrix& m, const ScenarioSpec& spec, bool mutant, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t j = 0;
    for (const auto& block : spec.blocks) {
      const double p = mutant ? block.p_mut : block.p_orig;
      for (std::size_t w = 0; w < block.width; ++w, ++j) {
        m.set(i, j, next_uniform(rng) < p);
      }
    }
  }
}

std::string padded(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_inputs == 0) throw UsageError("scenario needs at least one input");
  if (r_orig == 0 || r_mut == 0) throw UsageError("scenario needs at least one instance per model");
  std::size_t total = 0;
  for (const auto& block : blocks) {
    if (block.p_orig < 0.0 || block.p_orig > 1.0 || block.p_mut < 0.0 || block.p_mut > 1.0) {
      throw UsageError("block probabilities must lie in [0, 1]");
    }
    total += block.width;
  }
  if (total != n_inputs) {
    throw UsageError("block widths sum to " + std::to_string(total) + ", expected " +
                     std::to_string(n_inputs));
  }
}

MatrixPair generate(const ScenarioSpec& spec) {
  spec.validate();
  MatrixPair pair;
  pair.original.model_id = "original";
  pair.mutant.model_id = "mutant";
  pair.original.bits = BoolMatrix(spec.r_orig, spec.n_inputs);
  pair.mutant.bits = BoolMatrix(spec.r_mut, spec.n_inputs);
  std::mt19937_64 rng(spec.seed);
  fill_rows(pair.original.bits, spec, false, rng);
  fill_rows(pair.mutant.bits, spec, true, rng);
  return pair;
}

MatrixPair adversarial_kd1(std::size_t r, std::size_t k_strong, std::size_t k_noise) {
  if (r < 4 || r % 2 != 0) throw UsageError("adversarial fixture needs an even r >= 4");
  if (k_strong < 1 || k_noise < 1) throw UsageError("adversarial fixture needs non-empty blocks");
  const std::size_t n = k_strong + k_noise;
  MatrixPair pair;
  pair.original.model_id = "original";
  pair.mutant.model_id = "mutant";
  pair.original.bits = BoolMatrix(r, n);
  pair.mutant.bits = BoolMatrix(r, n);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < k_strong; ++j) {
      pair.original.bits.set(i, j, true);
      // 2 of every 5 columns wrong, the window sliding with the instance.
      const std::size_t phase = (j + 5 * k_strong - i) % 5;
      pair.mutant.bits.set(i, j, phase >= 2);
    }
    const std::size_t cut = i % 2 == 0 ? 6 : 4;
    for (std::size_t j = 0; j < k_noise; ++j) {
      const bool correct = j % 10 < cut;
      pair.original.bits.set(i, k_strong + j, correct);
      pair.mutant.bits.set(i, k_strong + j, correct);
    }
  }
  return pair;
}

LoadedPredictions to_dataset(const MatrixPair& pair) {
  const std::size_t n = pair.original.n_inputs();
  if (pair.mutant.n_inputs() != n) throw UsageError("matrices are not column-aligned");
  const std::size_t id_width = std::max<std::size_t>(4, std::to_string(n ? n - 1 : 0).size());

  LoadedPredictions out;
  out.truth.input_ids.reserve(n);
  out.truth.true_labels.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.truth.input_ids.push_back("i" + padded(j, id_width));
    out.truth.true_labels.push_back("c" + std::to_string(j % 10));
  }

  const auto expand = [&](const CorrectnessMatrix& m) {
    PredictionMatrix pm;
    pm.model_id = m.model_id;
    const std::size_t instance_width =
        std::max<std::size_t>(2, std::to_string(m.instance_count() ? m.instance_count() - 1 : 0).size());
    for (std::size_t i = 0; i < m.instance_count(); ++i) {
      pm.instance_ids.push_back("r" + padded(i, instance_width));
      std::vector<std::string> row;
      row.reserve(n);
      for (std::size_t j = 0; j < n; ++j) {
        row.push_back(m.bits.at(i, j) ? out.truth.true_labels[j]
                                      : out.truth.true_labels[j] + "_X");
      }
      pm.predictions.push_back(std::move(row));
    }
    return pm;
  };
  out.models.push_back(expand(pair.original));
  out.models.push_back(expand(pair.mutant));
  std::sort(out.models.begin(), out.models.end(),
            [](const auto& a, const auto& b) { return a.model_id < b.model_id; });
  return out;
}

}  // namespace mutakill
