#pragma once

#include <cstdint>
#include <vector>

#include "mutakill/matrix_io.hpp"

namespace mutakill {

/// One contiguous column block with its per-cell correctness probability
/// for each model.
struct ScenarioBlock {
  std::size_t width = 0;
  double p_orig = 1.0;
  double p_mut = 1.0;
};

/// Block-structured random scenario. Columns are grouped into difficulty
/// blocks; every cell of a block is an independent Bernoulli draw.
struct ScenarioSpec {
  std::size_t n_inputs = 0;
  std::size_t r_orig = 1;
  std::size_t r_mut = 1;
  std::vector<ScenarioBlock> blocks;
  std::uint64_t seed = 0;

  /// Block widths must sum to n_inputs, probabilities must lie in [0, 1],
  /// instance counts must be positive. Throws UsageError otherwise.
  void validate() const;
};

struct MatrixPair {
  CorrectnessMatrix original;
  CorrectnessMatrix mutant;
};

/// Draws both matrices from a single mt19937_64 stream seeded with
/// spec.seed: original first, then mutant, each row-major; a cell is true
/// iff the next 53-bit uniform double is below the block probability.
/// Identical spec therefore means bit-identical output on any platform.
MatrixPair generate(const ScenarioSpec& spec);

/// Deterministic fixture on which statistical killing is not monotone
/// under the default parameters. A strong block of k_strong columns gives
/// every original instance accuracy 1 and every mutant instance exactly
/// 0.6 (instance i is wrong where (j - i) mod 5 < 2); a noise block of
/// k_noise columns treats both models identically but splits the
/// instances into a 0.6-accuracy half and a 0.4-accuracy half (instance i
/// is correct where (j mod 10) < 6 for even i, < 4 for odd i). The fixed
/// 0.4 gap shrinks like 1/s while the injected accuracy spread stays
/// proportional, so the t statistic decays and the verdict eventually
/// flips back to not killed. Requires r even and >= 4, both widths >= 1.
MatrixPair adversarial_kd1(std::size_t r, std::size_t k_strong, std::size_t k_noise);

/// Expands correctness bits into a loadable dataset. Input j gets id
/// i<j zero-padded> and true label c<j mod 10>; correct cells predict the
/// true label, incorrect cells predict it with an "_X" suffix.
LoadedPredictions to_dataset(const MatrixPair& pair);

}  // namespace mutakill
