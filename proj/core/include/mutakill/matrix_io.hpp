#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mutakill {

/// Ordered (input_id, true_label) pairs. The order of first appearance in
/// the ground-truth file defines the column order of every aligned matrix
/// and the cumulative prefixes used by monotonicity audits.
struct GroundTruth {
  std::vector<std::string> input_ids;
  std::vector<std::string> true_labels;

  std::size_t n_inputs() const { return input_ids.size(); }

  /// Non-empty, ids unique, vectors aligned. Throws DataError otherwise.
  void validate() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Predicted labels of all instances of one model, columns in ground-truth
/// order. Instances are densely indexed 0..r-1 in instance_id order.
struct PredictionMatrix {
  std::string model_id;
  std::vector<std::string> instance_ids;
  std::vector<std::vector<std::string>> predictions;  // [instance][column]

  std::size_t instance_count() const { return predictions.size(); }
  std::size_t n_inputs() const { return predictions.empty() ? 0 : predictions.front().size(); }

  /// Rectangular, at least one instance, instance_ids aligned with rows.
  void validate() const;

  friend bool operator==(const PredictionMatrix&, const PredictionMatrix&) = default;
};

/// Dense row-major boolean matrix.
class BoolMatrix {
 public:
  BoolMatrix() = default;
  BoolMatrix(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), cells_(rows * cols, fill ? 1 : 0) {}

  bool at(std::size_t row, std::size_t col) const { return cells_[row * cols_ + col] != 0; }
  void set(std::size_t row, std::size_t col, bool value) {
    cells_[row * cols_ + col] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Instances x inputs correctness bits: true where the predicted label
/// matches the true label. Column order identical to the ground truth.
struct CorrectnessMatrix {
  std::string model_id;
  BoolMatrix bits;

  std::size_t instance_count() const { return bits.rows(); }
  std::size_t n_inputs() const { return bits.cols(); }

  friend bool operator==(const CorrectnessMatrix&, const CorrectnessMatrix&) = default;
};

/// Per-instance accuracies in [0, 1] over some column subset.
struct AccuracySample {
  std::vector<double> values;

  friend bool operator==(const AccuracySample&, const AccuracySample&) = default;
};

struct LoadedPredictions {
  GroundTruth truth;
  std::vector<PredictionMatrix> models;  // lexicographic by model_id
};

/// Ground-truth CSV with header `input_id,true_label`.
GroundTruth load_ground_truth(const std::filesystem::path& path);
GroundTruth read_ground_truth(std::istream& in, const std::string& source_name);

/// Predictions CSV with header `model_id,instance_id,input_id,predicted_label`,
/// one row per cell, validated and aligned against the ground truth.
/// Throws UnknownInputError, DuplicateCellError, RaggedInstanceError or
/// FormatError on the corresponding defects.
LoadedPredictions load_predictions(const std::filesystem::path& predictions_path,
                                   const std::filesystem::path& truth_path);
std::vector<PredictionMatrix> read_predictions(std::istream& in, const std::string& source_name,
                                               const GroundTruth& truth);

void write_ground_truth(std::ostream& out, const GroundTruth& truth);
void write_predictions(std::ostream& out, std::span<const PredictionMatrix> models,
                       const GroundTruth& truth);
void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
void save_predictions(const std::filesystem::path& path,
                      std::span<const PredictionMatrix> models, const GroundTruth& truth);

/// Correctness bits for one model against the ground truth. Label equality
/// is exact string match after trimming surrounding whitespace.
CorrectnessMatrix correctness(const PredictionMatrix& predictions, const GroundTruth& truth);

/// Per-instance mean correctness over the selected columns. The subset must
/// be non-empty, in range and free of duplicates.
AccuracySample accuracy_sample(const CorrectnessMatrix& matrix,
                               std::span<const std::size_t> subset);

/// Convenience: the identity subset {0, 1, ..., n-1}.
std::vector<std::size_t> all_columns(std::size_t n);

}  // namespace mutakill
