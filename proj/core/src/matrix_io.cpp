#include "mutakill/matrix_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mutakill/errors.hpp"
#include "text_util.hpp"

namespace mutakill {

namespace {

using detail::csv_escape;
using detail::split_csv_record;
using detail::trim;

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

// Reads the next line, dropping a trailing CR from CRLF input.
bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void expect_header(std::istream& in, const std::string& source,
                   const std::vector<std::string>& expected) {
  std::string line;
  if (!read_line(in, line)) {
    throw FormatError(source + ": empty file, expected header");
  }
  std::vector<std::string> fields;
  if (!split_csv_record(line, fields) || fields != expected) {
    std::string want;
    for (const auto& f : expected) {
      if (!want.empty()) want += ',';
      want += f;
    }
    throw FormatError(where(source, 1) + ": expected header `" + want + "`, got `" + line + "`");
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open file: " + path.string());
  }
  return in;
}

}  // namespace

void GroundTruth::validate() const {
  if (input_ids.empty()) throw DataError("ground truth must be non-empty");
  if (input_ids.size() != true_labels.size()) {
    throw DataError("ground truth ids/labels size mismatch");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : input_ids) {
    if (id.empty()) throw DataError("ground truth contains an empty input_id");
    if (!seen.insert(id).second) {
      throw DataError("duplicate input_id in ground truth: " + id);
    }
  }
}

void PredictionMatrix::validate() const {
  if (predictions.empty()) throw DataError("prediction matrix `" + model_id + "` has no instances");
  if (instance_ids.size() != predictions.size()) {
    throw DataError("prediction matrix `" + model_id + "` instance_ids/rows mismatch");
  }
  const std::size_t n = predictions.front().size();
  for (const auto& row : predictions) {
    if (row.size() != n) {
      throw DataError("prediction matrix `" + model_id + "` is not rectangular");
    }
  }
}

GroundTruth read_ground_truth(std::istream& in, const std::string& source_name) {
  expect_header(in, source_name, {"input_id", "true_label"});

  GroundTruth truth;
  std::unordered_set<std::string> seen;
  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_csv_record(line, fields)) {
      throw FormatError(where(source_name, line_no) + ": unbalanced quotes");
    }
    if (fields.size() != 2) {
      throw FormatError(where(source_name, line_no) + ": expected 2 fields, got " +
                        std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw FormatError(where(source_name, line_no) + ": empty input_id");
    }
    if (!seen.insert(fields[0]).second) {
      throw FormatError(where(source_name, line_no) + ": duplicate input_id `" + fields[0] + "`");
    }
    truth.input_ids.push_back(std::move(fields[0]));
    truth.true_labels.push_back(std::move(fields[1]));
  }
  if (truth.input_ids.empty()) {
    throw FormatError(source_name + ": ground truth has no rows");
  }
  return truth;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_ground_truth(in, path.string());
}

std::vector<PredictionMatrix> read_predictions(std::istream& in, const std::string& source_name,
                                               const GroundTruth& truth) {
  truth.validate();
  expect_header(in, source_name, {"model_id", "instance_id", "input_id", "predicted_label"});

  std::unordered_map<std::string, std::size_t> column_of;
  column_of.reserve(truth.n_inputs());
  for (std::size_t j = 0; j < truth.n_inputs(); ++j) {
    column_of.emplace(truth.input_ids[j], j);
  }

  struct InstanceCells {
    std::vector<std::string> labels;
    std::vector<std::uint8_t> filled;
  };
  // std::map keeps model and instance order deterministic (lexicographic).
  std::map<std::string, std::map<std::string, InstanceCells>> cells;

  std::string line;
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  std::size_t data_rows = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_csv_record(line, fields)) {
      throw FormatError(where(source_name, line_no) + ": unbalanced quotes");
    }
    if (fields.size() != 4) {
      throw FormatError(where(source_name, line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    const std::string& model_id = fields[0];
    const std::string& instance_id = fields[1];
    const std::string& input_id = fields[2];
    if (model_id.empty() || instance_id.empty()) {
      throw FormatError(where(source_name, line_no) + ": empty model_id or instance_id");
    }
    const auto col_it = column_of.find(input_id);
    if (col_it == column_of.end()) {
      throw UnknownInputError(where(source_name, line_no) + ": input_id `" + input_id +
                              "` is not present in the ground truth");
    }
    auto& instance = cells[model_id][instance_id];
    if (instance.labels.empty()) {
      instance.labels.resize(truth.n_inputs());
      instance.filled.assign(truth.n_inputs(), 0);
    }
    const std::size_t col = col_it->second;
    if (instance.filled[col]) {
      throw DuplicateCellError(where(source_name, line_no) + ": duplicate cell (" + model_id +
                               ", " + instance_id + ", " + input_id + ")");
    }
    instance.labels[col] = std::move(fields[3]);
    instance.filled[col] = 1;
    ++data_rows;
  }
  if (data_rows == 0) {
    throw FormatError(source_name + ": predictions file has no rows");
  }

  std::vector<PredictionMatrix> models;
  models.reserve(cells.size());
  for (auto& [model_id, instances] : cells) {
    PredictionMatrix pm;
    pm.model_id = model_id;
    for (auto& [instance_id, instance] : instances) {
      for (std::size_t j = 0; j < truth.n_inputs(); ++j) {
        if (!instance.filled[j]) {
          throw RaggedInstanceError("model `" + model_id + "` instance `" + instance_id +
                                    "` is missing a prediction for input `" +
                                    truth.input_ids[j] + "`");
        }
      }
      pm.instance_ids.push_back(instance_id);
      pm.predictions.push_back(std::move(instance.labels));
    }
    pm.validate();
    models.push_back(std::move(pm));
  }
  return models;
}

LoadedPredictions load_predictions(const std::filesystem::path& predictions_path,
                                   const std::filesystem::path& truth_path) {
  LoadedPredictions loaded;
  loaded.truth = load_ground_truth(truth_path);
  auto in = open_or_throw(predictions_path);
  loaded.models = read_predictions(in, predictions_path.string(), loaded.truth);
  return loaded;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  truth.validate();
  out << "input_id,true_label\n";
  for (std::size_t j = 0; j < truth.n_inputs(); ++j) {
    out << csv_escape(truth.input_ids[j]) << ',' << csv_escape(truth.true_labels[j]) << '\n';
  }
}

void write_predictions(std::ostream& out, std::span<const PredictionMatrix> models,
                       const GroundTruth& truth) {
  truth.validate();
  out << "model_id,instance_id,input_id,predicted_label\n";
  for (const auto& pm : models) {
    pm.validate();
    if (pm.n_inputs() != truth.n_inputs()) {
      throw DataError("prediction matrix `" + pm.model_id + "` column count differs from truth");
    }
    for (std::size_t i = 0; i < pm.instance_count(); ++i) {
      for (std::size_t j = 0; j < truth.n_inputs(); ++j) {
        out << csv_escape(pm.model_id) << ',' << csv_escape(pm.instance_ids[i]) << ','
            << csv_escape(truth.input_ids[j]) << ',' << csv_escape(pm.predictions[i][j]) << '\n';
      }
    }
  }
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path.string());
  write_ground_truth(out, truth);
}

void save_predictions(const std::filesystem::path& path,
                      std::span<const PredictionMatrix> models, const GroundTruth& truth) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open file for writing: " + path.string());
  write_predictions(out, models, truth);
}

CorrectnessMatrix correctness(const PredictionMatrix& predictions, const GroundTruth& truth) {
  predictions.validate();
  truth.validate();
  if (predictions.n_inputs() != truth.n_inputs()) {
    throw DataError("prediction matrix `" + predictions.model_id +
                    "` is not aligned with the ground truth");
  }
  CorrectnessMatrix cm;
  cm.model_id = predictions.model_id;
  cm.bits = BoolMatrix(predictions.instance_count(), truth.n_inputs());
  for (std::size_t i = 0; i < predictions.instance_count(); ++i) {
    for (std::size_t j = 0; j < truth.n_inputs(); ++j) {
      cm.bits.set(i, j, trim(predictions.predictions[i][j]) == trim(truth.true_labels[j]));
    }
  }
  return cm;
}

AccuracySample accuracy_sample(const CorrectnessMatrix& matrix,
                               std::span<const std::size_t> subset) {
  if (subset.empty()) {
    throw UsageError("accuracy is undefined on an empty input subset");
  }
  std::vector<std::uint8_t> seen(matrix.n_inputs(), 0);
  for (std::size_t col : subset) {
    if (col >= matrix.n_inputs()) {
      throw UsageError("accuracy subset index " + std::to_string(col) + " out of range");
    }
    if (seen[col]) {
      throw UsageError("accuracy subset contains duplicate index " + std::to_string(col));
    }
    seen[col] = 1;
  }

  AccuracySample sample;
  sample.values.reserve(matrix.instance_count());
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    std::size_t correct = 0;
    for (std::size_t col : subset) {
      if (matrix.bits.at(i, col)) ++correct;
    }
    sample.values.push_back(static_cast<double>(correct) / static_cast<double>(subset.size()));
  }
  return sample;
}

std::vector<std::size_t> all_columns(std::size_t n) {
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return cols;
}

}  // namespace mutakill
