#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "mutakill/errors.hpp"
#include "mutakill/matrix_io.hpp"

using namespace mutakill;

namespace {

GroundTruth sample_truth() {
  GroundTruth truth;
  truth.input_ids = {"t0", "t1", "t2", "t3"};
  truth.true_labels = {"cat", "dog", "cat", "bird"};
  return truth;
}

std::vector<PredictionMatrix> sample_models() {
  PredictionMatrix orig;
  orig.model_id = "orig";
  orig.instance_ids = {"a", "b"};
  orig.predictions = {{"cat", "dog", "cat", "bird"}, {"cat", "dog", "dog", "bird"}};
  PredictionMatrix mut;
  mut.model_id = "mut";
  mut.instance_ids = {"a", "b"};
  mut.predictions = {{"cat", "cat", "cat", "bird"}, {"dog", "dog", "cat", "bird"}};
  return {orig, mut};
}

}  // namespace

TEST_CASE("ground truth round trip") {
  const GroundTruth truth = sample_truth();
  std::ostringstream out;
  write_ground_truth(out, truth);
  std::istringstream in(out.str());
  CHECK(read_ground_truth(in, "mem") == truth);
}

TEST_CASE("ground truth column order is file order") {
  std::istringstream in("input_id,true_label\nzz,1\naa,2\nmm,3\n");
  const GroundTruth truth = read_ground_truth(in, "mem");
  CHECK(truth.input_ids == std::vector<std::string>{"zz", "aa", "mm"});
  CHECK(truth.true_labels == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("ground truth rejections") {
  SUBCASE("bad header") {
    std::istringstream in("id,label\nx,1\n");
    CHECK_THROWS_AS(read_ground_truth(in, "mem"), FormatError);
  }
  SUBCASE("duplicate input id") {
    std::istringstream in("input_id,true_label\nx,1\nx,2\n");
    CHECK_THROWS_AS(read_ground_truth(in, "mem"), DataError);
  }
  SUBCASE("empty body") {
    std::istringstream in("input_id,true_label\n");
    CHECK_THROWS_AS(read_ground_truth(in, "mem"), FormatError);
  }
  SUBCASE("wrong field count") {
    std::istringstream in("input_id,true_label\nx\n");
    CHECK_THROWS_AS(read_ground_truth(in, "mem"), FormatError);
  }
}

TEST_CASE("predictions round trip preserves models, instances and columns") {
  const GroundTruth truth = sample_truth();
  const auto models = sample_models();

  std::ostringstream out;
  write_predictions(out, models, truth);
  std::istringstream in(out.str());
  const auto loaded = read_predictions(in, "mem", truth);

  REQUIRE(loaded.size() == 2);
  // Lexicographic by model_id.
  CHECK(loaded[0].model_id == "mut");
  CHECK(loaded[1].model_id == "orig");
  CHECK(loaded[0] == models[1]);
  CHECK(loaded[1] == models[0]);
}

TEST_CASE("prediction rows may arrive in any order") {
  const GroundTruth truth = sample_truth();
  std::istringstream in(
      "model_id,instance_id,input_id,predicted_label\n"
      "m,i,t3,bird\n"
      "m,i,t0,cat\n"
      "m,i,t2,cat\n"
      "m,i,t1,dog\n");
  const auto loaded = read_predictions(in, "mem", truth);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].predictions[0] ==
        std::vector<std::string>{"cat", "dog", "cat", "bird"});
}

TEST_CASE("prediction ingestion defects are typed") {
  const GroundTruth truth = sample_truth();
  SUBCASE("unknown input id") {
    std::istringstream in(
        "model_id,instance_id,input_id,predicted_label\n"
        "m,i,nope,cat\n");
    CHECK_THROWS_WITH_AS(read_predictions(in, "mem", truth),
                         doctest::Contains("mem:2"), UnknownInputError);
  }
  SUBCASE("duplicate cell") {
    std::istringstream in(
        "model_id,instance_id,input_id,predicted_label\n"
        "m,i,t0,cat\n"
        "m,i,t0,dog\n");
    CHECK_THROWS_AS(read_predictions(in, "mem", truth), DuplicateCellError);
  }
  SUBCASE("missing cells name the hole") {
    std::istringstream in(
        "model_id,instance_id,input_id,predicted_label\n"
        "m,i,t0,cat\n"
        "m,i,t1,dog\n"
        "m,i,t2,cat\n");
    CHECK_THROWS_WITH_AS(read_predictions(in, "mem", truth), doctest::Contains("t3"),
                         RaggedInstanceError);
  }
  SUBCASE("bad header") {
    std::istringstream in("model,instance,input,label\nm,i,t0,cat\n");
    CHECK_THROWS_AS(read_predictions(in, "mem", truth), FormatError);
  }
  SUBCASE("no data rows") {
    std::istringstream in("model_id,instance_id,input_id,predicted_label\n");
    CHECK_THROWS_AS(read_predictions(in, "mem", truth), FormatError);
  }
}

TEST_CASE("quoted fields and CRLF survive a round trip") {
  GroundTruth truth;
  truth.input_ids = {"in,1", "in\"2"};
  truth.true_labels = {"label, with comma", "plain"};

  std::ostringstream out;
  write_ground_truth(out, truth);
  std::string text = out.str();
  // Re-read with CRLF line endings.
  std::string crlf;
  for (char ch : text) {
    if (ch == '\n') crlf += "\r\n";
    else crlf += ch;
  }
  std::istringstream in(crlf);
  CHECK(read_ground_truth(in, "mem") == truth);
}

TEST_CASE("correctness compares labels after trimming") {
  GroundTruth truth;
  truth.input_ids = {"t0", "t1"};
  truth.true_labels = {"cat", "dog"};
  PredictionMatrix pm;
  pm.model_id = "m";
  pm.instance_ids = {"i"};
  pm.predictions = {{" cat ", "cat"}};
  const CorrectnessMatrix cm = correctness(pm, truth);
  CHECK(cm.bits.at(0, 0));
  CHECK_FALSE(cm.bits.at(0, 1));
  CHECK(cm.model_id == "m");
}

TEST_CASE("accuracy sample over subsets") {
  CorrectnessMatrix cm;
  cm.model_id = "m";
  cm.bits = BoolMatrix(2, 4);
  cm.bits.set(0, 0, true);
  cm.bits.set(0, 1, true);
  cm.bits.set(1, 2, true);

  const std::vector<std::size_t> first_two{0, 1};
  const auto sample = accuracy_sample(cm, first_two);
  CHECK(sample.values == std::vector<double>{1.0, 0.0});

  const auto full = accuracy_sample(cm, all_columns(4));
  CHECK(full.values == std::vector<double>{0.5, 0.25});

  SUBCASE("subset validation") {
    const std::vector<std::size_t> empty;
    const std::vector<std::size_t> out_of_range{9};
    const std::vector<std::size_t> duplicated{1, 1};
    CHECK_THROWS_AS(accuracy_sample(cm, empty), UsageError);
    CHECK_THROWS_AS(accuracy_sample(cm, out_of_range), UsageError);
    CHECK_THROWS_AS(accuracy_sample(cm, duplicated), UsageError);
  }
}

TEST_CASE("validate catches ragged prediction matrices") {
  PredictionMatrix pm;
  pm.model_id = "m";
  pm.instance_ids = {"a", "b"};
  pm.predictions = {{"x", "y"}, {"x"}};
  CHECK_THROWS_AS(pm.validate(), DataError);
}
