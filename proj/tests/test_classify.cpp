#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "support/oracles.hpp"
#include "textmine/classify.hpp"
#include "textmine/features.hpp"

using namespace textmine;

namespace {

SparseVector vec(std::initializer_list<std::pair<const char*, double>> entries) {
  SparseVector v;
  for (const auto& [id, w] : entries) v.entries[id] = w;
  return v;
}

// Tiny separable set: label H iff feature "a" present.
std::vector<LabeledVector> tiny_separable() {
  return {
      {vec({{"a", 1.0}, {"b", 1.0}}), "H"},
      {vec({{"a", 2.0}}), "H"},
      {vec({{"a", 1.0}, {"c", 1.0}}), "H"},
      {vec({{"b", 1.0}}), "N"},
      {vec({{"c", 2.0}}), "N"},
      {vec({{"b", 1.0}, {"c", 1.0}}), "N"},
  };
}

FeatureConfig word_config() {
  FeatureConfig c;
  c.char_ngrams = {};
  c.word_ngrams = {1};
  return c;
}

// Separable bag-of-words corpus with marker tokens per class.
std::vector<LabeledVector> marker_data(int n, std::uint32_t seed) {
  auto rng = detail::make_rng(seed);
  std::vector<LabeledVector> data;
  for (int i = 0; i < n; ++i) {
    bool hot = i % 2 == 0;
    std::string text = hot ? "marker" : "token";
    for (int w = 0; w < 5; ++w)
      text += " filler" + std::to_string(detail::next_index(rng, 20));
    data.push_back({vectorize(text, word_config()), hot ? "B" : "A"});
  }
  return data;
}

}  // namespace

TEST_CASE("training validates the label set") {
  std::vector<LabeledVector> one = {{vec({{"a", 1.0}}), "X"}};
  CHECK_THROWS_AS(train_perceptron(one), dataset_error);
  CHECK_THROWS_AS(train_svm(one), dataset_error);
  CHECK_THROWS_AS(train_tree(one, 1), dataset_error);
  CHECK_THROWS_AS(train_perceptron({}), dataset_error);
  std::vector<LabeledVector> three = {{vec({{"a", 1.0}}), "X"},
                                      {vec({{"b", 1.0}}), "Y"},
                                      {vec({{"c", 1.0}}), "Z"}};
  CHECK_THROWS_AS(train_svm(three), dataset_error);
}

TEST_CASE("training validates hyperparameters") {
  auto data = tiny_separable();
  CHECK_THROWS_AS(train_perceptron(data, 0), parameter_error);
  CHECK_THROWS_AS(train_svm(data, 0.0), parameter_error);
  CHECK_THROWS_AS(train_svm(data, -1.0), parameter_error);
  CHECK_THROWS_AS(train_svm(data, 1e-4, 0), parameter_error);
  CHECK_THROWS_AS(train_tree(data, 0), parameter_error);
}

TEST_CASE("labels are assigned by lexicographic order") {
  PerceptronModel m = train_perceptron(tiny_separable());
  CHECK(m.negative_label == "H");
  CHECK(m.positive_label == "N");
}

TEST_CASE("perceptron separates separable data") {
  auto data = tiny_separable();
  PerceptronModel m = train_perceptron(data);
  for (const auto& ex : data) CHECK(predict(m, ex.vector).label == ex.label);
}

TEST_CASE("perceptron is deterministic in the seed") {
  auto data = marker_data(60, 42);
  PerceptronModel a = train_perceptron(data, 5, 7);
  PerceptronModel b = train_perceptron(data, 5, 7);
  PerceptronModel c = train_perceptron(data, 5, 8);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.weights != c.weights);  // different shuffle, different trajectory
}

TEST_CASE("svm separates separable data and drives the objective down") {
  auto data = marker_data(100, 3);
  SvmModel early = train_svm(data, 1e-4, 1, 11);
  SvmModel late = train_svm(data, 1e-4, 10, 11);
  for (const auto& ex : data) CHECK(predict(late, ex.vector).label == ex.label);
  CHECK(svm_objective(late, data) <= svm_objective(early, data) + 1e-9);
}

TEST_CASE("svm model records lambda and is seed-deterministic") {
  auto data = marker_data(40, 5);
  SvmModel a = train_svm(data, 1e-3, 10, 2);
  SvmModel b = train_svm(data, 1e-3, 10, 2);
  CHECK(a.lambda == 1e-3);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("decision tree on pure data is a single leaf") {
  std::vector<LabeledVector> data = {{vec({{"a", 1.0}}), "X"},
                                     {vec({{"b", 1.0}}), "X"},
                                     {vec({{"c", 1.0}}), "Y"}};
  // make it impure but unsplittable via min_leaf
  DecisionTreeModel stub = train_tree(data, 100);
  REQUIRE(stub.nodes.size() == 1);
  CHECK(stub.nodes[0].is_leaf());
  CHECK(stub.nodes[0].label == "X");  // majority

  std::vector<LabeledVector> pure = {{vec({{"a", 1.0}}), "X"},
                                     {vec({{"b", 1.0}}), "X"}};
  CHECK_THROWS_AS(train_tree(pure, 1), dataset_error);  // only one label
}

TEST_CASE("decision tree splits on the most informative feature") {
  // "signal" decides the label; "noise" is independent of it
  std::vector<LabeledVector> data;
  for (int i = 0; i < 40; ++i) {
    bool pos = i % 2 == 0;
    bool noise = i % 4 < 2;
    SparseVector v;
    if (pos) v.entries["signal"] = 1.0;
    if (noise) v.entries["noise"] = 1.0;
    v.entries["always"] = 1.0;
    data.push_back({v, pos ? "P" : "N"});
  }
  DecisionTreeModel m = train_tree(data, 5);
  REQUIRE_FALSE(m.nodes[0].is_leaf());
  CHECK(m.nodes[0].feature == "signal");
  CHECK(m.nodes[0].feature == oracle::best_root_feature(data, m.positive_label));
  for (const auto& ex : data) CHECK(predict(m, ex.vector).label == ex.label);
}

TEST_CASE("decision tree breaks gain ties toward the smaller feature id") {
  // "alpha" and "zeta" have identical presence patterns, hence equal gain
  std::vector<LabeledVector> data;
  for (int i = 0; i < 20; ++i) {
    bool pos = i % 2 == 0;
    SparseVector v;
    if (pos) {
      v.entries["zeta"] = 1.0;
      v.entries["alpha"] = 1.0;
    }
    data.push_back({v, pos ? "P" : "N"});
  }
  DecisionTreeModel m = train_tree(data, 5);
  REQUIRE_FALSE(m.nodes[0].is_leaf());
  CHECK(m.nodes[0].feature == "alpha");
}

TEST_CASE("decision tree respects min_leaf on both children") {
  std::vector<LabeledVector> data;
  for (int i = 0; i < 100; ++i) {
    bool pos = i < 50;
    SparseVector v;
    if (i < 5) v.entries["rare"] = 1.0;  // informative but tiny support
    if (pos) v.entries["weak"] = 1.0;    // weakly informative, big support
    data.push_back({v, pos ? "P" : "N"});
  }
  DecisionTreeModel m = train_tree(data, 10);
  for (const auto& node : m.nodes) CHECK(node.feature != "rare");
  // every leaf holds at least min_leaf examples
  for (const auto& node : m.nodes) {
    if (!node.is_leaf()) continue;
    long total = 0;
    for (const auto& [label, c] : node.counts) total += c;
    CHECK(total >= 10);
  }
}

TEST_CASE("tree leaves report the majority fraction as score") {
  std::vector<LabeledVector> data;
  for (int i = 0; i < 10; ++i)
    data.push_back({vec({{"x", 1.0}}), i < 7 ? "A" : "B"});
  DecisionTreeModel m = train_tree(data, 100);
  Prediction p = predict(m, vec({{"x", 1.0}}));
  CHECK(p.label == "A");
  CHECK(p.score == Catch::Approx(0.7));
}

TEST_CASE("predict ignores unknown features and handles empty vectors") {
  PerceptronModel m = train_perceptron(tiny_separable());
  SparseVector unknown = vec({{"zzz", 5.0}});
  Prediction p = predict(m, unknown);
  Prediction empty = predict(m, SparseVector{});
  CHECK(p.label == empty.label);  // zero activation either way
  CHECK(p.score == m.bias);
  CHECK(empty.label == (m.bias > 0 ? m.positive_label : m.negative_label));
}

TEST_CASE("Model variant dispatches predictions") {
  auto data = tiny_separable();
  Model m = train_svm(data);
  CHECK(predict(m, vec({{"a", 3.0}})).label == "H");
}

TEST_CASE("stratified folds balance classes within one") {
  std::vector<std::string> labels;
  for (int i = 0; i < 25; ++i) labels.push_back("A");
  for (int i = 0; i < 11; ++i) labels.push_back("B");
  auto fold = stratified_folds(labels, 4, 9);
  REQUIRE(fold.size() == labels.size());
  std::map<int, std::map<std::string, int>> per_fold;
  for (std::size_t i = 0; i < labels.size(); ++i) ++per_fold[fold[i]][labels[i]];
  REQUIRE(per_fold.size() == 4);
  for (const auto& [f, counts] : per_fold) {
    CHECK(counts.at("A") >= 25 / 4);
    CHECK(counts.at("A") <= 25 / 4 + 1);
    CHECK(counts.at("B") >= 11 / 4);
    CHECK(counts.at("B") <= 11 / 4 + 1);
  }
}

TEST_CASE("stratified folds validate inputs") {
  std::vector<std::string> labels = {"A", "A", "A", "B", "B"};
  CHECK_THROWS_AS(stratified_folds(labels, 1, 0), parameter_error);
  CHECK_THROWS_AS(stratified_folds(labels, 3, 0), dataset_error);  // B has 2 < 3
  CHECK_NOTHROW(stratified_folds(labels, 2, 0));
}

TEST_CASE("kfoldcv pools one confusion matrix over all folds") {
  auto data = marker_data(60, 21);
  Trainer trainer = [](const std::vector<LabeledVector>& d) -> Model {
    return train_perceptron(d, 5, 0);
  };
  Metrics m = kfoldcv(trainer, data, 3, 4);
  long total = 0;
  for (const auto& [gold, row] : m.confusion)
    for (const auto& [pred, c] : row) total += c;
  CHECK(total == 60);  // every example predicted exactly once
  CHECK(m.macro_f1 > 0.9);
}

TEST_CASE("metrics match a brute-force oracle") {
  std::vector<std::string> predicted = {"a", "b", "a", "c", "b", "a", "c", "c"};
  std::vector<std::string> gold = {"a", "a", "a", "c", "b", "b", "c", "a"};
  Metrics m = metrics(predicted, gold);
  for (const auto& cls : {"a", "b", "c"}) {
    auto expected = oracle::prf(predicted, gold, cls);
    CHECK(m.per_class.at(cls).precision == Catch::Approx(expected.precision).epsilon(1e-12));
    CHECK(m.per_class.at(cls).recall == Catch::Approx(expected.recall).epsilon(1e-12));
    CHECK(m.per_class.at(cls).f1 == Catch::Approx(expected.f1).epsilon(1e-12));
  }
  CHECK(m.confusion.at("a").at("a") == 2);
  CHECK(m.confusion.at("a").at("c") == 1);
}

TEST_CASE("metrics covers classes seen only in predictions") {
  Metrics m = metrics({"x", "x"}, {"y", "y"});
  CHECK(m.per_class.at("x").precision == 0.0);
  CHECK(m.per_class.at("y").recall == 0.0);
  CHECK(m.macro_f1 == 0.0);
}

TEST_CASE("metrics validates inputs") {
  CHECK_THROWS_AS(metrics({"a"}, {"a", "b"}), parameter_error);
  CHECK_THROWS_AS(metrics({}, {}), parameter_error);
}

TEST_CASE("metrics_table aligns task and class rows") {
  Metrics m = metrics({"a", "b"}, {"a", "b"});
  std::string table = metrics_table(m, "demo");
  CHECK(table.find("TASK") == 0);
  CHECK(table.find("PRECISION") != std::string::npos);
  CHECK(table.find("demo") != std::string::npos);
  CHECK(table.find("100.0") != std::string::npos);
}

TEST_CASE("models survive a save/load round trip") {
  auto data = marker_data(30, 77);
  auto path = std::filesystem::temp_directory_path() / "textmine_model_rt.json";
  for (Model original : {Model(train_perceptron(data, 3, 1)),
                         Model(train_svm(data, 1e-3, 3, 1)),
                         Model(train_tree(data, 5))}) {
    save_model(original, path);
    Model loaded = load_model(path);
    for (const auto& ex : data) {
      Prediction a = predict(original, ex.vector);
      Prediction b = predict(loaded, ex.vector);
      CHECK(a.label == b.label);
      CHECK(a.score == b.score);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("model persistence rejects malformed input") {
  CHECK_THROWS_AS(model_from_json("not json"), persistence_error);
  CHECK_THROWS_AS(model_from_json("{}"), persistence_error);
  CHECK_THROWS_AS(model_from_json("{\"schema_version\": 99}"), persistence_error);
  Model m = train_perceptron(tiny_separable());
  std::string good = model_to_json(m);
  std::string wrong_kind = good;
  wrong_kind.replace(wrong_kind.find("perceptron"), 10, "mysterybox");
  CHECK_THROWS_AS(model_from_json(wrong_kind), persistence_error);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), io_error);
}

TEST_CASE("model JSON carries schema version, labels, and config") {
  FeatureConfig config;
  config.char_ngrams = {2};
  config.word_ngrams = {1};
  auto data = tiny_separable();
  Model m = train_svm(data, 1e-4, 5, 0, config);
  auto j = nlohmann::json::parse(model_to_json(m));
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("kind") == "svm");
  CHECK(j.at("labels").at("negative") == "H");
  CHECK(j.at("labels").at("positive") == "N");
  CHECK(j.at("feature_config").at("char_ngrams") == std::vector<int>{2});
  CHECK(j.at("parameters").contains("weights"));
  CHECK(j.at("parameters").contains("lambda"));
}
