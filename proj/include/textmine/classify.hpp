#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "textmine/detail/random.hpp"
#include "textmine/errors.hpp"
#include "textmine/features.hpp"

namespace textmine {

struct LabeledVector {
  SparseVector vector;
  std::string label;
};

/// Averaged perceptron (the average of the weight vector over every update
/// step, which damps the oscillation of the plain online algorithm).
struct PerceptronModel {
  std::map<std::string, double> weights;
  double bias = 0.0;
  std::string negative_label, positive_label;
  FeatureConfig config;
};

/// Linear SVM trained by stochastic subgradient descent on the
/// L2-regularized hinge loss with step size 1/(lambda*t).
struct SvmModel {
  std::map<std::string, double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  std::string negative_label, positive_label;
  FeatureConfig config;
};

/// Node arena for the decision tree; children are indices, -1 for leaves.
struct TreeNode {
  std::string feature;  // empty at leaves
  int absent = -1;
  int present = -1;
  std::string label;                  // leaf prediction
  std::map<std::string, long> counts; // leaf class counts

  bool is_leaf() const { return absent < 0 && present < 0; }
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  long min_leaf = 100;
  std::string negative_label, positive_label;
  FeatureConfig config;
};

using Model = std::variant<PerceptronModel, SvmModel, DecisionTreeModel>;

struct Prediction {
  std::string label;
  double score = 0.0;
};

struct ClassMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
};

struct Metrics {
  std::map<std::string, ClassMetrics> per_class;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  std::map<std::string, std::map<std::string, long>> confusion;  // gold -> predicted -> count
};

namespace detail {

inline std::pair<std::string, std::string> binary_labels(
    const std::vector<LabeledVector>& data) {
  std::set<std::string> labels;
  for (const auto& ex : data) labels.insert(ex.label);
  if (labels.size() != 2)
    throw dataset_error("training data must have exactly 2 labels, got " +
                        std::to_string(labels.size()));
  auto it = labels.begin();
  std::string neg = *it++;
  return {neg, *it};  // negative = lexicographically smaller
}

inline double dot(const std::map<std::string, double>& weights,
                  const SparseVector& x) {
  double s = 0.0;
  for (const auto& [id, v] : x.entries) {
    auto it = weights.find(id);
    if (it != weights.end()) s += it->second * v;
  }
  return s;
}

}  // namespace detail

inline Prediction predict(const PerceptronModel& m, const SparseVector& x) {
  double score = detail::dot(m.weights, x) + m.bias;
  return {score > 0.0 ? m.positive_label : m.negative_label, score};
}

inline Prediction predict(const SvmModel& m, const SparseVector& x) {
  double score = detail::dot(m.weights, x) + m.bias;
  return {score > 0.0 ? m.positive_label : m.negative_label, score};
}

inline Prediction predict(const DecisionTreeModel& m, const SparseVector& x) {
  const TreeNode* node = &m.nodes[0];
  while (!node->is_leaf()) {
    bool present = x.at(node->feature) > 0.0;
    node = &m.nodes[present ? node->present : node->absent];
  }
  long total = 0, majority = 0;
  for (const auto& [label, c] : node->counts) {
    total += c;
    if (label == node->label) majority = c;
  }
  double score = total > 0 ? static_cast<double>(majority) / total : 0.0;
  return {node->label, score};
}

inline Prediction predict(const Model& m, const SparseVector& x) {
  return std::visit([&](const auto& model) { return predict(model, x); }, m);
}

inline PerceptronModel train_perceptron(const std::vector<LabeledVector>& data,
                                        int epochs = 10, std::uint32_t seed = 0,
                                        FeatureConfig config = {}) {
  if (epochs < 1) throw parameter_error("train_perceptron: epochs must be >= 1");
  auto [neg, pos] = detail::binary_labels(data);

  // Lazy averaging: each weight keeps the step of its last change, so the
  // running sum only needs updating when the weight actually moves.
  struct Slot {
    double w = 0.0, sum = 0.0;
    long step = 0;
  };
  std::map<std::string, Slot> slots;
  Slot bias;

  auto rng = detail::make_rng(seed);
  const long total_steps = static_cast<long>(epochs) * static_cast<long>(data.size());
  long t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto order = detail::permutation(data.size(), rng);
    for (std::size_t idx : order) {
      ++t;
      const auto& ex = data[idx];
      double y = ex.label == pos ? 1.0 : -1.0;
      double score = bias.w;
      for (const auto& [id, v] : ex.vector.entries) {
        auto it = slots.find(id);
        if (it != slots.end()) score += it->second.w * v;
      }
      if (y * score <= 0.0) {
        for (const auto& [id, v] : ex.vector.entries) {
          Slot& s = slots[id];
          s.sum += s.w * static_cast<double>(t - s.step);
          s.w += y * v;
          s.step = t;
        }
        bias.sum += bias.w * static_cast<double>(t - bias.step);
        bias.w += y;
        bias.step = t;
      }
    }
  }

  PerceptronModel model;
  model.negative_label = neg;
  model.positive_label = pos;
  model.config = std::move(config);
  for (auto& [id, s] : slots) {
    s.sum += s.w * static_cast<double>(total_steps - s.step + 1);
    double avg = s.sum / static_cast<double>(total_steps);
    if (avg != 0.0) model.weights[id] = avg;
  }
  bias.sum += bias.w * static_cast<double>(total_steps - bias.step + 1);
  model.bias = bias.sum / static_cast<double>(total_steps);
  return model;
}

/// Regularized hinge objective: lambda/2 ||w||^2 + mean hinge loss. Exposed
/// so the descent can be checked from outside.
inline double svm_objective(const SvmModel& m, const std::vector<LabeledVector>& data) {
  double norm2 = 0.0;
  for (const auto& [id, w] : m.weights) norm2 += w * w;
  double hinge = 0.0;
  for (const auto& ex : data) {
    double y = ex.label == m.positive_label ? 1.0 : -1.0;
    double margin = y * (detail::dot(m.weights, ex.vector) + m.bias);
    hinge += std::max(0.0, 1.0 - margin);
  }
  return m.lambda / 2.0 * norm2 + (data.empty() ? 0.0 : hinge / data.size());
}

inline SvmModel train_svm(const std::vector<LabeledVector>& data,
                          double lambda = 1e-4, int epochs = 10,
                          std::uint32_t seed = 0, FeatureConfig config = {}) {
  if (lambda <= 0.0) throw parameter_error("train_svm: lambda must be positive");
  if (epochs < 1) throw parameter_error("train_svm: epochs must be >= 1");
  auto [neg, pos] = detail::binary_labels(data);

  // The bias rides along as a constant-1 feature inside the regularized
  // vector, and w is kept as scale * v so the per-step shrink is O(1).
  std::map<std::string, double> v;
  double bias_v = 0.0;
  double scale = 1.0;

  auto rng = detail::make_rng(seed);
  long t = 0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto order = detail::permutation(data.size(), rng);
    for (std::size_t idx : order) {
      ++t;
      const auto& ex = data[idx];
      double y = ex.label == pos ? 1.0 : -1.0;
      double score = scale * (detail::dot(v, ex.vector) + bias_v);
      double eta = 1.0 / (lambda * static_cast<double>(t));
      double decay = 1.0 - eta * lambda;  // 0 at t=1, which zeroes w
      if (decay <= 0.0) {
        v.clear();
        bias_v = 0.0;
        scale = 1.0;
      } else {
        scale *= decay;
      }
      if (y * score < 1.0) {
        double step = eta * y / scale;
        for (const auto& [id, x] : ex.vector.entries) v[id] += step * x;
        bias_v += step;
      }
    }
  }

  SvmModel model;
  model.lambda = lambda;
  model.bias = scale * bias_v;
  model.negative_label = neg;
  model.positive_label = pos;
  model.config = std::move(config);
  for (const auto& [id, w] : v)
    if (w != 0.0) model.weights[id] = scale * w;
  return model;
}

namespace detail {

inline double entropy2(long a, long b) {
  long n = a + b;
  if (n == 0) return 0.0;
  double h = 0.0;
  for (long c : {a, b}) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// Gains this small are treated as zero; a numerically-zero split would
// otherwise slip through the > 0 test.
constexpr double kMinGain = 1e-12;

struct TreeBuilder {
  const std::vector<LabeledVector>& data;
  const std::string& pos;
  long min_leaf;
  std::vector<TreeNode> nodes;

  long positives(const std::vector<std::size_t>& idx) const {
    long p = 0;
    for (std::size_t i : idx) p += data[i].label == pos ? 1 : 0;
    return p;
  }

  int make_leaf(const std::vector<std::size_t>& idx, const std::string& neg) {
    TreeNode leaf;
    long p = positives(idx);
    long n = static_cast<long>(idx.size()) - p;
    leaf.counts[neg] = n;
    leaf.counts[pos] = p;
    // majority label, ties to the lexicographically smaller one
    leaf.label = p > n ? pos : neg;
    nodes.push_back(std::move(leaf));
    return static_cast<int>(nodes.size()) - 1;
  }

  int build(const std::vector<std::size_t>& idx, const std::string& neg) {
    long p = positives(idx);
    long n = static_cast<long>(idx.size()) - p;
    double node_entropy = entropy2(n, p);
    if (p == 0 || n == 0 || static_cast<long>(idx.size()) < 2 * min_leaf)
      return make_leaf(idx, neg);

    // presence counts per feature, split by class
    std::map<std::string, std::pair<long, long>> present;  // feature -> (neg, pos)
    for (std::size_t i : idx)
      for (const auto& [id, w] : data[i].vector.entries)
        if (w > 0.0) {
          auto& cell = present[id];
          (data[i].label == pos ? cell.second : cell.first) += 1;
        }

    std::string best_feature;
    double best_gain = 0.0;
    const long total = static_cast<long>(idx.size());
    for (const auto& [id, cell] : present) {
      long pn = cell.first, pp = cell.second;
      long present_total = pn + pp;
      long absent_total = total - present_total;
      if (present_total < min_leaf || absent_total < min_leaf) continue;
      double gain = node_entropy -
                    (static_cast<double>(present_total) / total) * entropy2(pn, pp) -
                    (static_cast<double>(absent_total) / total) *
                        entropy2(n - pn, p - pp);
      if (gain > best_gain + kMinGain) {  // ties keep the smaller feature id
        best_gain = gain;
        best_feature = id;
      }
    }
    if (best_feature.empty() || best_gain <= kMinGain) return make_leaf(idx, neg);

    std::vector<std::size_t> absent_idx, present_idx;
    for (std::size_t i : idx)
      (data[i].vector.at(best_feature) > 0.0 ? present_idx : absent_idx).push_back(i);

    int self = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[self].feature = best_feature;
    int a = build(absent_idx, neg);
    int b = build(present_idx, neg);
    nodes[self].absent = a;
    nodes[self].present = b;
    return self;
  }
};

}  // namespace detail

/// Greedy binary tree on feature presence, split by maximum information
/// gain; recursion stops at pure nodes, non-positive gain, or children
/// smaller than min_leaf.
inline DecisionTreeModel train_tree(const std::vector<LabeledVector>& data,
                                    long min_leaf = 100, FeatureConfig config = {}) {
  if (min_leaf < 1) throw parameter_error("train_tree: min_leaf must be >= 1");
  auto [neg, pos] = detail::binary_labels(data);
  detail::TreeBuilder builder{data, pos, min_leaf, {}};
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  builder.build(all, neg);

  DecisionTreeModel model;
  model.nodes = std::move(builder.nodes);
  model.min_leaf = min_leaf;
  model.negative_label = neg;
  model.positive_label = pos;
  model.config = std::move(config);
  return model;
}

namespace detail {

inline Metrics metrics_from_confusion(
    const std::map<std::string, std::map<std::string, long>>& confusion) {
  Metrics m;
  m.confusion = confusion;
  std::set<std::string> classes;
  for (const auto& [gold, row] : confusion) {
    classes.insert(gold);
    for (const auto& [pred, c] : row) classes.insert(pred);
  }
  auto cell = [&](const std::string& g, const std::string& p) -> long {
    auto it = confusion.find(g);
    if (it == confusion.end()) return 0;
    auto jt = it->second.find(p);
    return jt == it->second.end() ? 0 : jt->second;
  };
  for (const auto& c : classes) {
    ClassMetrics cm;
    cm.tp = cell(c, c);
    for (const auto& other : classes) {
      if (other == c) continue;
      cm.fp += cell(other, c);
      cm.fn += cell(c, other);
    }
    cm.precision = cm.tp + cm.fp > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fp) : 0.0;
    cm.recall = cm.tp + cm.fn > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fn) : 0.0;
    cm.f1 = cm.precision + cm.recall > 0.0
                ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                : 0.0;
    m.per_class[c] = cm;
    m.macro_precision += cm.precision;
    m.macro_recall += cm.recall;
    m.macro_f1 += cm.f1;
  }
  if (!classes.empty()) {
    m.macro_precision /= static_cast<double>(classes.size());
    m.macro_recall /= static_cast<double>(classes.size());
    m.macro_f1 /= static_cast<double>(classes.size());
  }
  return m;
}

}  // namespace detail

/// Per-class precision/recall/F1 (F1 the harmonic mean) with unweighted
/// macro averages.
inline Metrics metrics(const std::vector<std::string>& predicted,
                       const std::vector<std::string>& gold) {
  if (predicted.size() != gold.size())
    throw parameter_error("metrics: predicted and gold lengths differ");
  if (gold.empty()) throw parameter_error("metrics: empty label lists");
  std::map<std::string, std::map<std::string, long>> confusion;
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++confusion[gold[i]][predicted[i]];
  return detail::metrics_from_confusion(confusion);
}

/// Deterministic stratified fold assignment: per-class seeded shuffle,
/// then round-robin. Fold sizes per class differ by at most one.
inline std::vector<int> stratified_folds(const std::vector<std::string>& labels,
                                         int k, std::uint32_t seed) {
  if (k < 2) throw parameter_error("stratified_folds: k must be >= 2");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  for (const auto& [label, idx] : by_label)
    if (idx.size() < static_cast<std::size_t>(k))
      throw dataset_error("class '" + label + "' has " +
                          std::to_string(idx.size()) + " examples, fewer than k=" +
                          std::to_string(k));
  std::vector<int> fold(labels.size(), 0);
  auto rng = detail::make_rng(seed);
  for (auto& [label, idx] : by_label) {
    detail::shuffle(idx, rng);
    for (std::size_t j = 0; j < idx.size(); ++j)
      fold[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
  }
  return fold;
}

using Trainer = std::function<Model(const std::vector<LabeledVector>&)>;

/// Stratified k-fold cross-validation pooling one confusion matrix over
/// all folds.
inline Metrics kfoldcv(const Trainer& trainer, const std::vector<LabeledVector>& data,
                       int k, std::uint32_t seed = 0) {
  std::vector<std::string> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.label);
  auto fold = stratified_folds(labels, k, seed);

  std::map<std::string, std::map<std::string, long>> confusion;
  for (int f = 0; f < k; ++f) {
    std::vector<LabeledVector> train;
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold[i] == f)
        held.push_back(i);
      else
        train.push_back(data[i]);
    }
    Model model = trainer(train);
    for (std::size_t i : held)
      ++confusion[data[i].label][predict(model, data[i].vector).label];
  }
  return detail::metrics_from_confusion(confusion);
}

// ---- persistence ----------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json tree_node_to_json(const DecisionTreeModel& m, int idx) {
  const TreeNode& node = m.nodes[idx];
  nlohmann::ordered_json j;
  if (node.is_leaf()) {
    j["label"] = node.label;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [label, c] : node.counts) counts[label] = c;
    j["counts"] = counts;
  } else {
    j["feature"] = node.feature;
    j["absent"] = tree_node_to_json(m, node.absent);
    j["present"] = tree_node_to_json(m, node.present);
  }
  return j;
}

inline int tree_node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes) {
  int self = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("feature")) {
    nodes[self].feature = j.at("feature").get<std::string>();
    int a = tree_node_from_json(j.at("absent"), nodes);
    int b = tree_node_from_json(j.at("present"), nodes);
    nodes[self].absent = a;
    nodes[self].present = b;
  } else {
    nodes[self].label = j.at("label").get<std::string>();
    for (const auto& [label, c] : j.at("counts").items())
      nodes[self].counts[label] = c.get<long>();
  }
  return self;
}

inline nlohmann::ordered_json weights_to_json(const std::map<std::string, double>& w) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [id, v] : w) j[id] = v;
  return j;
}

constexpr int kModelSchemaVersion = 1;

}  // namespace detail

inline std::string model_to_json(const Model& model) {
  nlohmann::ordered_json j;
  j["schema_version"] = detail::kModelSchemaVersion;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        nlohmann::ordered_json params;
        if constexpr (std::is_same_v<T, PerceptronModel>) {
          j["kind"] = "perceptron";
          params["bias"] = m.bias;
          params["weights"] = detail::weights_to_json(m.weights);
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          j["kind"] = "svm";
          params["lambda"] = m.lambda;
          params["bias"] = m.bias;
          params["weights"] = detail::weights_to_json(m.weights);
        } else {
          j["kind"] = "tree";
          params["min_leaf"] = m.min_leaf;
          params["root"] = detail::tree_node_to_json(m, 0);
        }
        j["labels"] = {{"negative", m.negative_label}, {"positive", m.positive_label}};
        j["feature_config"] = to_json(m.config);
        j["parameters"] = params;
      },
      model);
  return j.dump(2);
}

inline Model model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != detail::kModelSchemaVersion)
      throw persistence_error("unsupported model schema version");
    std::string kind = j.at("kind").get<std::string>();
    std::string neg = j.at("labels").at("negative").get<std::string>();
    std::string pos = j.at("labels").at("positive").get<std::string>();
    FeatureConfig config = feature_config_from_json(j.at("feature_config"));
    const auto& params = j.at("parameters");
    if (kind == "perceptron" || kind == "svm") {
      std::map<std::string, double> weights;
      for (const auto& [id, w] : params.at("weights").items())
        weights[id] = w.get<double>();
      double bias = params.at("bias").get<double>();
      if (kind == "perceptron") {
        PerceptronModel m;
        m.weights = std::move(weights);
        m.bias = bias;
        m.negative_label = neg;
        m.positive_label = pos;
        m.config = config;
        return m;
      }
      SvmModel m;
      m.weights = std::move(weights);
      m.bias = bias;
      m.lambda = params.at("lambda").get<double>();
      m.negative_label = neg;
      m.positive_label = pos;
      m.config = config;
      return m;
    }
    if (kind == "tree") {
      DecisionTreeModel m;
      detail::tree_node_from_json(params.at("root"), m.nodes);
      m.min_leaf = params.at("min_leaf").get<long>();
      m.negative_label = neg;
      m.positive_label = pos;
      m.config = config;
      return m;
    }
    throw persistence_error("unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw persistence_error(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open file for writing: " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw io_error("cannot write file: " + path.string());
}

inline Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return model_from_json(content);
}

// ---- reporting ------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["macro"] = {{"precision", m.macro_precision},
                {"recall", m.macro_recall},
                {"f1", m.macro_f1}};
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [label, cm] : m.per_class)
    per[label] = {{"precision", cm.precision},
                  {"recall", cm.recall},
                  {"f1", cm.f1},
                  {"tp", cm.tp},
                  {"fp", cm.fp},
                  {"fn", cm.fn}};
  j["per_class"] = per;
  nlohmann::ordered_json conf = nlohmann::ordered_json::object();
  for (const auto& [gold, row] : m.confusion) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [pred, c] : row) r[pred] = c;
    conf[gold] = r;
  }
  j["confusion"] = conf;
  return j;
}

/// Aligned TASK / PRECISION / RECALL table with one macro row per task and
/// indented per-class rows.
inline std::string metrics_table(const Metrics& m, const std::string& task) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-28s %-11s %-11s %s\n", "TASK", "PRECISION",
                "RECALL", "F1");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-28s %-11.1f %-11.1f %.1f\n", task.c_str(),
                m.macro_precision * 100.0, m.macro_recall * 100.0,
                m.macro_f1 * 100.0);
  out += buf;
  for (const auto& [label, cm] : m.per_class) {
    std::snprintf(buf, sizeof buf, "  %-26s %-11.1f %-11.1f %.1f\n",
                  label.c_str(), cm.precision * 100.0, cm.recall * 100.0,
                  cm.f1 * 100.0);
    out += buf;
  }
  return out;
}

}  // namespace textmine
