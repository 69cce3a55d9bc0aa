#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textmine/classify.hpp"
#include "textmine/corpus.hpp"
#include "textmine/errors.hpp"
#include "textmine/features.hpp"
#include "textmine/keywords.hpp"
#include "textmine/lexicon.hpp"

namespace textmine {

// ---- word trees -------------------------------------------------------------

struct WordTreeNode {
  std::string token;
  long count = 0;
  std::vector<WordTreeNode> children;
};

enum class TreeDirection { right, left };

namespace detail {

inline bool is_sentence_boundary(std::string_view surface) {
  if (surface.empty()) return false;
  for (char ch : surface)
    if (ch != '.' && ch != '!' && ch != '?') return false;
  return true;
}

inline void build_word_tree_level(WordTreeNode& node,
                                  std::vector<std::vector<std::string>*> contexts,
                                  std::size_t depth, std::size_t max_depth,
                                  long min_count) {
  if (depth >= max_depth) return;
  std::map<std::string, std::vector<std::vector<std::string>*>> groups;
  for (auto* ctx : contexts)
    if (ctx->size() > depth) groups[(*ctx)[depth]].push_back(ctx);
  for (auto& [token, members] : groups) {
    if (static_cast<long>(members.size()) < min_count) continue;
    WordTreeNode child;
    child.token = token;
    child.count = static_cast<long>(members.size());
    build_word_tree_level(child, std::move(members), depth + 1, max_depth, min_count);
    node.children.push_back(std::move(child));
  }
  std::stable_sort(node.children.begin(), node.children.end(),
                   [](const WordTreeNode& a, const WordTreeNode& b) {
                     if (a.count != b.count) return a.count > b.count;
                     return a.token < b.token;
                   });
}

}  // namespace detail

/// Word tree rooted at a keyword: each level is the next token to the right
/// (or previous to the left), never crossing sentence boundaries. Node
/// counts are occurrence counts of the path; children below min_count are
/// pruned. An absent keyword yields a count-0 root.
inline WordTreeNode word_tree(const Corpus& corpus, const std::string& keyword,
                              TreeDirection direction = TreeDirection::right,
                              std::size_t max_depth = 3, long min_count = 1) {
  if (max_depth < 1) throw parameter_error("word_tree: max_depth must be >= 1");
  if (min_count < 1) throw parameter_error("word_tree: min_count must be >= 1");
  if (keyword.empty()) throw parameter_error("word_tree: empty keyword");
  if (corpus.empty()) throw dataset_error("word_tree: corpus is empty");

  std::string folded = detail::fold_case(keyword);
  std::vector<std::vector<std::string>> contexts;
  for (const auto& doc : corpus.documents) {
    auto tokens = tokenize(doc.text);
    // sentence spans: [start, end) between boundary tokens
    std::vector<std::pair<std::size_t, std::size_t>> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= tokens.size(); ++i) {
      bool boundary = i == tokens.size() ||
                      detail::is_sentence_boundary(tokens[i].surface);
      if (boundary) {
        if (i > start) sentences.emplace_back(start, i);
        start = i + 1;
      }
    }
    for (const auto& [s, e] : sentences) {
      for (std::size_t i = s; i < e; ++i) {
        if (tokens[i].surface != folded) continue;
        std::vector<std::string> ctx;
        if (direction == TreeDirection::right) {
          for (std::size_t j = i + 1; j < e && ctx.size() < max_depth; ++j)
            ctx.push_back(tokens[j].surface);
        } else {
          for (std::size_t j = i; j > s && ctx.size() < max_depth; --j)
            ctx.push_back(tokens[j - 1].surface);
        }
        contexts.push_back(std::move(ctx));
      }
    }
  }

  WordTreeNode root;
  root.token = folded;
  root.count = static_cast<long>(contexts.size());
  std::vector<std::vector<std::string>*> refs;
  refs.reserve(contexts.size());
  for (auto& ctx : contexts) refs.push_back(&ctx);
  detail::build_word_tree_level(root, std::move(refs), 0, max_depth, min_count);
  return root;
}

inline nlohmann::ordered_json word_tree_json(const WordTreeNode& node) {
  nlohmann::ordered_json j;
  j["token"] = node.token;
  j["count"] = node.count;
  nlohmann::ordered_json children = nlohmann::ordered_json::array();
  for (const auto& child : node.children) children.push_back(word_tree_json(child));
  j["children"] = children;
  return j;
}

// ---- decision-tree export ---------------------------------------------------

enum class ExportFormat { dot, json };

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

inline int dot_visit(const DecisionTreeModel& m, int idx, int& next_id,
                     std::vector<std::string>& nodes,
                     std::vector<std::string>& edges) {
  const TreeNode& node = m.nodes[idx];
  int self = next_id++;
  if (node.is_leaf()) {
    long total = 0;
    for (const auto& [label, c] : node.counts) total += c;
    nodes.push_back("  n" + std::to_string(self) + " [label=\"" +
                    dot_escape(node.label) + " (" + std::to_string(total) +
                    ")\"];");
    return self;
  }
  nodes.push_back("  n" + std::to_string(self) + " [label=\"" +
                  dot_escape(node.feature) + "\"];");
  int a = dot_visit(m, node.absent, next_id, nodes, edges);
  int b = dot_visit(m, node.present, next_id, nodes, edges);
  edges.push_back("  n" + std::to_string(self) + " -> n" + std::to_string(a) +
                  " [label=\"absent\"];");
  edges.push_back("  n" + std::to_string(self) + " -> n" + std::to_string(b) +
                  " [label=\"present\"];");
  return self;
}

}  // namespace detail

/// Renders a decision-tree model as Graphviz DOT or nested JSON. Other model
/// kinds have no tree to export.
inline std::string export_tree(const Model& model, ExportFormat format) {
  const auto* tree = std::get_if<DecisionTreeModel>(&model);
  if (!tree) throw parameter_error("export_tree: model is not a decision tree");
  if (format == ExportFormat::json)
    return detail::tree_node_to_json(*tree, 0).dump(2);

  std::vector<std::string> nodes, edges;
  int next_id = 0;
  detail::dot_visit(*tree, 0, next_id, nodes, edges);
  std::string out = "digraph decision_tree {\n  node [shape=box];\n";
  for (const auto& line : nodes) out += line + "\n";
  for (const auto& line : edges) out += line + "\n";
  out += "}\n";
  return out;
}

// ---- summary report ---------------------------------------------------------

struct ReportOptions {
  const Corpus* reference = nullptr;           // enables top_keywords
  const SentimentLexicon* sentiment = nullptr; // enables mean_polarity
  NegativityConfig negativity = {};
  KeywordOptions keywords = {};
  int top_keywords = 20;
};

/// One JSON object summarizing a corpus: size counts, label distribution,
/// monthly timeline, optional keyword and polarity sections, negativity
/// markers averaged over documents.
inline nlohmann::ordered_json summary_report(const Corpus& corpus,
                                             const ReportOptions& options = {}) {
  if (corpus.empty()) throw dataset_error("summary_report: corpus is empty");
  if (options.top_keywords < 1)
    throw parameter_error("summary_report: top_keywords must be >= 1");

  nlohmann::ordered_json report;

  long token_total = 0;
  std::set<std::string> types;
  for (const auto& doc : corpus.documents) {
    for (const auto& t : tokenize(doc.text)) {
      ++token_total;
      types.insert(t.surface);
    }
  }
  report["counts"] = {{"documents", corpus.size()},
                      {"tokens", token_total},
                      {"types", types.size()}};

  std::map<std::string, long> labels;
  for (const auto& doc : corpus.documents)
    if (doc.label) ++labels[*doc.label];
  nlohmann::ordered_json dist = nlohmann::ordered_json::object();
  for (const auto& [label, count] : labels) dist[label] = count;
  report["label_distribution"] = dist;

  report["timeline"] = to_json(monthly_timeline(corpus));

  if (options.reference) {
    auto stats = extract_keywords(corpus, *options.reference, options.keywords);
    nlohmann::ordered_json top = nlohmann::ordered_json::array();
    for (const auto& s : stats) {
      if (top.size() >= static_cast<std::size_t>(options.top_keywords)) break;
      top.push_back({{"word", s.word},
                     {"chi2", s.chi2},
                     {"count_a", s.count_a},
                     {"count_b", s.count_b},
                     {"significant", s.significant}});
    }
    report["top_keywords"] = top;
  }

  if (options.sentiment) {
    double sum = 0.0;
    for (const auto& doc : corpus.documents)
      sum += polarity(doc.text, *options.sentiment).score;
    report["mean_polarity"] = sum / static_cast<double>(corpus.size());
  }

  double caps = 0.0, bangs = 0.0;
  long emoji = 0;
  for (const auto& doc : corpus.documents) {
    auto m = negativity_markers(doc.text, options.negativity);
    caps += m.allcaps_ratio;
    bangs += m.exclamation_density;
    emoji += m.angry_emoji_count;
  }
  report["negativity"] = {
      {"mean_allcaps_ratio", caps / static_cast<double>(corpus.size())},
      {"mean_exclamation_density", bangs / static_cast<double>(corpus.size())},
      {"angry_emoji_count", emoji}};

  return report;
}

}  // namespace textmine
