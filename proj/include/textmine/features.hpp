#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textmine/detail/utf8.hpp"
#include "textmine/errors.hpp"

namespace textmine {

/// One tokenizer output unit. `surface` is case-folded; `offset` is the
/// byte offset of the token in the original text. Folding preserves byte
/// length, so `text.substr(offset, surface.size())` recovers the original
/// spelling.
struct Token {
  std::string surface;
  std::size_t offset = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Feature-id -> weight map. Ids carry a namespace prefix ("c3:", "w1:", ...)
/// so grams from different families never collide. Zero weights are never
/// stored.
struct SparseVector {
  std::map<std::string, double> entries;

  bool contains(const std::string& id) const { return entries.count(id) > 0; }
  double at(const std::string& id) const {
    auto it = entries.find(id);
    return it == entries.end() ? 0.0 : it->second;
  }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

enum class Weighting { count, binary };

struct FeatureConfig {
  std::set<int> char_ngrams{1, 2, 3};  // subset of {1,2,3}
  std::set<int> word_ngrams{1, 2};     // subset of {1,2}
  Weighting weighting = Weighting::count;

  bool valid() const {
    if (char_ngrams.empty() && word_ngrams.empty()) return false;
    for (int n : char_ngrams)
      if (n < 1 || n > 3) return false;
    for (int n : word_ngrams)
      if (n < 1 || n > 2) return false;
    return true;
  }
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// Lowercases and splits on whitespace; leading/trailing punctuation runs
/// become their own tokens; internal apostrophes and hyphens stay put.
/// @-mentions and #hashtags keep their sigil, URLs survive as one token.
inline std::vector<Token> tokenize(std::string_view text) {
  using namespace detail;
  std::vector<Token> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    if (begin < end)
      out.push_back({fold_case(text.substr(begin, end - begin)), begin});
  };
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_ascii_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t s = i;
    while (i < n && !is_ascii_space(text[i])) ++i;
    std::size_t e = i;

    bool sigil = (text[s] == '@' || text[s] == '#') && s + 1 < e &&
                 !is_ascii_punct(text[s + 1]);
    std::size_t core = s;
    if (!sigil)
      while (core < e && is_ascii_punct(text[core])) ++core;
    if (core == e) {  // chunk is one punctuation run
      emit(s, e);
      continue;
    }
    emit(s, core);  // leading run, if any
    std::size_t tail = e;
    while (tail > core && is_ascii_punct(text[tail - 1])) --tail;
    emit(core, tail);
    emit(tail, e);  // trailing run, if any
  }
  return out;
}

/// Word counts over token surfaces.
inline std::map<std::string, long> wc(const std::vector<Token>& tokens) {
  std::map<std::string, long> counts;
  for (const auto& t : tokens) ++counts[t.surface];
  return counts;
}

/// Contiguous length-n code point substrings of one token surface. Grams
/// never cross token boundaries; surfaces shorter than n yield nothing.
inline std::map<std::string, long> char_ngrams(std::string_view surface, int n) {
  if (n < 1) throw parameter_error("char_ngrams: n must be >= 1");
  std::map<std::string, long> grams;
  auto offs = detail::cp_offsets(surface);
  std::size_t cps = offs.size() - 1;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= cps; ++i) {
    std::size_t b = offs[i];
    std::size_t e = offs[i + static_cast<std::size_t>(n)];
    ++grams[std::string(surface.substr(b, e - b))];
  }
  return grams;
}

inline std::map<std::string, long> char_ngrams(const Token& token, int n) {
  return char_ngrams(std::string_view(token.surface), n);
}

/// Maps text to the union of all enabled n-gram namespaces. Word bigrams
/// join adjacent surfaces with a single space.
inline SparseVector vectorize(std::string_view text, const FeatureConfig& config) {
  if (!config.valid())
    throw parameter_error("vectorize: config must enable at least one n-gram family");
  auto tokens = tokenize(text);
  SparseVector v;
  for (int n : config.char_ngrams) {
    std::string ns = "c" + std::to_string(n) + ":";
    for (const auto& t : tokens)
      for (const auto& [gram, count] : char_ngrams(t, n))
        v.entries[ns + gram] += static_cast<double>(count);
  }
  for (int n : config.word_ngrams) {
    std::string ns = "w" + std::to_string(n) + ":";
    if (n == 1) {
      for (const auto& t : tokens) v.entries[ns + t.surface] += 1.0;
    } else {
      for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        v.entries[ns + tokens[i].surface + " " + tokens[i + 1].surface] += 1.0;
    }
  }
  if (config.weighting == Weighting::binary)
    for (auto& [id, w] : v.entries) w = 1.0;
  return v;
}

inline nlohmann::ordered_json to_json(const SparseVector& v) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [id, w] : v.entries) j[id] = w;
  return j;
}

inline nlohmann::ordered_json to_json(const FeatureConfig& c) {
  nlohmann::ordered_json j;
  j["char_ngrams"] = c.char_ngrams;
  j["word_ngrams"] = c.word_ngrams;
  j["weighting"] = c.weighting == Weighting::count ? "count" : "binary";
  return j;
}

inline FeatureConfig feature_config_from_json(const nlohmann::json& j) {
  FeatureConfig c;
  c.char_ngrams.clear();
  c.word_ngrams.clear();
  for (const auto& n : j.at("char_ngrams")) c.char_ngrams.insert(n.get<int>());
  for (const auto& n : j.at("word_ngrams")) c.word_ngrams.insert(n.get<int>());
  std::string w = j.at("weighting").get<std::string>();
  if (w == "count")
    c.weighting = Weighting::count;
  else if (w == "binary")
    c.weighting = Weighting::binary;
  else
    throw data_error("feature config: unknown weighting '" + w + "'");
  return c;
}

}  // namespace textmine
