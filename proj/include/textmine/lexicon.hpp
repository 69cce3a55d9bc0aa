#pragma once

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textmine/corpus.hpp"
#include "textmine/detail/utf8.hpp"
#include "textmine/errors.hpp"
#include "textmine/features.hpp"

namespace textmine {

namespace detail {

// Splits lexicon TSV content into (line_number, fields) records, skipping
// blank lines and # comments.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>>
parse_tsv(std::string_view content) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;
  std::size_t line_no = 0, pos = 0;
  while (pos <= content.size()) {
    if (pos == content.size()) break;
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        fields.emplace_back(line.substr(start));
        break;
      }
      fields.emplace_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    records.emplace_back(line_no, std::move(fields));
  }
  return records;
}

// Validates a lexicon entry and strips a trailing '*'; returns (key, is_prefix).
inline std::pair<std::string, bool> lexicon_key(const std::string& entry,
                                                std::size_t line_no) {
  if (entry.empty())
    throw format_error("lexicon line " + std::to_string(line_no) + ": empty entry");
  std::string folded = fold_case(entry);
  if (folded.back() == '*') {
    std::string stem = folded.substr(0, folded.size() - 1);
    if (cp_count(stem) < 3)
      throw format_error("lexicon line " + std::to_string(line_no) +
                         ": prefix stem '" + stem + "' shorter than 3 characters");
    return {stem, true};
  }
  return {folded, false};
}

}  // namespace detail

/// Word and prefix entries with polarity scores in [-1, 1]. An entry ending
/// in '*' matches every token that starts with its stem; an exact entry
/// beats any prefix, and among prefixes the longest stem wins.
class SentimentLexicon {
 public:
  SentimentLexicon() = default;

  static SentimentLexicon from_string(std::string_view content) {
    SentimentLexicon lex;
    for (const auto& [line_no, fields] : detail::parse_tsv(content)) {
      if (fields.size() != 2)
        throw format_error("sentiment lexicon line " + std::to_string(line_no) +
                           ": expected 2 tab-separated fields, got " +
                           std::to_string(fields.size()));
      double score = 0.0;
      const char* first = fields[1].data();
      const char* last = first + fields[1].size();
      auto [end, ec] = std::from_chars(first, last, score);
      if (ec != std::errc{} || end != last)
        throw format_error("sentiment lexicon line " + std::to_string(line_no) +
                           ": cannot parse score '" + fields[1] + "'");
      lex.add(fields[0], score, line_no);
    }
    return lex;
  }

  static SentimentLexicon from_tsv(const std::filesystem::path& path) {
    return from_string(detail::read_file(path));
  }

  void add(const std::string& entry, double score, std::size_t line_no = 0) {
    if (!(score >= -1.0 && score <= 1.0))
      throw format_error("sentiment lexicon line " + std::to_string(line_no) +
                         ": score " + std::to_string(score) +
                         " outside [-1, 1]");
    auto [key, is_prefix] = detail::lexicon_key(entry, line_no);
    (is_prefix ? prefix_ : exact_)[key] = score;
  }

  void remove(const std::string& entry) {
    auto [key, is_prefix] = detail::lexicon_key(entry, 0);
    (is_prefix ? prefix_ : exact_).erase(key);
  }

  std::optional<double> match(std::string_view token) const {
    std::string folded = detail::fold_case(token);
    auto it = exact_.find(folded);
    if (it != exact_.end()) return it->second;
    for (std::size_t len = folded.size(); len >= 3; --len) {
      auto pit = prefix_.find(folded.substr(0, len));
      if (pit != prefix_.end()) return pit->second;
    }
    return std::nullopt;
  }

  std::size_t size() const { return exact_.size() + prefix_.size(); }

 private:
  std::map<std::string, double> exact_;
  std::map<std::string, double> prefix_;  // keyed by stem, '*' stripped
};

/// Word and prefix entries tagged with one or more categories; same match
/// rules as SentimentLexicon.
class CategoryLexicon {
 public:
  struct Match {
    std::string entry;  // lexicon entry as written, '*' and all
    std::vector<std::string> categories;
  };

  CategoryLexicon() = default;

  static CategoryLexicon from_string(std::string_view content) {
    CategoryLexicon lex;
    for (const auto& [line_no, fields] : detail::parse_tsv(content)) {
      if (fields.size() != 2)
        throw format_error("category lexicon line " + std::to_string(line_no) +
                           ": expected 2 tab-separated fields, got " +
                           std::to_string(fields.size()));
      std::vector<std::string> cats;
      std::size_t start = 0;
      const std::string& list = fields[1];
      while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        std::string cat = comma == std::string::npos
                              ? list.substr(start)
                              : list.substr(start, comma - start);
        if (!cat.empty()) cats.push_back(std::move(cat));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (cats.empty())
        throw format_error("category lexicon line " + std::to_string(line_no) +
                           ": no categories");
      lex.add(fields[0], cats, line_no);
    }
    return lex;
  }

  static CategoryLexicon from_tsv(const std::filesystem::path& path) {
    return from_string(detail::read_file(path));
  }

  void add(const std::string& entry, std::vector<std::string> categories,
           std::size_t line_no = 0) {
    if (categories.empty())
      throw format_error("category lexicon line " + std::to_string(line_no) +
                         ": no categories");
    auto [key, is_prefix] = detail::lexicon_key(entry, line_no);
    Entry e{detail::fold_case(entry), std::move(categories)};
    (is_prefix ? prefix_ : exact_)[key] = std::move(e);
  }

  void remove(const std::string& entry) {
    auto [key, is_prefix] = detail::lexicon_key(entry, 0);
    (is_prefix ? prefix_ : exact_).erase(key);
  }

  std::optional<Match> match(std::string_view token) const {
    std::string folded = detail::fold_case(token);
    auto it = exact_.find(folded);
    if (it != exact_.end()) return Match{it->second.display, it->second.categories};
    for (std::size_t len = folded.size(); len >= 3; --len) {
      auto pit = prefix_.find(folded.substr(0, len));
      if (pit != prefix_.end())
        return Match{pit->second.display, pit->second.categories};
    }
    return std::nullopt;
  }

  /// Sorted list of every category named by any entry.
  std::vector<std::string> categories() const {
    std::set<std::string> all;
    for (const auto& [key, e] : exact_)
      all.insert(e.categories.begin(), e.categories.end());
    for (const auto& [key, e] : prefix_)
      all.insert(e.categories.begin(), e.categories.end());
    return {all.begin(), all.end()};
  }

  std::size_t size() const { return exact_.size() + prefix_.size(); }

 private:
  struct Entry {
    std::string display;
    std::vector<std::string> categories;
  };
  std::map<std::string, Entry> exact_;
  std::map<std::string, Entry> prefix_;
};

// ---- polarity ---------------------------------------------------------------

struct PolarityResult {
  double score = 0.0;  // sum of matched scores over the total token count
  std::vector<std::pair<std::string, double>> matches;  // token, score, in order
};

inline PolarityResult polarity(std::string_view text, const SentimentLexicon& lexicon) {
  PolarityResult result;
  auto tokens = tokenize(text);
  if (tokens.empty()) return result;
  double sum = 0.0;
  for (const auto& t : tokens) {
    auto hit = lexicon.match(t.surface);
    if (!hit) continue;
    sum += *hit;
    result.matches.emplace_back(t.surface, *hit);
  }
  result.score = sum / static_cast<double>(tokens.size());
  return result;
}

/// Per-category rate: tokens matching an entry carrying the category,
/// divided by the total token count. Categories with no hits are omitted.
inline std::map<std::string, double> category_profile(std::string_view text,
                                                      const CategoryLexicon& lexicon) {
  std::map<std::string, double> profile;
  auto tokens = tokenize(text);
  if (tokens.empty()) return profile;
  std::map<std::string, long> hits;
  for (const auto& t : tokens) {
    auto hit = lexicon.match(t.surface);
    if (!hit) continue;
    std::set<std::string> cats(hit->categories.begin(), hit->categories.end());
    for (const auto& c : cats) ++hits[c];
  }
  for (const auto& [cat, count] : hits)
    profile[cat] = static_cast<double>(count) / static_cast<double>(tokens.size());
  return profile;
}

// ---- negativity markers -----------------------------------------------------

struct NegativityConfig {
  // Default angry/hostile emoji set.
  std::vector<std::string> angry_emoji = {
      "\xF0\x9F\x98\xA0",  // U+1F620 angry face
      "\xF0\x9F\x98\xA1",  // U+1F621 pouting face
      "\xF0\x9F\xA4\xAC",  // U+1F92C face with symbols on mouth
      "\xF0\x9F\x98\xA4",  // U+1F624 face with steam from nose
      "\xF0\x9F\x92\xA2",  // U+1F4A2 anger symbol
      "\xF0\x9F\xA4\xAE",  // U+1F92E face vomiting
      "\xF0\x9F\xA4\xA2",  // U+1F922 nauseated face
      "\xF0\x9F\x91\x8A",  // U+1F44A oncoming fist
      "\xF0\x9F\x96\x95",  // U+1F595 middle finger
      "\xF0\x9F\x98\xBE",  // U+1F63E pouting cat
      "\xE2\x98\xA0",      // U+2620 skull and crossbones
      "\xF0\x9F\x92\x80",  // U+1F480 skull
  };

  static NegativityConfig from_file(const std::filesystem::path& path) {
    NegativityConfig config;
    config.angry_emoji.clear();
    std::string content = detail::read_file(path);
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
      std::size_t eol = content.find('\n', pos);
      if (eol == std::string::npos) eol = content.size();
      std::string line = content.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++line_no;
      pos = eol + 1;
      if (line.empty() || line.front() == '#') continue;
      config.angry_emoji.push_back(std::move(line));
    }
    if (config.angry_emoji.empty())
      throw format_error("emoji list " + path.string() + " has no entries");
    return config;
  }
};

struct NegativityMarkers {
  double allcaps_ratio = 0.0;
  double exclamation_density = 0.0;
  long angry_emoji_count = 0;
};

/// Shouting, exclamation, and hostile-emoji markers.
///  - allcaps_ratio: among purely alphabetic ASCII tokens of length >= 3,
///    the fraction written fully uppercase in the original text.
///  - exclamation_density: '!' characters per token that is not itself pure
///    punctuation-run of '!' (at least one, to avoid dividing by zero).
///  - angry_emoji_count: non-overlapping occurrences of configured emoji.
inline NegativityMarkers negativity_markers(std::string_view text,
                                            const NegativityConfig& config = {}) {
  NegativityMarkers m;
  auto tokens = tokenize(text);

  long eligible = 0, caps = 0, word_like = 0;
  for (const auto& t : tokens) {
    std::string_view original = text.substr(t.offset, t.surface.size());
    bool all_alpha = !original.empty();
    bool all_upper = true;
    for (char ch : original) {
      if (!detail::is_ascii_alpha(ch)) all_alpha = false;
      if (!(ch >= 'A' && ch <= 'Z')) all_upper = false;
    }
    if (all_alpha && original.size() >= 3) {
      ++eligible;
      if (all_upper) ++caps;
    }
    bool only_bangs = true;
    for (char ch : original)
      if (ch != '!') only_bangs = false;
    if (!only_bangs) ++word_like;
  }
  if (eligible > 0) m.allcaps_ratio = static_cast<double>(caps) / eligible;

  long bangs = 0;
  for (char ch : text)
    if (ch == '!') ++bangs;
  m.exclamation_density =
      static_cast<double>(bangs) / static_cast<double>(std::max<long>(1, word_like));

  for (const auto& emoji : config.angry_emoji) {
    if (emoji.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(emoji, pos)) != std::string_view::npos) {
      ++m.angry_emoji_count;
      pos += emoji.size();
    }
  }
  return m;
}

// ---- style profile ----------------------------------------------------------

struct StyleProfile {
  double pronoun_rate = 0.0;
  double determiner_rate = 0.0;
  double quantifier_rate = 0.0;
  long token_count = 0;
};

namespace detail {

inline const std::set<std::string>& pronoun_set() {
  static const std::set<std::string> s = {
      "i",    "me",   "my",    "mine",  "myself",   "we",    "us",
      "our",  "ours", "ourselves", "you",  "your",  "yours", "yourself",
      "yourselves", "he",   "him",  "his",   "himself", "she",   "her",
      "hers", "herself", "they", "them", "their", "theirs", "themselves"};
  return s;
}

inline const std::set<std::string>& determiner_set() {
  static const std::set<std::string> s = {"the",  "a",     "an", "this",
                                          "that", "these", "those"};
  return s;
}

inline const std::set<std::string>& quantifier_set() {
  static const std::set<std::string> s = {
      "few",  "most",    "many", "much",   "some", "all",
      "any",  "more",    "less", "least",  "several", "none",
      "enough", "plenty", "lots", "both",  "each", "every"};
  return s;
}

}  // namespace detail

/// Rates of personal pronouns, determiners, and quantifiers per token.
inline StyleProfile style_profile(std::string_view text) {
  StyleProfile p;
  auto tokens = tokenize(text);
  p.token_count = static_cast<long>(tokens.size());
  if (tokens.empty()) return p;
  long pron = 0, det = 0, quant = 0;
  for (const auto& t : tokens) {
    if (detail::pronoun_set().count(t.surface)) ++pron;
    if (detail::determiner_set().count(t.surface)) ++det;
    if (detail::quantifier_set().count(t.surface)) ++quant;
  }
  double n = static_cast<double>(tokens.size());
  p.pronoun_rate = pron / n;
  p.determiner_rate = det / n;
  p.quantifier_rate = quant / n;
  return p;
}

}  // namespace textmine
