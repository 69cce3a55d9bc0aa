#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "textmine/corpus.hpp"
#include "textmine/errors.hpp"
#include "textmine/features.hpp"
#include "textmine/lexicon.hpp"

namespace textmine {

/// Pearson chi-square for a 2x2 table, shortcut form
/// N(ad-bc)^2 / ((a+b)(c+d)(a+c)(b+d)).
inline double chi_square(long a, long b, long c, long d) {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw parameter_error("chi_square: cell counts must be non-negative");
  long row1 = a + b, row2 = c + d, col1 = a + c, col2 = b + d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0)
    throw parameter_error("chi_square: marginal totals must be positive");
  double n = static_cast<double>(a) + b + c + d;
  double det = static_cast<double>(a) * d - static_cast<double>(b) * c;
  return n * det * det / (static_cast<double>(row1) * row2 * col1 * col2);
}

/// Critical values of the chi-square distribution at 1 degree of freedom.
inline double chi2_critical(double alpha) {
  if (alpha == 0.05) return 3.841;
  if (alpha == 0.01) return 6.635;
  if (alpha == 0.001) return 10.828;
  throw parameter_error("chi2_critical: alpha must be one of 0.05, 0.01, 0.001");
}

/// Rate-normalized posterior that the word belongs to corpus A:
/// r_a / (r_a + r_b) with r_x = count_x / n_x.
inline double keyword_posterior(long count_a, long n_a, long count_b, long n_b) {
  if (n_a <= 0 || n_b <= 0)
    throw parameter_error("keyword_posterior: corpus sizes must be positive");
  if (count_a < 0 || count_b < 0)
    throw parameter_error("keyword_posterior: counts must be non-negative");
  if (count_a > n_a || count_b > n_b)
    throw parameter_error("keyword_posterior: counts cannot exceed corpus sizes");
  double ra = static_cast<double>(count_a) / n_a;
  double rb = static_cast<double>(count_b) / n_b;
  if (ra + rb == 0.0) return 0.5;
  return ra / (ra + rb);
}

enum class CountMode { document, occurrence };

struct KeywordStat {
  std::string word;
  long count_a = 0, count_b = 0;
  long n_a = 0, n_b = 0;
  double chi2 = 0.0;
  bool significant = false;
  double posterior = 0.5;
  std::string direction;  // "a" or "b"
};

struct KeywordOptions {
  long min_count = 5;  // combined count floor
  double alpha = 0.05;
  CountMode mode = CountMode::document;
};

namespace detail {

inline void accumulate_counts(const Corpus& corpus, CountMode mode,
                              std::map<std::string, long>& counts, long& total) {
  for (const auto& doc : corpus.documents) {
    auto tokens = tokenize(doc.text);
    if (mode == CountMode::occurrence) {
      for (const auto& t : tokens) {
        ++counts[t.surface];
        ++total;
      }
    } else {
      std::map<std::string, long> seen;
      for (const auto& t : tokens) seen[t.surface] = 1;
      for (const auto& [w, one] : seen) counts[w] += one;
      ++total;
    }
  }
}

}  // namespace detail

/// Distinctive vocabulary of corpus A against reference corpus B, ranked by
/// chi-square (descending, ties alphabetic).
inline std::vector<KeywordStat> extract_keywords(const Corpus& corpus_a,
                                                 const Corpus& corpus_b,
                                                 const KeywordOptions& options = {}) {
  if (corpus_a.empty() || corpus_b.empty())
    throw dataset_error("extract_keywords: both corpora must be non-empty");
  if (options.min_count < 1)
    throw parameter_error("extract_keywords: min_count must be >= 1");
  chi2_critical(options.alpha);  // validates alpha

  std::map<std::string, long> counts_a, counts_b;
  long n_a = 0, n_b = 0;
  detail::accumulate_counts(corpus_a, options.mode, counts_a, n_a);
  detail::accumulate_counts(corpus_b, options.mode, counts_b, n_b);
  if (n_a == 0 || n_b == 0)
    throw dataset_error("extract_keywords: a corpus produced no countable units");

  double critical = chi2_critical(options.alpha);
  std::vector<KeywordStat> stats;
  std::set<std::string> vocab;
  for (const auto& [w, c] : counts_a) vocab.insert(w);
  for (const auto& [w, c] : counts_b) vocab.insert(w);
  for (const auto& w : vocab) {
    auto ita = counts_a.find(w);
    auto itb = counts_b.find(w);
    long a = ita == counts_a.end() ? 0 : ita->second;
    long b = itb == counts_b.end() ? 0 : itb->second;
    if (a + b < options.min_count) continue;
    KeywordStat s;
    s.word = w;
    s.count_a = a;
    s.count_b = b;
    s.n_a = n_a;
    s.n_b = n_b;
    // the 2x2 table is (a, n_a - a / b, n_b - b); degenerate margins score 0
    long c = n_a - a, d = n_b - b;
    if ((a + b) > 0 && (c + d) > 0)
      s.chi2 = chi_square(a, c, b, d);
    s.significant = s.chi2 > critical;
    s.posterior = keyword_posterior(a, n_a, b, n_b);
    s.direction = s.posterior >= 0.5 ? "a" : "b";
    stats.push_back(std::move(s));
  }
  std::sort(stats.begin(), stats.end(), [](const KeywordStat& x, const KeywordStat& y) {
    if (x.chi2 != y.chi2) return x.chi2 > y.chi2;
    return x.word < y.word;
  });
  return stats;
}

inline std::string keywords_csv(const std::vector<KeywordStat>& stats) {
  std::string out = "word,count_a,count_b,chi2,significant,posterior,direction\n";
  char buf[64];
  for (const auto& s : stats) {
    bool quote = s.word.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out += '"';
      for (char ch : s.word) {
        out += ch;
        if (ch == '"') out += '"';
      }
      out += '"';
    } else {
      out += s.word;
    }
    out += ',';
    out += std::to_string(s.count_a);
    out += ',';
    out += std::to_string(s.count_b);
    std::snprintf(buf, sizeof buf, ",%.6f,", s.chi2);
    out += buf;
    out += s.significant ? "true" : "false";
    std::snprintf(buf, sizeof buf, ",%.6f,", s.posterior);
    out += buf;
    out += s.direction;
    out += '\n';
  }
  return out;
}

// ---- collocations ----------------------------------------------------------

struct Collocation {
  std::string left, right;
  long count = 0;
  double pmi = 0.0;
};

/// Adjacent-pair collocations ranked by pointwise mutual information
/// log2(p(x,y) / (p(x) p(y))); probabilities use the corpus token count
/// as the denominator for unigrams and bigrams alike.
inline std::vector<Collocation> collocations(const Corpus& corpus, long min_count = 5) {
  if (corpus.empty()) throw dataset_error("collocations: corpus is empty");
  if (min_count < 1) throw parameter_error("collocations: min_count must be >= 1");

  std::map<std::string, long> unigrams;
  std::map<std::pair<std::string, std::string>, long> bigrams;
  long total = 0;
  for (const auto& doc : corpus.documents) {
    auto tokens = tokenize(doc.text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      ++unigrams[tokens[i].surface];
      ++total;
      if (i + 1 < tokens.size())
        ++bigrams[{tokens[i].surface, tokens[i + 1].surface}];
    }
  }
  if (total == 0) throw dataset_error("collocations: corpus has no tokens");

  std::vector<Collocation> out;
  double n = static_cast<double>(total);
  for (const auto& [pair, count] : bigrams) {
    if (count < min_count) continue;
    Collocation c;
    c.left = pair.first;
    c.right = pair.second;
    c.count = count;
    double pxy = static_cast<double>(count) / n;
    double px = static_cast<double>(unigrams[pair.first]) / n;
    double py = static_cast<double>(unigrams[pair.second]) / n;
    c.pmi = std::log2(pxy / (px * py));
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Collocation& x, const Collocation& y) {
    if (x.pmi != y.pmi) return x.pmi > y.pmi;
    if (x.left != y.left) return x.left < y.left;
    return x.right < y.right;
  });
  return out;
}

// ---- highlighting ----------------------------------------------------------

struct HighlightSpan {
  std::size_t start = 0, end = 0;  // byte offsets, half-open
  std::string matched_entry;
  std::string category;  // comma-joined category list
};

/// Full-token lexicon matches, in text order; spans index bytes of the
/// original text.
inline std::vector<HighlightSpan> highlight(std::string_view text,
                                            const CategoryLexicon& lexicon) {
  std::vector<HighlightSpan> spans;
  for (const auto& token : tokenize(text)) {
    auto hit = lexicon.match(token.surface);
    if (!hit) continue;
    HighlightSpan span;
    span.start = token.offset;
    span.end = token.offset + token.surface.size();
    span.matched_entry = hit->entry;
    std::string cats;
    for (const auto& c : hit->categories) {
      if (!cats.empty()) cats += ',';
      cats += c;
    }
    span.category = std::move(cats);
    spans.push_back(std::move(span));
  }
  return spans;
}

}  // namespace textmine
