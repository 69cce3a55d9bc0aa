#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textmine/corpus.hpp"  // detail::read_file
#include "textmine/detail/random.hpp"
#include "textmine/errors.hpp"

namespace textmine {

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;
  long duplicates = 0;  // duplicate input rows, resolved last-wins

  bool contains(const std::string& word) const { return vectors.count(word) > 0; }

  const std::vector<double>& at(const std::string& word) const {
    auto it = vectors.find(word);
    if (it == vectors.end())
      throw lookup_error("word '" + word + "' not in embedding table");
    return it->second;
  }

  std::size_t size() const { return vectors.size(); }
};

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = first + s.size();
  auto [end, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && end == last;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace detail

/// Reads word2vec/GloVe text format: optional "count dim" header line, then
/// one word and its components per line. Duplicate words resolve last-wins
/// and are tallied in EmbeddingTable::duplicates.
inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::string content = detail::read_file(path);
  EmbeddingTable table;
  std::size_t pos = 0, line_no = 0;
  bool first_data_line = true;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = eol + 1;
    if (line.empty()) continue;

    auto fields = detail::split_ws(line);
    if (first_data_line && fields.size() == 2) {
      // a "count dimension" header: both fields numeric
      double a = 0.0, b = 0.0;
      if (detail::parse_double(fields[0], a) && detail::parse_double(fields[1], b)) {
        first_data_line = false;
        continue;
      }
    }
    first_data_line = false;
    if (fields.size() < 2)
      throw format_error("embeddings line " + std::to_string(line_no) +
                         ": expected a word and at least one component");
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_double(fields[i], v))
        throw format_error("embeddings line " + std::to_string(line_no) +
                           ": component '" + std::string(fields[i]) +
                           "' is not a number");
      vec.push_back(v);
    }
    if (table.dimension == 0) {
      table.dimension = vec.size();
    } else if (vec.size() != table.dimension) {
      throw format_error("embeddings line " + std::to_string(line_no) + ": got " +
                         std::to_string(vec.size()) + " components, expected " +
                         std::to_string(table.dimension));
    }
    std::string word(fields[0]);
    if (table.vectors.count(word)) ++table.duplicates;
    table.vectors[word] = std::move(vec);
  }
  if (table.vectors.empty())
    throw format_error("embeddings file " + path.string() + " has no vectors");
  return table;
}

namespace detail {

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Cosine similarity, clamped to [-1, 1].
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw parameter_error("cosine: vectors have different dimensions");
  if (a.empty()) throw parameter_error("cosine: empty vectors");
  double na = detail::norm(a), nb = detail::norm(b);
  if (na == 0.0 || nb == 0.0)
    throw parameter_error("cosine: zero vector has no direction");
  double c = detail::dot(a, b) / (na * nb);
  return std::max(-1.0, std::min(1.0, c));
}

/// The k nearest neighbours of a word by cosine similarity, best first,
/// ties broken alphabetically. Zero-norm candidates are skipped.
inline std::vector<std::pair<std::string, double>> nearest(
    const EmbeddingTable& table, const std::string& word, int k) {
  if (k < 1) throw parameter_error("nearest: k must be >= 1");
  const auto& query = table.at(word);  // lookup_error if absent
  if (detail::norm(query) == 0.0)
    throw parameter_error("nearest: query word '" + word + "' has a zero vector");
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [w, v] : table.vectors) {
    if (w == word) continue;
    if (detail::norm(v) == 0.0) continue;
    scored.emplace_back(w, cosine(query, v));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(k);
  return scored;
}

struct ExpansionResult {
  std::vector<std::string> words;    // expansion words (seeds excluded), sorted
  std::vector<std::string> skipped;  // seeds missing from the table, input order
};

/// One-pass dictionary expansion: the union over seeds of each seed's k
/// nearest neighbours at or above the similarity threshold, minus the seeds
/// themselves. Seeds missing from the table are skipped and reported; an
/// empty seed set expands to nothing.
inline ExpansionResult expand_dictionary(const EmbeddingTable& table,
                                         const std::vector<std::string>& seeds,
                                         int k, double threshold) {
  if (k < 1) throw parameter_error("expand_dictionary: k must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw parameter_error("expand_dictionary: threshold must be in (0, 1]");

  ExpansionResult result;
  std::set<std::string> words, missing;
  for (const auto& seed : seeds) {
    if (!table.contains(seed)) {
      if (missing.insert(seed).second) result.skipped.push_back(seed);
      continue;
    }
    for (const auto& [w, sim] : nearest(table, seed, k))
      if (sim >= threshold) words.insert(w);
  }
  for (const auto& seed : seeds) words.erase(seed);
  result.words.assign(words.begin(), words.end());
  return result;
}

// ---- spherical k-means ------------------------------------------------------

struct KmeansResult {
  std::vector<std::string> words;
  std::vector<int> assignment;                 // parallel to words
  std::vector<std::vector<double>> centroids;  // unit length
  std::vector<double> objective_history;       // sum of cosines, one per iteration
  int iterations = 0;
  bool converged = false;
};

/// Spherical k-means: points and centroids live on the unit sphere and the
/// objective is the summed cosine to the assigned centroid (non-decreasing
/// over iterations). Seeding follows the k-means++ idea with squared
/// (1 - best cosine) weights.
inline KmeansResult spherical_kmeans(const EmbeddingTable& table, int k,
                                     std::uint32_t seed = 0, int max_iters = 50) {
  if (k < 1) throw parameter_error("spherical_kmeans: k must be >= 1");
  if (max_iters < 1) throw parameter_error("spherical_kmeans: max_iters must be >= 1");
  const std::size_t n = table.vectors.size();
  if (n < static_cast<std::size_t>(k))
    throw parameter_error("spherical_kmeans: " + std::to_string(n) +
                          " vectors cannot form " + std::to_string(k) + " clusters");

  KmeansResult result;
  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& [w, v] : table.vectors) {
    double nv = detail::norm(v);
    if (nv == 0.0)
      throw parameter_error("spherical_kmeans: word '" + w + "' has a zero vector");
    std::vector<double> unit(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) unit[i] = v[i] / nv;
    result.words.push_back(w);
    points.push_back(std::move(unit));
  }

  // seeding
  auto rng = detail::make_rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<bool> is_chosen(n, false);
  std::size_t first = detail::next_index(rng, n);
  chosen.push_back(first);
  is_chosen[first] = true;
  std::vector<double> best_cos(n, -1.0);
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const auto& latest = points[chosen.back()];
    for (std::size_t i = 0; i < n; ++i)
      best_cos[i] = std::max(best_cos[i], detail::dot(points[i], latest));
    std::vector<double> weight(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_chosen[i]) continue;
      double d = 1.0 - best_cos[i];
      weight[i] = d * d;
      total += weight[i];
    }
    std::size_t pick = n;
    if (total > 1e-15) {
      double r = detail::next_double(rng) * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (weight[i] <= 0.0) continue;
        cum += weight[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
    }
    if (pick == n) {  // all remaining points coincide with the chosen set
      for (std::size_t i = 0; i < n; ++i)
        if (!is_chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen.push_back(pick);
    is_chosen[pick] = true;
  }
  result.centroids.reserve(k);
  for (std::size_t c : chosen) result.centroids.push_back(points[c]);

  // Lloyd iterations on the sphere
  result.assignment.assign(n, -1);
  const std::size_t dim = points[0].size();
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_sim = detail::dot(points[i], result.centroids[0]);
      for (int c = 1; c < k; ++c) {
        double sim = detail::dot(points[i], result.centroids[c]);
        if (sim > best_sim) {  // ties keep the lower index
          best_sim = sim;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
      objective += best_sim;
    }
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }
    // centroid update: normalized mean, empty or degenerate clusters keep
    // their previous centroid
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<long> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignment[i]];
      const auto& p = points[i];
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
      ++sizes[result.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      double nv = detail::norm(sums[c]);
      if (nv <= 1e-15) continue;
      for (std::size_t d = 0; d < dim; ++d) result.centroids[c][d] = sums[c][d] / nv;
    }
  }
  return result;
}

// ---- 2D projection ----------------------------------------------------------

struct ProjectionResult {
  std::vector<std::array<double, 2>> points;
  std::array<double, 2> explained_variance = {0.0, 0.0};
  bool degenerate = false;  // fewer than two informative axes
};

namespace detail {

// Multiplies the (implicit) covariance matrix with v: sum_i x_i (x_i . v) / (n-1),
// minus already-extracted components.
inline std::vector<double> cov_multiply(
    const std::vector<std::vector<double>>& centered, const std::vector<double>& v,
    const std::vector<std::pair<double, std::vector<double>>>& deflated) {
  std::size_t dim = v.size();
  std::vector<double> out(dim, 0.0);
  for (const auto& x : centered) {
    double proj = dot(x, v);
    for (std::size_t d = 0; d < dim; ++d) out[d] += x[d] * proj;
  }
  double denom = centered.size() > 1 ? static_cast<double>(centered.size() - 1) : 1.0;
  for (std::size_t d = 0; d < dim; ++d) out[d] /= denom;
  for (const auto& [lambda, u] : deflated) {
    double proj = lambda * dot(u, v);
    for (std::size_t d = 0; d < dim; ++d) out[d] -= proj * u[d];
  }
  return out;
}

}  // namespace detail

/// PCA to two dimensions via power iteration with deflation. Axes whose
/// eigenvalue vanishes produce zero coordinates; if even the first axis
/// vanishes the projection is flagged degenerate.
inline ProjectionResult project_2d(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw dataset_error("project_2d: no vectors");
  const std::size_t dim = vectors[0].size();
  if (dim == 0) throw dataset_error("project_2d: zero-dimensional vectors");
  for (const auto& v : vectors)
    if (v.size() != dim)
      throw parameter_error("project_2d: vectors have mixed dimensions");

  const std::size_t n = vectors.size();
  ProjectionResult result;
  result.points.assign(n, {0.0, 0.0});

  std::vector<double> mean(dim, 0.0);
  for (const auto& v : vectors)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
  for (std::size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(n);
  std::vector<std::vector<double>> centered(n, std::vector<double>(dim));
  double total_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      centered[i][d] = vectors[i][d] - mean[d];
      total_var += centered[i][d] * centered[i][d];
    }
  }
  if (n < 2 || total_var <= 1e-15) {
    result.degenerate = true;
    return result;
  }

  auto rng = detail::make_rng(0x9e3779b9u);  // internal, fixed
  std::vector<std::pair<double, std::vector<double>>> components;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> v(dim);
    double nv = 0.0;
    do {
      for (std::size_t d = 0; d < dim; ++d) v[d] = detail::next_double(rng) * 2.0 - 1.0;
      nv = detail::norm(v);
    } while (nv <= 1e-12);
    for (std::size_t d = 0; d < dim; ++d) v[d] /= nv;

    double lambda = 0.0;
    for (int it = 0; it < 1000; ++it) {
      auto w = detail::cov_multiply(centered, v, components);
      double nw = detail::norm(w);
      if (nw <= 1e-15) {
        lambda = 0.0;
        break;
      }
      for (std::size_t d = 0; d < dim; ++d) w[d] /= nw;
      double diff = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        double e = w[d] - v[d];
        diff += e * e;
      }
      v = std::move(w);
      lambda = nw;  // ||Cv|| of a unit v converges to the eigenvalue
      if (std::sqrt(diff) < 1e-9) break;
    }
    if (lambda <= 1e-12) {
      if (axis == 0) result.degenerate = true;
      break;  // this axis and any later one stay zero
    }
    // sign convention: the largest-magnitude loading is positive
    std::size_t arg = 0;
    for (std::size_t d = 1; d < dim; ++d)
      if (std::abs(v[d]) > std::abs(v[arg])) arg = d;
    if (v[arg] < 0.0)
      for (std::size_t d = 0; d < dim; ++d) v[d] = -v[d];

    for (std::size_t i = 0; i < n; ++i)
      result.points[i][axis] = detail::dot(centered[i], v);
    result.explained_variance[axis] = lambda;
    components.emplace_back(lambda, v);
  }
  return result;
}

}  // namespace textmine
