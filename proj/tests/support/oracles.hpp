#pragma once

// Reference implementations kept deliberately independent of the library:
// textbook formulas, brute-force loops, no shared helpers. Tests compare the
// library's answers against these.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "textmine/classify.hpp"
#include "textmine/embed.hpp"

namespace oracle {

/// Chi-square via expected counts: sum (observed-expected)^2 / expected over
/// the four cells of the 2x2 table.
inline double chi_square(long a, long b, long c, long d) {
  double n = static_cast<double>(a) + b + c + d;
  double row[2] = {static_cast<double>(a + b), static_cast<double>(c + d)};
  double col[2] = {static_cast<double>(a + c), static_cast<double>(b + d)};
  double obs[2][2] = {{static_cast<double>(a), static_cast<double>(b)},
                      {static_cast<double>(c), static_cast<double>(d)}};
  double stat = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double expected = row[i] * col[j] / n;
      double diff = obs[i][j] - expected;
      stat += diff * diff / expected;
    }
  return stat;
}

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Per-class precision/recall/F1 by scanning the raw label lists.
inline Prf prf(const std::vector<std::string>& predicted,
               const std::vector<std::string>& gold, const std::string& cls) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] == cls && gold[i] == cls) ++tp;
    if (predicted[i] == cls && gold[i] != cls) ++fp;
    if (predicted[i] != cls && gold[i] == cls) ++fn;
  }
  Prf r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / (tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / (tp + fn);
  if (r.precision + r.recall > 0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Brute-force k nearest neighbours: score everything, sort, cut.
inline std::vector<std::pair<std::string, double>> nearest(
    const textmine::EmbeddingTable& table, const std::string& word, int k) {
  std::vector<std::pair<std::string, double>> all;
  const auto& query = table.vectors.at(word);
  for (const auto& [w, v] : table.vectors) {
    if (w == word) continue;
    double nv = 0.0;
    for (double x : v) nv += x * x;
    if (nv == 0.0) continue;
    all.emplace_back(w, cosine(query, v));
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(k);
  return all;
}

inline double entropy(long a, long b) {
  double n = static_cast<double>(a + b);
  double h = 0.0;
  if (a > 0) h -= (a / n) * std::log2(a / n);
  if (b > 0) h -= (b / n) * std::log2(b / n);
  return h;
}

/// Information gain of splitting the dataset on presence of one feature.
inline double info_gain(const std::vector<textmine::LabeledVector>& data,
                        const std::string& feature, const std::string& positive) {
  long pos_present = 0, neg_present = 0, pos_absent = 0, neg_absent = 0;
  for (const auto& ex : data) {
    auto it = ex.vector.entries.find(feature);
    bool present = it != ex.vector.entries.end() && it->second > 0.0;
    bool positive_label = ex.label == positive;
    if (present)
      (positive_label ? pos_present : neg_present) += 1;
    else
      (positive_label ? pos_absent : neg_absent) += 1;
  }
  long pos = pos_present + pos_absent, neg = neg_present + neg_absent;
  double total = static_cast<double>(pos + neg);
  double h = entropy(pos, neg);
  double n_present = static_cast<double>(pos_present + neg_present);
  double n_absent = static_cast<double>(pos_absent + neg_absent);
  return h - (n_present / total) * entropy(pos_present, neg_present) -
         (n_absent / total) * entropy(pos_absent, neg_absent);
}

/// The feature a greedy tree should put at the root: maximum information
/// gain, ties to the lexicographically smaller name.
inline std::string best_root_feature(const std::vector<textmine::LabeledVector>& data,
                                     const std::string& positive) {
  std::set<std::string> features;
  for (const auto& ex : data)
    for (const auto& [id, w] : ex.vector.entries) features.insert(id);
  std::string best;
  double best_gain = -1.0;
  for (const auto& f : features) {
    double g = info_gain(data, f, positive);
    if (g > best_gain + 1e-12) {
      best_gain = g;
      best = f;
    }
  }
  return best;
}

/// Eigenvalues of a small symmetric matrix by the cyclic Jacobi method,
/// sorted descending. Good to ~1e-12 on the well-conditioned fixtures here.
inline std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m[p][q] == 0.0) continue;
        double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double mip = m[i][p], miq = m[i][q];
          m[i][p] = c * mip - s * miq;
          m[i][q] = s * mip + c * miq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double mpi = m[p][i], mqi = m[q][i];
          m[p][i] = c * mpi - s * mqi;
          m[q][i] = s * mpi + c * mqi;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m[i][i];
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

/// Sample covariance matrix (n-1 denominator) of a point cloud.
inline std::vector<std::vector<double>> covariance(
    const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size(), dim = points[0].size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d];
  for (std::size_t d = 0; d < dim; ++d) mean[d] /= static_cast<double>(n);
  std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
  for (const auto& p : points)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]);
  for (auto& row : cov)
    for (auto& x : row) x /= static_cast<double>(n - 1);
  return cov;
}

}  // namespace oracle
