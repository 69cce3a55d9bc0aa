#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "textmine/embed.hpp"

using namespace textmine;

namespace {

EmbeddingTable table_from(const std::string& body) {
  static int counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("textmine_embed_" + std::to_string(counter++) + ".txt");
  {
    std::ofstream out(path);
    out << body;
  }
  try {
    EmbeddingTable t = load_embeddings(path);
    std::filesystem::remove(path);
    return t;
  } catch (...) {
    std::filesystem::remove(path);
    throw;
  }
}

std::vector<std::vector<double>> vectors_of(const EmbeddingTable& t) {
  std::vector<std::vector<double>> out;
  for (const auto& [w, v] : t.vectors) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("load_embeddings reads plain text vectors") {
  EmbeddingTable t = table_from(
      "alpha 1.0 0.0 0.0\n"
      "beta 0.0 1.0 0.0\n"
      "gamma 0.5 0.5 0.0\n");
  CHECK(t.dimension == 3);
  CHECK(t.size() == 3);
  CHECK(t.contains("alpha"));
  CHECK(t.at("beta")[1] == 1.0);
  CHECK_FALSE(t.contains("delta"));
  CHECK_THROWS_AS(t.at("delta"), lookup_error);
}

TEST_CASE("load_embeddings skips a word2vec count header") {
  EmbeddingTable t = table_from(
      "2 3\n"
      "alpha 1 0 0\n"
      "beta 0 1 0\n");
  CHECK(t.size() == 2);
  CHECK(t.dimension == 3);
  CHECK_FALSE(t.contains("2"));

  // a first line whose second field is not numeric is data, not a header
  EmbeddingTable u = table_from(
      "one 1.0\n"
      "two 2.0\n");
  CHECK(u.size() == 2);
  CHECK(u.dimension == 1);
  CHECK(u.at("one")[0] == 1.0);
}

TEST_CASE("load_embeddings validates shape line by line") {
  CHECK_THROWS_AS(table_from("alpha 1.0 2.0\nbeta 1.0\n"), format_error);
  CHECK_THROWS_AS(table_from("alpha 1.0\nbeta not_a_number\n"), format_error);
  CHECK_THROWS_AS(table_from(""), format_error);
  CHECK_THROWS_AS(table_from("loneword\n"), format_error);
  CHECK_THROWS_WITH(table_from("alpha 1.0\nbeta 1.0 2.0\n"),
                    Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("load_embeddings keeps the last duplicate") {
  EmbeddingTable t = table_from(
      "word 1.0 0.0\n"
      "other 0.0 1.0\n"
      "word 0.5 0.5\n");
  CHECK(t.size() == 2);
  CHECK(t.duplicates == 1);
  CHECK(t.at("word")[0] == 0.5);
}

TEST_CASE("load_embeddings reads from a file path") {
  auto path = std::filesystem::temp_directory_path() / "textmine_embed_demo.txt";
  {
    std::ofstream out(path);
    out << "x 1.0 0.0\ny 0.0 1.0\n";
  }
  EmbeddingTable t = load_embeddings(path);
  CHECK(t.size() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_embeddings(path), io_error);
}

TEST_CASE("cosine agrees with a plain-loop oracle and clamps") {
  std::vector<double> a = {1.0, 2.0, 3.0};
  std::vector<double> b = {-2.0, 0.5, 1.0};
  CHECK(cosine(a, b) == Catch::Approx(oracle::cosine(a, b)).margin(1e-12));
  CHECK(cosine(a, b) == cosine(b, a));
  CHECK(cosine(a, a) == 1.0);  // clamped, no 1+epsilon
  CHECK(cosine({1.0, 0.0}, {0.0, 1.0}) == 0.0);
  CHECK(cosine({1.0, 0.0}, {-1.0, 0.0}) == -1.0);
  CHECK_THROWS_AS(cosine({1.0}, {1.0, 2.0}), parameter_error);
  CHECK_THROWS_AS(cosine({0.0, 0.0}, {1.0, 2.0}), parameter_error);
  CHECK_THROWS_AS(cosine({}, {}), parameter_error);
}

TEST_CASE("nearest matches a brute-force oracle") {
  EmbeddingTable t = gen::two_blob_embeddings(6, 8, 99);
  auto got = nearest(t, "blob0_0", 5);
  auto want = oracle::nearest(t, "blob0_0", 5);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].first == want[i].first);
    CHECK(got[i].second == Catch::Approx(want[i].second).margin(1e-12));
  }
  // the query itself is never a neighbour
  for (const auto& [w, sim] : got) CHECK(w != "blob0_0");
}

TEST_CASE("nearest breaks similarity ties alphabetically") {
  EmbeddingTable t;
  t.dimension = 2;
  t.vectors["query"] = {1.0, 0.0};
  t.vectors["zed"] = {2.0, 0.0};
  t.vectors["apple"] = {3.0, 0.0};
  auto got = nearest(t, "query", 2);
  REQUIRE(got.size() == 2);
  CHECK(got[0].first == "apple");
  CHECK(got[1].first == "zed");
  CHECK(got[0].second == 1.0);
}

TEST_CASE("nearest validates inputs and saturates k") {
  EmbeddingTable t = gen::two_blob_embeddings(3, 4, 1);
  CHECK_THROWS_AS(nearest(t, "missing", 3), lookup_error);
  CHECK_THROWS_AS(nearest(t, "blob0_0", 0), parameter_error);
  CHECK(nearest(t, "blob0_0", 100).size() == t.size() - 1);
}

TEST_CASE("expand_dictionary returns cluster-mates without the seeds") {
  EmbeddingTable t = gen::two_blob_embeddings(5, 6, 7);
  ExpansionResult r = expand_dictionary(t, {"blob0_0", "blob0_1", "unseen"}, 8, 0.9);
  std::vector<std::string> want = {"blob0_2", "blob0_3", "blob0_4"};
  CHECK(r.words == want);  // no seeds, no blob1 words, sorted
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0] == "unseen");
}

TEST_CASE("expand_dictionary is independent of seed order") {
  EmbeddingTable t = gen::two_blob_embeddings(5, 6, 17);
  std::vector<std::string> seeds = {"blob0_0", "blob0_3", "blob1_1"};
  ExpansionResult a = expand_dictionary(t, seeds, 4, 0.9);
  std::reverse(seeds.begin(), seeds.end());
  ExpansionResult b = expand_dictionary(t, seeds, 4, 0.9);
  CHECK(a.words == b.words);
}

TEST_CASE("expand_dictionary keeps candidates at the threshold boundary") {
  EmbeddingTable t;
  t.dimension = 2;
  t.vectors["seed"] = {1.0, 0.0};
  t.vectors["same"] = {5.0, 0.0};  // cosine exactly 1.0
  t.vectors["near"] = {1.0, 0.1};
  t.vectors["orth"] = {0.0, 1.0};  // cosine 0.0
  ExpansionResult r = expand_dictionary(t, {"seed"}, 10, 1.0);
  std::vector<std::string> want = {"same"};
  CHECK(r.words == want);  // sim >= threshold keeps the boundary case
}

TEST_CASE("expand_dictionary handles empty and fully-unknown seed sets") {
  EmbeddingTable t = gen::two_blob_embeddings(3, 4, 2);
  ExpansionResult none = expand_dictionary(t, {}, 5, 0.5);
  CHECK(none.words.empty());
  CHECK(none.skipped.empty());

  ExpansionResult oov = expand_dictionary(t, {"nope", "nada", "nope"}, 5, 0.5);
  CHECK(oov.words.empty());
  REQUIRE(oov.skipped.size() == 2);  // deduplicated, input order
  CHECK(oov.skipped[0] == "nope");
  CHECK(oov.skipped[1] == "nada");
}

TEST_CASE("expand_dictionary validates parameters") {
  EmbeddingTable t = gen::two_blob_embeddings(3, 4, 2);
  CHECK_THROWS_AS(expand_dictionary(t, {"blob0_0"}, 0, 0.5), parameter_error);
  CHECK_THROWS_AS(expand_dictionary(t, {"blob0_0"}, 5, 0.0), parameter_error);
  CHECK_THROWS_AS(expand_dictionary(t, {"blob0_0"}, 5, 1.5), parameter_error);
  CHECK_NOTHROW(expand_dictionary(t, {"blob0_0"}, 5, 1.0));
}

TEST_CASE("spherical_kmeans splits two blobs cleanly") {
  EmbeddingTable t = gen::two_blob_embeddings(10, 6, 31);
  KmeansResult r = spherical_kmeans(t, 2, 13);
  REQUIRE(r.words.size() == 20);
  REQUIRE(r.assignment.size() == 20);
  CHECK(r.converged);
  // every word shares its cluster with its own blob only
  int cluster_of_blob0 = -1;
  bool clean = true;
  for (std::size_t i = 0; i < r.words.size(); ++i) {
    bool is0 = r.words[i].rfind("blob0_", 0) == 0;
    if (is0) {
      if (cluster_of_blob0 == -1) cluster_of_blob0 = r.assignment[i];
      if (r.assignment[i] != cluster_of_blob0) clean = false;
    } else if (r.assignment[i] == cluster_of_blob0) {
      clean = false;
    }
  }
  CHECK(clean);
}

TEST_CASE("spherical_kmeans objective never decreases") {
  EmbeddingTable t = gen::two_blob_embeddings(12, 5, 8);
  for (std::uint32_t seed : {0u, 1u, 2u, 3u}) {
    KmeansResult r = spherical_kmeans(t, 3, seed);
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      CHECK(r.objective_history[i] >= r.objective_history[i - 1] - 1e-9);
  }
}

TEST_CASE("spherical_kmeans centroids stay unit length") {
  EmbeddingTable t = gen::two_blob_embeddings(8, 7, 15);
  KmeansResult r = spherical_kmeans(t, 4, 5);
  REQUIRE(r.centroids.size() == 4);
  for (const auto& c : r.centroids) {
    double n = 0;
    for (double x : c) n += x * x;
    CHECK(std::sqrt(n) == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("spherical_kmeans is deterministic in the seed") {
  EmbeddingTable t = gen::two_blob_embeddings(9, 4, 44);
  KmeansResult a = spherical_kmeans(t, 3, 6);
  KmeansResult b = spherical_kmeans(t, 3, 6);
  CHECK(a.assignment == b.assignment);
  CHECK(a.centroids == b.centroids);
  CHECK(a.objective_history == b.objective_history);
}

TEST_CASE("spherical_kmeans covers the forced cluster counts") {
  EmbeddingTable t = gen::two_blob_embeddings(4, 3, 9);
  KmeansResult one = spherical_kmeans(t, 1, 0);
  for (int a : one.assignment) CHECK(a == 0);
  CHECK(one.converged);

  // k = n: every word is its own cluster and each cosine is exactly 1
  KmeansResult all = spherical_kmeans(t, 8, 0);
  std::set<int> distinct(all.assignment.begin(), all.assignment.end());
  CHECK(distinct.size() == 8);
  CHECK(all.objective_history.back() == Catch::Approx(8.0).margin(1e-9));
}

TEST_CASE("spherical_kmeans validates inputs") {
  EmbeddingTable t = gen::two_blob_embeddings(4, 3, 9);
  CHECK_THROWS_AS(spherical_kmeans(t, 0, 0), parameter_error);
  CHECK_THROWS_AS(spherical_kmeans(t, 9, 0), parameter_error);  // k > n (n=8)
  EmbeddingTable zero;
  zero.dimension = 2;
  zero.vectors["ok"] = {1.0, 0.0};
  zero.vectors["zero"] = {0.0, 0.0};
  CHECK_THROWS_AS(spherical_kmeans(zero, 1, 0), parameter_error);
  EmbeddingTable empty;
  CHECK_THROWS_AS(spherical_kmeans(empty, 1, 0), parameter_error);
}

TEST_CASE("project_2d recovers the dominant axis") {
  // points spread along dimension 2 with slight noise in dimension 0; the
  // alternating noise is orthogonal to the main axis so the principal
  // component stays exactly axis-aligned
  std::vector<std::vector<double>> vecs;
  for (int i = 0; i < 9; ++i) {
    double main = (i - 4) * 1.0;  // -4..4
    double side = (i % 2 == 0 ? -0.05 : 0.05);
    vecs.push_back({side, 0.0, main});
  }
  ProjectionResult r = project_2d(vecs);
  REQUIRE_FALSE(r.degenerate);
  REQUIRE(r.points.size() == 9);
  double spread_x = 0, spread_y = 0;
  for (const auto& p : r.points) {
    spread_x = std::max(spread_x, std::abs(p[0]));
    spread_y = std::max(spread_y, std::abs(p[1]));
  }
  CHECK(spread_x == Catch::Approx(4.0).margin(1e-6));
  CHECK(spread_y < 0.2);
  CHECK(r.explained_variance[0] > r.explained_variance[1]);
  // sign convention: the largest-|loading| coordinate is positive, so the
  // point with the largest main coordinate projects to positive x
  CHECK(r.points.back()[0] > 0);
}

TEST_CASE("project_2d preserves distances for a planted plane") {
  // points live in a 2-D plane spanned by orthonormal u, w inside 6 dims
  std::vector<double> u = {0.5, 0.5, 0.5, 0.5, 0.0, 0.0};
  std::vector<double> w = {0.5, -0.5, 0.5, -0.5, 0.0, 0.0};
  std::vector<std::pair<double, double>> coords = {
      {0.0, 0.0}, {1.0, 0.2}, {2.0, -0.7}, {-1.5, 1.1}, {0.3, -2.0}, {-0.8, 0.9}};
  std::vector<std::vector<double>> vecs;
  for (const auto& [a, b] : coords) {
    std::vector<double> v(6, 0.0);
    for (int d = 0; d < 6; ++d) v[d] = a * u[d] + b * w[d];
    vecs.push_back(v);
  }
  ProjectionResult r = project_2d(vecs);
  REQUIRE_FALSE(r.degenerate);
  for (std::size_t i = 0; i < vecs.size(); ++i)
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      double orig = std::hypot(coords[i].first - coords[j].first,
                               coords[i].second - coords[j].second);
      double proj = std::hypot(r.points[i][0] - r.points[j][0],
                               r.points[i][1] - r.points[j][1]);
      CHECK(proj == Catch::Approx(orig).margin(1e-6));
    }
}

TEST_CASE("project_2d explained variance matches a Jacobi eigensolver") {
  EmbeddingTable t = gen::two_blob_embeddings(6, 5, 23);
  auto vecs = vectors_of(t);
  ProjectionResult r = project_2d(vecs);
  auto eig = oracle::sym_eigenvalues(oracle::covariance(vecs));
  REQUIRE(eig.size() >= 2);
  CHECK(r.explained_variance[0] + r.explained_variance[1] ==
        Catch::Approx(eig[0] + eig[1]).margin(1e-6));
}

TEST_CASE("project_2d maps two points onto distinct x with zero y") {
  std::vector<std::vector<double>> vecs = {{1.0, 2.0, 3.0}, {4.0, 0.0, 1.0}};
  ProjectionResult r = project_2d(vecs);
  REQUIRE_FALSE(r.degenerate);
  CHECK(r.points[0][0] != r.points[1][0]);
  CHECK(r.points[0][1] == 0.0);
  CHECK(r.points[1][1] == 0.0);
}

TEST_CASE("project_2d on collinear points zeroes the second axis") {
  std::vector<std::vector<double>> vecs;
  for (int i = 0; i < 5; ++i) vecs.push_back({double(i), 2.0 * i});
  ProjectionResult r = project_2d(vecs);
  REQUIRE_FALSE(r.degenerate);
  for (const auto& p : r.points) CHECK(p[1] == 0.0);
}

TEST_CASE("project_2d flags degenerate inputs") {
  std::vector<std::vector<double>> same = {{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
  ProjectionResult r = project_2d(same);
  CHECK(r.degenerate);
  for (const auto& p : r.points) {
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
  }

  CHECK(project_2d({{1.0, 2.0}}).degenerate);  // a single point has no spread
  CHECK_THROWS_AS(project_2d({}), dataset_error);
  CHECK_THROWS_AS(project_2d({{1.0}, {1.0, 2.0}}), parameter_error);
}
