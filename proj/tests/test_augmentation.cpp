#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "gda/gda.hpp"
#include "helpers.hpp"

using namespace gda;

namespace {

// boolean(A + A·A) minus the diagonal, straight from the definition.
DenseMatrix dense_two_hop(const SparseMatrix& adj) {
  DenseMatrix a = adj.to_dense();
  DenseMatrix a2 = oracle::naive_matmul(a, a);
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(i, j) = (i != j && (a(i, j) > 0.0 || a2(i, j) >= 1.0)) ? 1.0 : 0.0;
  return out;
}

SparseMatrix path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return SparseMatrix::from_edges(n, edges);
}

SparseMatrix complete_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return SparseMatrix::from_edges(n, edges);
}

}  // namespace

TEST_CASE("two-hop closure turns a path into a triangle", "[augmentation]") {
  SparseMatrix tri = high_order_adjacency(path_graph(3));
  REQUIRE(max_abs_diff(tri.to_dense(), complete_graph(3).to_dense()) == 0.0);
}

TEST_CASE("two-hop closure leaves a complete graph unchanged", "[augmentation]") {
  SparseMatrix k5 = complete_graph(5);
  REQUIRE(high_order_adjacency(k5) == k5);
}

TEST_CASE("two-hop closure matches the dense boolean oracle", "[augmentation]") {
  Rng rng(17);
  for (int round = 0; round < 10; ++round) {
    SparseMatrix adj = oracle::random_adjacency(20, 0.12, rng);
    SparseMatrix high = high_order_adjacency(adj);
    REQUIRE(max_abs_diff(high.to_dense(), dense_two_hop(adj)) == 0.0);
    // Monotone: the input edge set is contained in the output.
    for (std::size_t i = 0; i < adj.rows(); ++i) {
      auto in_cols = adj.row_cols(i);
      auto out_cols = high.row_cols(i);
      std::set<std::size_t> out_set(out_cols.begin(), out_cols.end());
      for (std::size_t j : in_cols) REQUIRE(out_set.count(j) == 1);
    }
  }
}

TEST_CASE("cosine_cross basics: identical, orthogonal, zero rows", "[augmentation]") {
  DenseMatrix m{{1, 1, 0}, {2, 2, 0}, {0, 0, 3}, {0, 0, 0}};
  DenseMatrix s = cosine_cross(m);
  REQUIRE(s(0, 1) == Catch::Approx(1.0).margin(1e-12));  // parallel rows
  REQUIRE(s(0, 2) == Catch::Approx(0.0).margin(1e-12));  // orthogonal rows
  REQUIRE(s(0, 0) == 1.0);
  // Zero row: similarity 0 everywhere, diagonal included.
  for (std::size_t j = 0; j < 4; ++j) {
    REQUIRE(s(3, j) == 0.0);
    REQUIRE(s(j, 3) == 0.0);
  }
}

TEST_CASE("cosine_cross matches the naive pairwise oracle", "[augmentation]") {
  Rng rng(19);
  DenseMatrix m = oracle::random_matrix(10, 6, rng);
  REQUIRE(max_abs_diff(cosine_cross(m), oracle::naive_cosine(m)) < 1e-12);
}

TEST_CASE("cosine_cross is symmetric and bounded", "[augmentation]") {
  Rng rng(23);
  DenseMatrix m = oracle::random_matrix(14, 5, rng);
  DenseMatrix s = cosine_cross(m);
  REQUIRE(max_abs_diff(s, transpose(s)) == 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    REQUIRE(s.data()[i] <= 1.0);
    REQUIRE(s.data()[i] >= -1.0);
  }
  // Binary inputs give similarities in [0, 1].
  SparseMatrix adj = oracle::random_adjacency(12, 0.3, rng);
  DenseMatrix sb = cosine_cross(adj);
  for (std::size_t i = 0; i < sb.size(); ++i) {
    REQUIRE(sb.data()[i] >= 0.0);
    REQUIRE(sb.data()[i] <= 1.0);
  }
}

TEST_CASE("knn_binarize links each node to its nearest neighbor at k=1",
          "[augmentation]") {
  DenseMatrix sim{{1.0, 0.9, 0.1}, {0.9, 1.0, 0.2}, {0.1, 0.2, 1.0}};
  SparseMatrix g = knn_binarize(sim, 1);
  DenseMatrix d = g.to_dense();
  REQUIRE(d(0, 1) == 1.0);
  REQUIRE(d(1, 0) == 1.0);
  REQUIRE(d(2, 1) == 1.0);  // node 2 picks node 1; union keeps it
  REQUIRE(d(1, 2) == 1.0);
  REQUIRE(d(0, 2) == 0.0);
}

TEST_CASE("knn_binarize breaks ties toward the lower index", "[augmentation]") {
  DenseMatrix sim(4, 4, 0.5);
  for (std::size_t i = 0; i < 4; ++i) sim(i, i) = 1.0;
  auto picks = knn_row_topk(sim, 0, 2);
  REQUIRE(picks == std::vector<std::size_t>{1, 2});
}

TEST_CASE("knn_binarize pre-symmetrization degree is exactly k", "[augmentation]") {
  Rng rng(29);
  DenseMatrix sim = cosine_cross(oracle::random_matrix(12, 7, rng));
  const std::size_t k = 4;
  SparseMatrix g = knn_binarize(sim, k);
  DenseMatrix d = g.to_dense();
  for (std::size_t i = 0; i < 12; ++i) {
    auto picks = knn_row_topk(sim, i, k);
    REQUIRE(picks.size() == k);
    // Full-sort oracle: every pick must beat (or tie ahead of) every non-pick.
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < 12; ++j)
      if (j != i) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (sim(i, a) != sim(i, b)) return sim(i, a) > sim(i, b);
      return a < b;
    });
    REQUIRE(std::vector<std::size_t>(order.begin(), order.begin() + k) == picks);
    // Union symmetrization keeps every directed pick.
    for (std::size_t j : picks) REQUIRE(d(i, j) == 1.0);
    REQUIRE(d(i, i) == 0.0);
  }
  REQUIRE(max_abs_diff(d, transpose(d)) == 0.0);
}

TEST_CASE("knn_binarize rejects k outside [1, n)", "[augmentation]") {
  DenseMatrix sim(3, 3, 0.5);
  REQUIRE_THROWS_AS(knn_binarize(sim, 3), ConfigError);
  REQUIRE_THROWS_AS(knn_binarize(sim, 0), ConfigError);
}

TEST_CASE("build_feature_set produces the documented shapes", "[augmentation]") {
  SyntheticSpec spec;
  Rng rng(1);
  Graph g = generate_synthetic(spec, rng);
  FeatureSet fs = build_feature_set(g, 4);
  REQUIRE(fs.a_high.rows() == 90);
  REQUIRE(fs.a_c.rows() == 90);
  REQUIRE(fs.a_c.cols() == 90);
  REQUIRE(fs.x_c.rows() == 90);
  REQUIRE(fs.x_c.cols() == 90);
  REQUIRE(fs.x.rows() == 90);
  REQUIRE(fs.x.cols() == 50);
  REQUIRE(fs.a_t.rows() == 90);
  REQUIRE(fs.x_t.rows() == 90);
  // Deterministic in (graph, k).
  FeatureSet fs2 = build_feature_set(g, 4);
  REQUIRE(fs.a_c == fs2.a_c);
  REQUIRE(fs.x_t == fs2.x_t);
}

TEST_CASE("build_feature_set handles an edgeless graph", "[augmentation]") {
  Graph g;
  g.n = 6;
  g.adjacency = SparseMatrix::from_edges(6, {});
  Rng rng(3);
  g.attributes = oracle::random_matrix(6, 4, rng);
  g.labels.assign(6, 0);
  g.num_classes = 1;
  FeatureSet fs = build_feature_set(g, 2);
  REQUIRE(fs.a_high.nnz() == 0);
  REQUIRE(sum(fs.a_c) == 0.0);  // all rows are the zero-row case
  // a_t still has degree-k rows picked purely by the tie rule.
  REQUIRE(fs.a_t.nnz() > 0);
}

TEST_CASE("enumerate_channels follows the combination table", "[augmentation]") {
  SyntheticSpec spec;
  Rng rng(1);
  Graph g = generate_synthetic(spec, rng);
  FeatureSet fs = build_feature_set(g, 4);
  auto channels = enumerate_channels(fs);

  REQUIRE(channels[0].spec.adj == AdjSource::a);
  REQUIRE(channels[0].spec.attr == AttrSource::x);
  REQUIRE(channels[4].spec.adj == AdjSource::a_t);
  REQUIRE(channels[4].spec.attr == AttrSource::a_c);
  REQUIRE(channels[8].spec.adj == AdjSource::x_t);
  REQUIRE(channels[8].spec.attr == AttrSource::x_c);
  REQUIRE(channel_name(channels[0].spec) == "G1(A,X)");
  REQUIRE(channel_name(channels[4].spec) == "G5(A_T,A_C)");
  REQUIRE(channel_name(channels[8].spec) == "G9(X_T,X_C)");

  // Adjacency sources are renormalized (they carry self-loop weight).
  REQUIRE(max_abs_diff(channels[0].adjacency->to_dense(),
                       normalize_adjacency(fs.a_high).to_dense()) == 0.0);
  REQUIRE(max_abs_diff(channels[3].adjacency->to_dense(),
                       normalize_adjacency(fs.a_t).to_dense()) == 0.0);

  // Attribute sources are L1 row-normalized.
  DenseMatrix expected_x = row_l1_normalize(fs.x);
  REQUIRE(max_abs_diff(channels[0].attrs->materialize(), expected_x) < 1e-15);
  REQUIRE(channels[0].attrs->in_dim == 50);
  REQUIRE(channels[1].attrs->in_dim == 90);

  // Channels sharing a source share storage.
  REQUIRE(channels[0].adjacency.get() == channels[1].adjacency.get());
  REQUIRE(channels[1].attrs.get() == channels[4].attrs.get());
}

TEST_CASE("cosine-derived attributes factor exactly", "[augmentation]") {
  SyntheticSpec spec;
  spec.n_per_class = 12;
  Rng rng(9);
  Graph g = generate_synthetic(spec, rng);
  FeatureSet fs = build_feature_set(g, 3);
  auto channels = enumerate_channels(fs);
  for (std::size_t ci : {1u, 2u}) {  // A_C and X_C attribute bundles
    const AttrBundle& b = *channels[ci].attrs;
    REQUIRE(b.factor_left != nullptr);
    REQUIRE(b.factor_right_t != nullptr);
    DenseMatrix product =
        matmul(*b.factor_left, b.factor_right_t->to_dense());
    REQUIRE(max_abs_diff(product, b.materialize()) < 1e-12);
  }
}
