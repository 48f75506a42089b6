#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gda/gda.hpp"
#include "helpers.hpp"

using namespace gda;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gda_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string dataset_dir() {
  if (const char* env = std::getenv("GDA_DATA_DIR")) return env;
  return "data";
}

bool dataset_present(const std::string& name) {
  return fs::exists(fs::path(dataset_dir()) / name / "edges.tsv");
}

}  // namespace

TEST_CASE("dense matrix files round-trip exactly", "[data_io]") {
  TempDir tmp;
  Rng rng(3);
  DenseMatrix m = oracle::random_matrix(7, 5, rng, -10.0, 10.0);
  m(0, 0) = 0.1;
  m(1, 1) = 1e-300;
  m(2, 2) = -0.0;
  m(3, 3) = 12345678.987654321;
  write_matrix(tmp.file("m.txt"), m);
  DenseMatrix back = read_dense_matrix(tmp.file("m.txt"));
  REQUIRE(back == m);
}

TEST_CASE("sparse matrix files round-trip exactly", "[data_io]") {
  TempDir tmp;
  Rng rng(5);
  SparseMatrix s = oracle::random_adjacency(15, 0.2, rng);
  write_matrix(tmp.file("s.txt"), s);
  AnyMatrix back = read_matrix(tmp.file("s.txt"));
  REQUIRE(std::holds_alternative<SparseMatrix>(back));
  REQUIRE(std::get<SparseMatrix>(back) == s);
}

TEST_CASE("matrix reader rejects malformed input", "[data_io]") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("bad_header.txt"));
    out << "not a header\n";
  }
  REQUIRE_THROWS_AS(read_matrix(tmp.file("bad_header.txt")), ParseError);
  {
    std::ofstream out(tmp.file("truncated.txt"));
    out << "2 2\n1.0 2.0 3.0\n";
  }
  REQUIRE_THROWS_AS(read_matrix(tmp.file("truncated.txt")), ParseError);
  {
    std::ofstream out(tmp.file("oob.txt"));
    out << "2 2 1\n5 0 1.0\n";
  }
  REQUIRE_THROWS_AS(read_matrix(tmp.file("oob.txt")), ValidationError);
  REQUIRE_THROWS_AS(read_matrix(tmp.file("missing.txt")), IoError);
}

TEST_CASE("edge lists: comments, dedup, symmetrization, self-loop drop", "[data_io]") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("e.tsv"));
    out << "# comment line\n";
    out << "0\t1\n";
    out << "1 0\n";      // duplicate in the other direction
    out << "2\t2\n";     // self-loop, dropped
    out << "1\t2  # trailing comment\n";
    out << "\n";
  }
  auto edges = read_edge_list(tmp.file("e.tsv"));
  REQUIRE(edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
}

TEST_CASE("edge list parser reports the offending line", "[data_io]") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("bad.tsv"));
    out << "0\t1\nnonsense\n";
  }
  try {
    read_edge_list(tmp.file("bad.tsv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("label files reject negative classes and bad ids", "[data_io]") {
  TempDir tmp;
  {
    std::ofstream out(tmp.file("neg.txt"));
    out << "0 -1\n";
  }
  std::vector<int> labels(3, -1);
  int num_classes = 0;
  REQUIRE_THROWS_AS(read_labels_into(tmp.file("neg.txt"), labels, num_classes),
                    ParseError);
  {
    std::ofstream out(tmp.file("oob.txt"));
    out << "9 1\n";
  }
  REQUIRE_THROWS_AS(read_labels_into(tmp.file("oob.txt"), labels, num_classes),
                    ValidationError);
}

TEST_CASE("graph round-trips through the dataset files", "[data_io]") {
  TempDir tmp;
  SyntheticSpec spec;
  spec.n_per_class = 8;
  Rng rng(7);
  Graph g = generate_synthetic(spec, rng);
  write_edge_list(tmp.file("edges.tsv"), g.adjacency);
  write_matrix(tmp.file("features.txt"), g.attributes);
  write_labels(tmp.file("labels.txt"), g.labels);
  Graph back = load_dataset(
      DatasetPaths{tmp.file("edges.tsv"), tmp.file("features.txt"), tmp.file("labels.txt")});
  REQUIRE(back.n == g.n);
  REQUIRE(back.adjacency == g.adjacency);
  REQUIRE(back.attributes == g.attributes);
  REQUIRE(back.labels == g.labels);
  REQUIRE(back.num_classes == g.num_classes);
}

TEST_CASE("split files round-trip", "[data_io]") {
  TempDir tmp;
  SplitMasks masks;
  masks.train = {0, 3, 5};
  masks.val = {1, 7};
  masks.test = {2, 4};
  write_split_file(tmp.file("split.txt"), masks);
  SplitMasks back = read_split_file(tmp.file("split.txt"), 8);
  REQUIRE(back.train == masks.train);
  REQUIRE(back.val == masks.val);
  REQUIRE(back.test == masks.test);
  {
    std::ofstream out(tmp.file("bad.txt"));
    out << "0 sideways\n";
  }
  REQUIRE_THROWS_AS(read_split_file(tmp.file("bad.txt"), 8), ParseError);
}

TEST_CASE("synthetic generator: intra-class edge count near expectation",
          "[data_io]") {
  SyntheticSpec spec;  // 90 nodes, p 0.03/0.01, d=50
  const int seeds = 10;
  double total_intra = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(s);
    Graph g = generate_synthetic(spec, rng);
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j : g.adjacency.row_cols(i))
        if (j > i && g.labels[i] == g.labels[j]) total_intra += 1.0;
  }
  const double mean_intra = total_intra / seeds;
  const double expectation = 3.0 * (30.0 * 29.0 / 2.0) * 0.03;  // ~39.15
  const double sigma = std::sqrt(3.0 * (30.0 * 29.0 / 2.0) * 0.03 * 0.97);
  REQUIRE(std::abs(mean_intra - expectation) < 4.0 * sigma / std::sqrt(seeds));
}

TEST_CASE("synthetic generator: zero probabilities give an edgeless graph",
          "[data_io]") {
  SyntheticSpec spec;
  spec.p_intra = 0.0;
  spec.p_inter = 0.0;
  Rng rng(3);
  Graph g = generate_synthetic(spec, rng);
  REQUIRE(g.adjacency.nnz() == 0);
}

TEST_CASE("synthetic generator: center distance controls separability",
          "[data_io]") {
  auto centroid_accuracy = [](const Graph& g) {
    // Nearest-class-centroid classifier on held-out half of the nodes.
    const std::size_t d = g.attributes.cols();
    std::vector<DenseMatrix> centroids(g.num_classes, DenseMatrix(1, d));
    std::vector<int> counts(g.num_classes, 0);
    for (std::size_t i = 0; i < g.n; i += 2) {
      for (std::size_t j = 0; j < d; ++j)
        centroids[g.labels[i]](0, j) += g.attributes(i, j);
      counts[g.labels[i]]++;
    }
    for (int c = 0; c < g.num_classes; ++c)
      for (std::size_t j = 0; j < d; ++j) centroids[c](0, j) /= counts[c];
    int correct = 0, total = 0;
    for (std::size_t i = 1; i < g.n; i += 2) {
      double best = 1e300;
      int arg = 0;
      for (int c = 0; c < g.num_classes; ++c) {
        double dist = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = g.attributes(i, j) - centroids[c](0, j);
          dist += diff * diff;
        }
        if (dist < best) {
          best = dist;
          arg = c;
        }
      }
      correct += arg == g.labels[i];
      ++total;
    }
    return static_cast<double>(correct) / total;
  };

  SyntheticSpec separated;
  Rng r1(5);
  REQUIRE(centroid_accuracy(generate_synthetic(separated, r1)) > 0.9);

  SyntheticSpec collapsed;
  collapsed.center_distance = 0.0;
  Rng r2(5);
  REQUIRE(centroid_accuracy(generate_synthetic(collapsed, r2)) < 0.55);

  SyntheticSpec blind;
  blind.mode = CorrelationMode::topology;
  Rng r3(5);
  REQUIRE(centroid_accuracy(generate_synthetic(blind, r3)) < 0.55);
}

TEST_CASE("synthetic generator is bit-reproducible per seed", "[data_io]") {
  SyntheticSpec spec;
  Rng r1(11), r2(11);
  Graph a = generate_synthetic(spec, r1);
  Graph b = generate_synthetic(spec, r2);
  REQUIRE(a.adjacency == b.adjacency);
  REQUIRE(a.attributes == b.attributes);
}

TEST_CASE("citeseer loads with the documented statistics", "[data_io][dataset]") {
  if (!dataset_present("citeseer")) {
    SKIP("citeseer files not found under " + dataset_dir());
  }
  Graph g = load_dataset("citeseer", dataset_dir());
  REQUIRE(g.n == 3327);
  REQUIRE(g.num_classes == 6);
  REQUIRE(g.attributes.cols() == 3703);

  Rng rng(0);
  SplitMasks masks = make_splits(g, 20, 500, 1000, rng);
  REQUIRE(masks.train.size() == 120);
  REQUIRE(masks.val.size() == 500);
  REQUIRE(masks.test.size() == 1000);
}

TEST_CASE("acm loads with the documented statistics", "[data_io][dataset]") {
  if (!dataset_present("acm")) {
    SKIP("acm files not found under " + dataset_dir());
  }
  Graph g = load_dataset("acm", dataset_dir());
  REQUIRE(g.n == 3025);
  REQUIRE(g.num_classes == 3);
  REQUIRE(g.attributes.cols() == 1870);
}
