#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gda/common.hpp"
#include "gda/graph.hpp"
#include "gda/matrix.hpp"
#include "gda/rng.hpp"

namespace gda {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Strips a '#' comment and surrounding whitespace; empty result = skip line.
inline std::string strip_line(const std::string& line) {
  std::string s = line.substr(0, line.find('#'));
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

// -- edge lists ---------------------------------------------------------------

// Text lines "u <tab> v" of 0-based ids; '#' starts a comment. The parser
// symmetrizes, deduplicates, and drops self-loops.
inline std::vector<std::pair<std::size_t, std::size_t>> read_edge_list(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list: " + path);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = detail::strip_line(line);
    if (s.empty()) continue;
    std::istringstream iss(s);
    long long u = -1, v = -1;
    if (!(iss >> u >> v) || u < 0 || v < 0) {
      std::string extra;
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'u v' pair");
    }
    if (u == v) continue;
    edges.emplace_back(std::min<std::size_t>(u, v), std::max<std::size_t>(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline void write_edge_list(const std::string& path, const SparseMatrix& adj) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open edge list for writing: " + path);
  for (std::size_t i = 0; i < adj.rows(); ++i)
    for (std::size_t j : adj.row_cols(i))
      if (j > i) out << i << '\t' << j << '\n';
  if (!out) throw IoError("failed writing edge list: " + path);
}

// -- matrix files -------------------------------------------------------------

// Dense: header "rows cols", then row-major whitespace-separated values.
// Sparse: header "rows cols nnz", then "i j v" triples. Values are written
// with 17 significant digits so read(write(m)) == m exactly.

inline void write_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open matrix file for writing: " + path);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j)
      out << detail::fmt_double(m(i, j)) << (j + 1 == m.cols() ? '\n' : ' ');
  }
  if (!out) throw IoError("failed writing matrix file: " + path);
}

inline void write_matrix(const std::string& path, const SparseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open matrix file for writing: " + path);
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << i << ' ' << cols[k] << ' ' << detail::fmt_double(vals[k]) << '\n';
  }
  if (!out) throw IoError("failed writing matrix file: " + path);
}

using AnyMatrix = std::variant<DenseMatrix, SparseMatrix>;

inline AnyMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(path + ":1: missing header");
  std::istringstream hs(header);
  long long rows = -1, cols = -1, nnz = -1;
  hs >> rows >> cols;
  const bool sparse = static_cast<bool>(hs >> nnz);
  if (rows < 0 || cols < 0 || (sparse && nnz < 0))
    throw ParseError(path + ":1: malformed header '" + header + "'");
  if (!sparse) {
    DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (!(in >> m.data()[i]))
        throw ParseError(path + ": dense payload truncated (expected " +
                         std::to_string(m.size()) + " values)");
    return m;
  }
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(nnz);
  for (long long k = 0; k < nnz; ++k) {
    long long i = -1, j = -1;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw ParseError(path + ": sparse payload truncated at entry " + std::to_string(k));
    if (i < 0 || i >= rows || j < 0 || j >= cols)
      throw ValidationError(path + ": sparse index out of range at entry " +
                            std::to_string(k));
    t.emplace_back(i, j, v);
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

inline DenseMatrix read_dense_matrix(const std::string& path) {
  AnyMatrix m = read_matrix(path);
  if (std::holds_alternative<DenseMatrix>(m)) return std::get<DenseMatrix>(m);
  return std::get<SparseMatrix>(m).to_dense();
}

// -- label files ----------------------------------------------------------------

// One "node_id class_id" pair per line; nodes absent from the file are
// unlabeled.
inline void read_labels_into(const std::string& path, std::vector<int>& labels,
                             int& num_classes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file: " + path);
  std::string line;
  std::size_t line_no = 0;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = detail::strip_line(line);
    if (s.empty()) continue;
    std::istringstream iss(s);
    long long node = -1, cls = -1;
    if (!(iss >> node >> cls) || node < 0 || cls < 0)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'node_id class_id'");
    if (static_cast<std::size_t>(node) >= labels.size())
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": node id out of range");
    labels[node] = static_cast<int>(cls);
    max_class = std::max(max_class, static_cast<int>(cls));
  }
  num_classes = max_class + 1;
}

inline void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open label file for writing: " + path);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out << i << ' ' << labels[i] << '\n';
  if (!out) throw IoError("failed writing label file: " + path);
}

// -- split files ------------------------------------------------------------------

// One "node_id train|val|test" line per assigned node.
inline SplitMasks read_split_file(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split file: " + path);
  SplitMasks masks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = detail::strip_line(line);
    if (s.empty()) continue;
    std::istringstream iss(s);
    long long node = -1;
    std::string which;
    if (!(iss >> node >> which) || node < 0)
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'node_id train|val|test'");
    if (static_cast<std::size_t>(node) >= n)
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": node id out of range");
    if (which == "train") masks.train.push_back(node);
    else if (which == "val") masks.val.push_back(node);
    else if (which == "test") masks.test.push_back(node);
    else
      throw ParseError(path + ":" + std::to_string(line_no) + ": unknown split '" +
                       which + "'");
  }
  std::sort(masks.train.begin(), masks.train.end());
  std::sort(masks.val.begin(), masks.val.end());
  std::sort(masks.test.begin(), masks.test.end());
  return masks;
}

inline void write_split_file(const std::string& path, const SplitMasks& masks) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open split file for writing: " + path);
  for (std::size_t i : masks.train) out << i << " train\n";
  for (std::size_t i : masks.val) out << i << " val\n";
  for (std::size_t i : masks.test) out << i << " test\n";
  if (!out) throw IoError("failed writing split file: " + path);
}

// -- dataset loading -----------------------------------------------------------------

struct DatasetPaths {
  std::string edges, features, labels;
};

inline Graph load_dataset(const DatasetPaths& paths) {
  Graph g;
  g.attributes = read_dense_matrix(paths.features);
  g.n = g.attributes.rows();
  if (g.n == 0) throw ValidationError(paths.features + ": empty attribute matrix");
  auto edges = read_edge_list(paths.edges);
  for (auto [u, v] : edges)
    if (u >= g.n || v >= g.n)
      throw ValidationError(paths.edges + ": edge endpoint out of range (n=" +
                            std::to_string(g.n) + ")");
  g.adjacency = SparseMatrix::from_edges(g.n, edges);
  g.labels.assign(g.n, -1);
  read_labels_into(paths.labels, g.labels, g.num_classes);
  g.validate();
  return g;
}

// Conventional layout: <data_dir>/<name>/{edges.tsv,features.txt,labels.txt}.
inline Graph load_dataset(const std::string& name, const std::string& data_dir) {
  const std::string base = data_dir + "/" + name + "/";
  return load_dataset(DatasetPaths{base + "edges.tsv", base + "features.txt",
                                   base + "labels.txt"});
}

// -- synthetic graphs ------------------------------------------------------------------

enum class CorrelationMode { attributes, topology, both };

inline std::string to_string(CorrelationMode m) {
  switch (m) {
    case CorrelationMode::attributes: return "attributes";
    case CorrelationMode::topology: return "topology";
    default: return "both";
  }
}

// Planted-partition graph with per-class Gaussian attributes. In
// `topology` mode the attributes come from one class-independent Gaussian
// (centers collapse); otherwise class c's center is center_distance along
// basis direction c.
struct SyntheticSpec {
  std::size_t n_per_class = 30;
  int num_classes = 3;
  double p_intra = 0.03;
  double p_inter = 0.01;
  std::size_t attr_dim = 50;
  double center_distance = 3.0;
  double cov_scale = 1.0;
  CorrelationMode mode = CorrelationMode::both;

  void validate() const {
    if (n_per_class < 1) throw ConfigError("SyntheticSpec: n_per_class must be >= 1");
    if (num_classes < 1) throw ConfigError("SyntheticSpec: num_classes must be >= 1");
    if (p_intra < 0.0 || p_intra > 1.0 || p_inter < 0.0 || p_inter > 1.0)
      throw ConfigError("SyntheticSpec: probabilities must be in [0,1]");
    if (mode != CorrelationMode::topology &&
        static_cast<std::size_t>(num_classes) > attr_dim)
      throw ConfigError("SyntheticSpec: attr_dim must be >= num_classes");
    if (cov_scale < 0.0) throw ConfigError("SyntheticSpec: cov_scale must be >= 0");
  }
};

inline Graph generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  Graph g;
  g.n = spec.n_per_class * static_cast<std::size_t>(spec.num_classes);
  g.num_classes = spec.num_classes;
  g.labels.resize(g.n);
  for (std::size_t i = 0; i < g.n; ++i)
    g.labels[i] = static_cast<int>(i / spec.n_per_class);

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < g.n; ++u) {
    for (std::size_t v = u + 1; v < g.n; ++v) {
      const double p = g.labels[u] == g.labels[v] ? spec.p_intra : spec.p_inter;
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  g.adjacency = SparseMatrix::from_edges(g.n, edges);

  const double sigma = std::sqrt(spec.cov_scale);
  g.attributes = DenseMatrix(g.n, spec.attr_dim);
  for (std::size_t i = 0; i < g.n; ++i) {
    const auto c = static_cast<std::size_t>(g.labels[i]);
    for (std::size_t j = 0; j < spec.attr_dim; ++j) {
      double center = 0.0;
      if (spec.mode != CorrelationMode::topology && j == c)
        center = spec.center_distance;
      g.attributes(i, j) = center + sigma * rng.normal();
    }
  }
  g.validate();
  return g;
}

}  // namespace gda
