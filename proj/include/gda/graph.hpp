#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gda/common.hpp"
#include "gda/matrix.hpp"
#include "gda/rng.hpp"

namespace gda {

// Undirected attributed graph with optional per-node labels (-1 = unlabeled).
// Immutable after construction.
struct Graph {
  std::size_t n = 0;
  SparseMatrix adjacency;   // symmetric, hollow, binary
  DenseMatrix attributes;   // n × d
  std::vector<int> labels;  // class id in [0, num_classes) or -1
  int num_classes = 0;

  void validate() const {
    if (n == 0) throw ValidationError("Graph: empty graph");
    if (adjacency.rows() != n || adjacency.cols() != n)
      throw ValidationError("Graph: adjacency must be n×n");
    if (attributes.rows() != n)
      throw ValidationError("Graph: attribute rows must equal node count");
    if (labels.size() != n) throw ValidationError("Graph: labels size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] >= num_classes)
        throw ValidationError("Graph: label out of range at node " + std::to_string(i));
      for (std::size_t j : adjacency.row_cols(i))
        if (j == i) throw ValidationError("Graph: self-loop at node " + std::to_string(i));
    }
  }
};

struct SplitMasks {
  std::vector<std::size_t> train, val, test;  // sorted, pairwise disjoint
};

// Renormalized propagation operator Â = D̃^{-1/2}(A + I)D̃^{-1/2}.
// Self-loop augmentation makes every degree positive, so no special cases.
inline SparseMatrix normalize_adjacency(const SparseMatrix& adj) {
  if (adj.rows() != adj.cols()) throw ShapeError("normalize_adjacency: square input required");
  const std::size_t n = adj.rows();
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = adj.row_cols(i);
    auto vals = adj.row_values(i);
    bool has_diag = false;
    double sum = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (vals[k] < 0.0) throw ContractError("normalize_adjacency: negative weight");
      if (cols[k] == i) has_diag = true;
      sum += vals[k];
    }
    degree[i] = sum + (has_diag ? 0.0 : 1.0);
  }
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(adj.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = adj.row_cols(i);
    auto vals = adj.row_values(i);
    bool has_diag = false;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      const double v = vals[k] + (j == i ? 1.0 : 0.0);
      if (j == i) has_diag = true;
      t.emplace_back(i, j, v * inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!has_diag) t.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
  }
  return SparseMatrix::from_triplets(n, n, std::move(t), /*symmetric=*/true);
}

// Samples labels_per_class training nodes from each class without
// replacement, then val/test uniformly from the remaining labeled nodes.
inline SplitMasks make_splits(const Graph& g, std::size_t labels_per_class,
                              std::size_t val_size, std::size_t test_size, Rng& rng) {
  if (g.num_classes <= 0) throw ConfigError("make_splits: graph has no classes");
  SplitMasks masks;
  std::vector<char> taken(g.n, 0);
  for (int c = 0; c < g.num_classes; ++c) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < g.n; ++i)
      if (g.labels[i] == c) candidates.push_back(i);
    if (candidates.size() < labels_per_class)
      throw ConfigError("make_splits: class " + std::to_string(c) + " has only " +
                        std::to_string(candidates.size()) + " labeled nodes, need " +
                        std::to_string(labels_per_class));
    rng.shuffle(candidates);
    for (std::size_t k = 0; k < labels_per_class; ++k) {
      masks.train.push_back(candidates[k]);
      taken[candidates[k]] = 1;
    }
  }
  std::vector<std::size_t> remainder;
  for (std::size_t i = 0; i < g.n; ++i)
    if (!taken[i] && g.labels[i] >= 0) remainder.push_back(i);
  if (remainder.size() < val_size + test_size)
    throw ConfigError("make_splits: not enough labeled nodes for val+test (" +
                      std::to_string(remainder.size()) + " left, need " +
                      std::to_string(val_size + test_size) + ")");
  rng.shuffle(remainder);
  masks.val.assign(remainder.begin(), remainder.begin() + val_size);
  masks.test.assign(remainder.begin() + val_size,
                    remainder.begin() + val_size + test_size);
  std::sort(masks.train.begin(), masks.train.end());
  std::sort(masks.val.begin(), masks.val.end());
  std::sort(masks.test.begin(), masks.test.end());
  return masks;
}

}  // namespace gda
