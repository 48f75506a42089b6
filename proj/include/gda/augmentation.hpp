#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "gda/common.hpp"
#include "gda/graph.hpp"
#include "gda/matrix.hpp"

namespace gda {

// Adds an edge {i,j} wherever i and j are within two hops (A_ij = 1 or
// (A²)_ij ≥ 1). Binary, symmetric, hollow; the input edge set is contained
// in the output.
inline SparseMatrix high_order_adjacency(const SparseMatrix& adj) {
  if (adj.rows() != adj.cols()) throw ShapeError("high_order_adjacency: square input");
  const std::size_t n = adj.rows();
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (std::size_t j : adj.row_cols(i)) {
      if (j != i && !seen[j]) {
        seen[j] = 1;
        touched.push_back(j);
      }
      for (std::size_t k : adj.row_cols(j)) {
        if (k != i && !seen[k]) {
          seen[k] = 1;
          touched.push_back(k);
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t j : touched) {
      t.emplace_back(i, j, 1.0);
      seen[j] = 0;
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t), /*symmetric=*/true);
}

// Pairwise cosine similarities between rows. Zero rows get similarity 0 to
// everything, themselves included; nonzero rows get an exact unit diagonal.
// Entries are clamped to [-1, 1] against roundoff.
inline DenseMatrix cosine_cross(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  DenseMatrix g = gram(m);
  std::vector<double> inv_norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = g(i, i);
    if (sq > 0.0) inv_norm[i] = 1.0 / std::sqrt(sq);
  }
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (inv_norm[i] == 0.0) continue;
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (inv_norm[j] == 0.0) continue;
      const double v = std::clamp(g(i, j) * inv_norm[i] * inv_norm[j], -1.0, 1.0);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

inline DenseMatrix cosine_cross(const SparseMatrix& m) {
  return cosine_cross(m.to_dense());
}

// Indices of the k largest off-diagonal entries of one similarity row,
// ties broken toward the lower index.
inline std::vector<std::size_t> knn_row_topk(const DenseMatrix& sim, std::size_t row,
                                             std::size_t k) {
  const std::size_t n = sim.cols();
  std::vector<std::size_t> idx;
  idx.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    if (j != row) idx.push_back(j);
  const std::size_t take = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double va = sim(row, a), vb = sim(row, b);
                      if (va != vb) return va > vb;
                      return a < b;
                    });
  idx.resize(take);
  return idx;
}

// kNN graph from a similarity matrix: each row selects its k most similar
// peers (diagonal excluded), then the edge set is symmetrized by union.
inline SparseMatrix knn_binarize(const DenseMatrix& sim, std::size_t k) {
  if (sim.rows() != sim.cols()) throw ShapeError("knn_binarize: square input");
  const std::size_t n = sim.rows();
  if (k < 1 || k >= n)
    throw ConfigError("knn_binarize: k must satisfy 1 <= k < n, got k=" +
                      std::to_string(k) + " with n=" + std::to_string(n));
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : knn_row_topk(sim, i, k))
      edges.emplace_back(std::min(i, j), std::max(i, j));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return SparseMatrix::from_edges(n, edges);
}

// The six graph features of the augmentation pipeline.
struct FeatureSet {
  SparseMatrix a_high;  // two-hop densified adjacency (or the original)
  DenseMatrix x;        // original attributes
  DenseMatrix a_c;      // cosine_cross(a_high)
  DenseMatrix x_c;      // cosine_cross(x)
  SparseMatrix a_t;     // knn_binarize(a_c, k)
  SparseMatrix x_t;     // knn_binarize(x_c, k)
  std::size_t k = 0;
};

inline FeatureSet build_feature_set(const Graph& g, std::size_t k, bool densify = true) {
  FeatureSet fs;
  fs.k = k;
  fs.a_high = densify ? high_order_adjacency(g.adjacency) : g.adjacency;
  fs.x = g.attributes;
  fs.a_c = cosine_cross(fs.a_high);
  fs.x_c = cosine_cross(fs.x);
  fs.a_t = knn_binarize(fs.a_c, k);
  fs.x_t = knn_binarize(fs.x_c, k);
  return fs;
}

enum class AdjSource { a, a_t, x_t };
enum class AttrSource { x, a_c, x_c };

struct ChannelSpec {
  int index;  // 1..9, row-major over the combination table
  AdjSource adj;
  AttrSource attr;
};

inline constexpr std::array<ChannelSpec, 9> kChannelTable = {{
    {1, AdjSource::a, AttrSource::x},
    {2, AdjSource::a, AttrSource::a_c},
    {3, AdjSource::a, AttrSource::x_c},
    {4, AdjSource::a_t, AttrSource::x},
    {5, AdjSource::a_t, AttrSource::a_c},
    {6, AdjSource::a_t, AttrSource::x_c},
    {7, AdjSource::x_t, AttrSource::x},
    {8, AdjSource::x_t, AttrSource::a_c},
    {9, AdjSource::x_t, AttrSource::x_c},
}};

inline std::string channel_name(const ChannelSpec& spec) {
  static const char* adj_names[] = {"A", "A_T", "X_T"};
  static const char* attr_names[] = {"X", "A_C", "X_C"};
  return "G" + std::to_string(spec.index) + "(" +
         adj_names[static_cast<int>(spec.adj)] + "," +
         attr_names[static_cast<int>(spec.attr)] + ")";
}

// Attribute input of one channel. `dense` and `csr` are alternative storages
// of the same matrix (one is always present; both may be). When the matrix is
// a scaled cosine Gram, `factor_left`/`factor_right_t` hold sparse factors
// with attrs == factor_left · factor_right_tᵀ ... i.e. left × (right)ᵀ stored
// as (left, rightᵀ); eval-mode forwards use them to skip the N×N product.
struct AttrBundle {
  std::shared_ptr<const DenseMatrix> dense;
  std::shared_ptr<const SparseMatrix> csr;
  std::shared_ptr<const SparseMatrix> factor_left;
  std::shared_ptr<const SparseMatrix> factor_right_t;
  std::size_t in_dim = 0;

  DenseMatrix materialize() const {
    if (dense) return *dense;
    return csr->to_dense();
  }
};

struct ChannelInput {
  ChannelSpec spec;
  std::shared_ptr<const SparseMatrix> adjacency;  // normalized Â
  std::shared_ptr<const AttrBundle> attrs;
};

struct ChannelOptions {
  bool row_normalize = true;
  double csr_density_max = 0.15;  // keep a CSR mirror below this density
};

namespace detail {

// Sparse factor pair (L, Uᵀ) with L·Uᵀᵀ... L·(Uᵀ)ᵀ = row_scale·cosine(source):
// U = diag(1/‖row‖)·source, L = diag(row_scale)·U.
struct CosineFactors {
  SparseMatrix left;
  SparseMatrix right_t;
};

inline CosineFactors cosine_factors(const SparseMatrix& source,
                                    const std::vector<double>& row_scale) {
  const std::size_t n = source.rows();
  std::vector<double> inv_norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : source.row_values(i)) sq += v * v;
    if (sq > 0.0) inv_norm[i] = 1.0 / std::sqrt(sq);
  }
  std::vector<std::tuple<std::size_t, std::size_t, double>> u, l;
  u.reserve(source.nnz());
  l.reserve(source.nnz());
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = source.row_cols(i);
    auto vals = source.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double uv = vals[k] * inv_norm[i];
      u.emplace_back(i, cols[k], uv);
      l.emplace_back(i, cols[k], uv * row_scale[i]);
    }
  }
  CosineFactors f;
  f.right_t = SparseMatrix::from_triplets(n, source.cols(), std::move(u)).transposed();
  f.left = SparseMatrix::from_triplets(n, source.cols(), std::move(l));
  return f;
}

inline std::vector<double> l1_row_inv_sums(const DenseMatrix& m) {
  std::vector<double> s(m.rows(), 1.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (double v : m.row(i)) sum += std::abs(v);
    if (sum != 0.0) s[i] = 1.0 / sum;
  }
  return s;
}

inline std::shared_ptr<AttrBundle> make_attr_bundle(const DenseMatrix& raw,
                                                    const SparseMatrix* cosine_source,
                                                    const ChannelOptions& opt) {
  auto bundle = std::make_shared<AttrBundle>();
  bundle->in_dim = raw.cols();
  DenseMatrix normalized = opt.row_normalize ? row_l1_normalize(raw) : raw;
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < normalized.size(); ++i)
    if (normalized.data()[i] != 0.0) ++nnz;
  const double density =
      normalized.size() == 0 ? 0.0 : static_cast<double>(nnz) / normalized.size();
  if (density <= opt.csr_density_max) {
    bundle->csr = std::make_shared<SparseMatrix>(SparseMatrix::from_dense(normalized));
  } else {
    bundle->dense = std::make_shared<DenseMatrix>(std::move(normalized));
  }
  if (cosine_source != nullptr) {
    std::vector<double> row_scale =
        opt.row_normalize ? l1_row_inv_sums(raw) : std::vector<double>(raw.rows(), 1.0);
    CosineFactors f = cosine_factors(*cosine_source, row_scale);
    bundle->factor_left = std::make_shared<SparseMatrix>(std::move(f.left));
    bundle->factor_right_t = std::make_shared<SparseMatrix>(std::move(f.right_t));
  }
  return bundle;
}

}  // namespace detail

// Resolves the nine combination-table channels: adjacency sources pass
// through normalize_adjacency, attribute sources through L1 row
// normalization (when enabled). Deterministic in the FeatureSet.
inline std::array<ChannelInput, 9> enumerate_channels(const FeatureSet& fs,
                                                      const ChannelOptions& opt = {}) {
  auto adj_a = std::make_shared<const SparseMatrix>(normalize_adjacency(fs.a_high));
  auto adj_at = std::make_shared<const SparseMatrix>(normalize_adjacency(fs.a_t));
  auto adj_xt = std::make_shared<const SparseMatrix>(normalize_adjacency(fs.x_t));

  SparseMatrix x_sparse = SparseMatrix::from_dense(fs.x);
  auto attr_x = detail::make_attr_bundle(fs.x, nullptr, opt);
  auto attr_ac = detail::make_attr_bundle(fs.a_c, &fs.a_high, opt);
  auto attr_xc = detail::make_attr_bundle(fs.x_c, &x_sparse, opt);

  auto adj_for = [&](AdjSource s) {
    switch (s) {
      case AdjSource::a: return adj_a;
      case AdjSource::a_t: return adj_at;
      default: return adj_xt;
    }
  };
  auto attr_for = [&](AttrSource s) {
    switch (s) {
      case AttrSource::x: return attr_x;
      case AttrSource::a_c: return attr_ac;
      default: return attr_xc;
    }
  };

  std::array<ChannelInput, 9> channels;
  for (std::size_t i = 0; i < 9; ++i) {
    channels[i].spec = kChannelTable[i];
    channels[i].adjacency = adj_for(kChannelTable[i].adj);
    channels[i].attrs =
        std::shared_ptr<const AttrBundle>(attr_for(kChannelTable[i].attr));
  }
  return channels;
}

}  // namespace gda
