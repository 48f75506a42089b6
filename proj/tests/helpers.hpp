#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gda/gda.hpp"

// Test-only utilities: random instances, brute-force oracles, and the
// finite-difference gradient checker. Oracles here are deliberately naive and
// independent of the library's computation paths.
namespace oracle {

inline gda::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, gda::Rng& rng,
                                      double lo = -1.0, double hi = 1.0) {
  gda::DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// Erdős–Rényi adjacency, symmetric hollow binary.
inline gda::SparseMatrix random_adjacency(std::size_t n, double p, gda::Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  return gda::SparseMatrix::from_edges(n, edges);
}

inline gda::DenseMatrix naive_matmul(const gda::DenseMatrix& a,
                                     const gda::DenseMatrix& b) {
  gda::DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline gda::DenseMatrix naive_cosine(const gda::DenseMatrix& m) {
  const std::size_t n = m.rows();
  gda::DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double ni = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) ni += m(i, k) * m(i, k);
    ni = std::sqrt(ni);
    for (std::size_t j = 0; j < n; ++j) {
      double nj = 0.0, dot = 0.0;
      for (std::size_t k = 0; k < m.cols(); ++k) {
        nj += m(j, k) * m(j, k);
        dot += m(i, k) * m(j, k);
      }
      nj = std::sqrt(nj);
      if (ni == 0.0 || nj == 0.0) continue;
      out(i, j) = i == j ? 1.0 : std::clamp(dot / (ni * nj), -1.0, 1.0);
    }
  }
  return out;
}

// Eq. 9 evaluated literally: (n-1)^{-2} tr(K_i H K_j H) with explicit Gram
// and centering matrices.
inline double naive_hsic(const gda::DenseMatrix& zi, const gda::DenseMatrix& zj) {
  const std::size_t n = zi.rows();
  auto gram = [](const gda::DenseMatrix& z) {
    gda::DenseMatrix k(z.rows(), z.rows());
    for (std::size_t u = 0; u < z.rows(); ++u)
      for (std::size_t v = 0; v < z.rows(); ++v) {
        double dot = 0.0;
        for (std::size_t c = 0; c < z.cols(); ++c) dot += z(u, c) * z(v, c);
        k(u, v) = dot;
      }
    return k;
  };
  gda::DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
  gda::DenseMatrix ki = gram(zi), kj = gram(zj);
  gda::DenseMatrix m = naive_matmul(naive_matmul(naive_matmul(ki, h), kj), h);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
  const double d = static_cast<double>(n - 1);
  return trace / (d * d);
}

inline double rel_err(double analytic, double numeric) {
  const double scale = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

// Central finite differences against tape gradients. `build` must construct
// the scalar loss from the given parameter nodes; it is re-invoked for every
// probe, reading the current contents of `params`.
inline double check_gradients(
    std::vector<gda::DenseMatrix*> params,
    const std::function<gda::Tape::ValueId(gda::Tape&, const std::vector<gda::Tape::ValueId>&)>& build,
    double step = 1e-5) {
  auto run = [&](bool want_grads, std::vector<gda::DenseMatrix>* grads) {
    gda::Tape tape;
    std::vector<gda::Tape::ValueId> ids;
    ids.reserve(params.size());
    for (auto* p : params) ids.push_back(tape.parameter(*p));
    gda::Tape::ValueId loss = build(tape, ids);
    const double value = tape.value(loss)(0, 0);
    if (want_grads) {
      tape.backward(loss);
      grads->clear();
      for (auto id : ids) grads->push_back(tape.grad(id));
    }
    return value;
  };
  std::vector<gda::DenseMatrix> analytic;
  run(true, &analytic);
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->size(); ++i) {
      double& slot = params[p]->data()[i];
      const double saved = slot;
      slot = saved + step;
      const double up = run(false, nullptr);
      slot = saved - step;
      const double down = run(false, nullptr);
      slot = saved;
      const double numeric = (up - down) / (2.0 * step);
      worst = std::max(worst, rel_err(analytic[p].data()[i], numeric));
    }
  }
  return worst;
}

}  // namespace oracle
