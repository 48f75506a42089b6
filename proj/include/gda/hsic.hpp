#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gda/common.hpp"
#include "gda/matrix.hpp"
#include "gda/rng.hpp"
#include "gda/tape.hpp"

namespace gda {

namespace detail {
// Lexicographic order on (rows, cols, data); picks a canonical operand order
// so hsic_pair(a, b) runs the very same float operations as hsic_pair(b, a).
inline bool matrix_less(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return a.data()[i] < b.data()[i];
  return false;
}
}  // namespace detail

// HSIC with the inner-product kernel:
//   HSIC(Z_i, Z_j) = (n-1)^{-2} tr(K_i H K_j H),  K = Z Zᵀ,  H = I - n⁻¹eeᵀ.
// Since H is a symmetric idempotent projector, tr(K_i H K_j H) equals
// ‖(H Z_i)ᵀ (H Z_j)‖²_F, which is what gets computed: O(n·h²) instead of
// O(n²·h). Nonnegative up to roundoff; exactly symmetric in its arguments.
inline double hsic_pair(const DenseMatrix& zi, const DenseMatrix& zj) {
  if (zi.rows() != zj.rows()) throw ShapeError("hsic_pair: row counts differ");
  const std::size_t n = zi.rows();
  if (n < 2) throw ContractError("hsic_pair: need at least 2 rows");
  const DenseMatrix& a = detail::matrix_less(zj, zi) ? zj : zi;
  const DenseMatrix& b = detail::matrix_less(zj, zi) ? zi : zj;
  DenseMatrix m = matmul_tn(center_columns(a), center_columns(b));
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  return frobenius_norm_sq(m) / denom;
}

inline Tape::ValueId hsic_pair_tape(Tape& tape, Tape::ValueId zi, Tape::ValueId zj) {
  const std::size_t n = tape.value(zi).rows();
  if (tape.value(zj).rows() != n) throw ShapeError("hsic_pair: row counts differ");
  if (n < 2) throw ContractError("hsic_pair: need at least 2 rows");
  Tape::ValueId ci = tape.center_columns(zi);
  Tape::ValueId cj = tape.center_columns(zj);
  Tape::ValueId m = tape.matmul(tape.transpose(ci), cj);
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  return tape.scale(tape.frobenius_norm_sq(m), 1.0 / denom);
}

// Unordered channel-index pairs (i < j), distinct within one sample.
struct PairSample {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

inline std::size_t all_pair_count(std::size_t channels) {
  return channels * (channels - 1) / 2;
}

// Draws t distinct unordered pairs uniformly without replacement.
inline PairSample sample_pairs(std::size_t t, Rng& rng, std::size_t channels = 9) {
  const std::size_t total = all_pair_count(channels);
  if (t < 1 || t > total)
    throw ConfigError("sample_pairs: t must be in [1, " + std::to_string(total) +
                      "], got " + std::to_string(t));
  std::vector<std::pair<std::size_t, std::size_t>> all;
  all.reserve(total);
  for (std::size_t i = 0; i < channels; ++i)
    for (std::size_t j = i + 1; j < channels; ++j) all.emplace_back(i, j);
  // Partial Fisher-Yates: the first t slots end up uniform without replacement.
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t pick = k + rng.index(total - k);
    std::swap(all[k], all[pick]);
  }
  all.resize(t);
  PairSample s;
  s.pairs = std::move(all);
  return s;
}

// Sum of HSIC over the sampled pairs (empty sample → 0).
inline double disparity_loss(const std::vector<DenseMatrix>& z, const PairSample& sample) {
  double total = 0.0;
  for (auto [i, j] : sample.pairs) {
    if (i >= z.size() || j >= z.size())
      throw ContractError("disparity_loss: pair index out of range");
    total += hsic_pair(z[i], z[j]);
  }
  return total;
}

inline Tape::ValueId disparity_loss_tape(Tape& tape, const std::vector<Tape::ValueId>& z,
                                         const PairSample& sample) {
  if (sample.pairs.empty()) return tape.constant(DenseMatrix(1, 1, 0.0));
  Tape::ValueId total = 0;
  bool first = true;
  for (auto [i, j] : sample.pairs) {
    if (i >= z.size() || j >= z.size())
      throw ContractError("disparity_loss: pair index out of range");
    Tape::ValueId h = hsic_pair_tape(tape, z[i], z[j]);
    total = first ? h : tape.add(total, h);
    first = false;
  }
  return total;
}

// Mean HSIC over all unordered pairs; the convergence-time diversity metric.
inline double mean_pairwise_hsic(const std::vector<DenseMatrix>& z) {
  if (z.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) total += hsic_pair(z[i], z[j]);
  return total / static_cast<double>(all_pair_count(z.size()));
}

}  // namespace gda
