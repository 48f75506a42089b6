#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "gda/common.hpp"
#include "gda/gcn.hpp"
#include "gda/matrix.hpp"
#include "gda/rng.hpp"
#include "gda/tape.hpp"

namespace gda {

// Per-channel transform (W_i, b_i) plus one query vector q shared by all
// channels: ω_i = qᵀ tanh(W_i Z_iᵀ + b_i).
struct AttentionParams {
  std::vector<DenseMatrix> w;  // channel count × (h_att × h2)
  std::vector<DenseMatrix> b;  // channel count × (1 × h_att)
  DenseMatrix q;               // h_att × 1
};

inline AttentionParams init_attention(std::size_t channels, std::size_t h_att,
                                      std::size_t h2, Rng& rng) {
  AttentionParams p;
  p.w.reserve(channels);
  p.b.reserve(channels);
  for (std::size_t i = 0; i < channels; ++i) {
    p.w.push_back(glorot_uniform(h_att, h2, rng));
    p.b.emplace_back(1, h_att);  // biases start at zero
  }
  p.q = glorot_uniform(h_att, 1, rng);
  return p;
}

// Raw (pre-softmax) attention scores, one column per channel. Computed as
// tanh(Z_i W_iᵀ + 1·b_i)·q, the row-major transposition of the defining form.
inline DenseMatrix attention_scores(const AttentionParams& params,
                                    const std::vector<DenseMatrix>& z) {
  if (z.empty() || params.w.size() != z.size() || params.b.size() != z.size())
    throw ShapeError("attention_scores: channel count mismatch");
  const std::size_t n = z[0].rows();
  DenseMatrix scores(n, z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i].rows() != n) throw ShapeError("attention_scores: embedding rows differ");
    DenseMatrix t = tanh_elementwise(
        add_row_broadcast(matmul_nt(z[i], params.w[i]), params.b[i]));
    DenseMatrix s = matmul(t, params.q);  // n × 1
    for (std::size_t r = 0; r < n; ++r) scores(r, i) = s(r, 0);
  }
  return scores;
}

struct ChannelAttentionStats {
  double mean = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0;
};

// Per-node fused weights and their per-channel distribution summary.
struct AttentionReport {
  DenseMatrix alpha;  // n × channels, rows sum to 1
  std::vector<ChannelAttentionStats> stats;
};

namespace detail {
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}
}  // namespace detail

inline AttentionReport make_attention_report(const DenseMatrix& alpha) {
  AttentionReport report;
  report.alpha = alpha;
  report.stats.resize(alpha.cols());
  std::vector<double> col(alpha.rows());
  for (std::size_t j = 0; j < alpha.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < alpha.rows(); ++i) {
      col[i] = alpha(i, j);
      mean += col[i];
    }
    std::sort(col.begin(), col.end());
    auto& s = report.stats[j];
    s.mean = alpha.rows() ? mean / static_cast<double>(alpha.rows()) : 0.0;
    s.q1 = detail::quantile_sorted(col, 0.25);
    s.median = detail::quantile_sorted(col, 0.5);
    s.q3 = detail::quantile_sorted(col, 0.75);
  }
  return report;
}

// Row-softmax of the scores, then Z_final[j,:] = Σ_i α[j,i]·Z_i[j,:].
inline std::pair<DenseMatrix, AttentionReport> fuse(const DenseMatrix& scores,
                                                    const std::vector<DenseMatrix>& z) {
  if (scores.cols() != z.size()) throw ShapeError("fuse: score/channel count mismatch");
  DenseMatrix alpha = softmax_rows(scores);
  const std::size_t n = scores.rows();
  DenseMatrix fused(n, z[0].cols());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i].rows() != n || z[i].cols() != fused.cols())
      throw ShapeError("fuse: embedding shape mismatch");
    for (std::size_t r = 0; r < n; ++r) {
      const double a = alpha(r, i);
      const double* src = z[i].data() + r * fused.cols();
      double* dst = fused.data() + r * fused.cols();
      for (std::size_t c = 0; c < fused.cols(); ++c) dst[c] += a * src[c];
    }
  }
  return {std::move(fused), make_attention_report(alpha)};
}

// -- tape builders ----------------------------------------------------------

struct AttentionIds {
  std::vector<Tape::ValueId> w, b;
  Tape::ValueId q;
};

inline Tape::ValueId attention_scores_tape(Tape& tape, const AttentionIds& ids,
                                           const std::vector<Tape::ValueId>& z) {
  if (ids.w.size() != z.size() || ids.b.size() != z.size())
    throw ShapeError("attention_scores_tape: channel count mismatch");
  std::vector<Tape::ValueId> cols;
  cols.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    Tape::ValueId t = tape.tanh(tape.add_row_broadcast(
        tape.matmul(z[i], tape.transpose(ids.w[i])), ids.b[i]));
    cols.push_back(tape.matmul(t, ids.q));
  }
  return tape.hstack(cols);
}

struct FuseIds {
  Tape::ValueId alpha, fused;
};

inline FuseIds fuse_tape(Tape& tape, Tape::ValueId scores,
                         const std::vector<Tape::ValueId>& z) {
  Tape::ValueId alpha = tape.softmax_rows(scores);
  Tape::ValueId fused = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    Tape::ValueId weighted = tape.scale_rows(z[i], tape.column(alpha, i));
    fused = (i == 0) ? weighted : tape.add(fused, weighted);
  }
  return {alpha, fused};
}

}  // namespace gda
