#pragma once

#include <cmath>
#include <cstddef>
#include <memory>

#include "gda/augmentation.hpp"
#include "gda/common.hpp"
#include "gda/matrix.hpp"
#include "gda/rng.hpp"
#include "gda/tape.hpp"

namespace gda {

// Weights of one 2-layer channel encoder. Channels never share parameters.
struct GcnChannelParams {
  int channel_index = 0;
  DenseMatrix w0;  // in_dim × h1
  DenseMatrix w1;  // h1 × h2
};

// Glorot-uniform: U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
inline DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

inline GcnChannelParams init_channel(std::size_t in_dim, std::size_t h1,
                                     std::size_t h2, Rng& rng, int channel_index = 0) {
  if (in_dim == 0 || h1 == 0 || h2 == 0)
    throw ConfigError("init_channel: dimensions must be positive");
  GcnChannelParams p;
  p.channel_index = channel_index;
  p.w0 = glorot_uniform(in_dim, h1, rng);
  p.w1 = glorot_uniform(h1, h2, rng);
  return p;
}

// Tape-level forward for one channel:
//   Z = Â · relu(Â · drop(attrs) · W0) · W1
// The attribute input arrives pre-dropped (it is a constant; its gradient is
// never needed), the hidden dropout lives on the tape. In eval mode no
// dropout is applied and the factored attribute form is used when available.
struct ChannelForwardIds {
  Tape::ValueId w0, w1, z;
};

inline ChannelForwardIds channel_forward_tape(
    Tape& tape, Tape::ValueId w0, Tape::ValueId w1,
    std::shared_ptr<const SparseMatrix> a_hat, const AttrBundle& attrs, Mode mode,
    double dropout_p, Rng* rng, bool relu_last = false) {
  Tape::ValueId p0;
  if (mode == Mode::train && dropout_p > 0.0) {
    if (rng == nullptr) throw ContractError("channel_forward: train mode needs an rng");
    if (attrs.csr) {
      auto dropped = std::make_shared<SparseMatrix>(dropout(*attrs.csr, dropout_p, *rng));
      p0 = tape.matmul(std::move(dropped), w0);
    } else {
      Tape::ValueId xd = tape.constant(dropout(*attrs.dense, dropout_p, *rng));
      p0 = tape.matmul(xd, w0);
    }
  } else if (attrs.factor_left) {
    Tape::ValueId inner = tape.matmul(attrs.factor_right_t, w0);
    p0 = tape.matmul(attrs.factor_left, inner);
  } else if (attrs.csr) {
    p0 = tape.matmul(attrs.csr, w0);
  } else {
    p0 = tape.matmul(tape.constant(*attrs.dense), w0);
  }
  Tape::ValueId hidden = tape.relu(tape.matmul(a_hat, p0));
  if (mode == Mode::train && dropout_p > 0.0) hidden = tape.dropout(hidden, dropout_p, *rng);
  Tape::ValueId z = tape.matmul(a_hat, tape.matmul(hidden, w1));
  if (relu_last) z = tape.relu(z);
  return {w0, w1, z};
}

// Matrix-level forward (spec surface). Train mode consumes `rng` for the two
// dropout draws; eval mode is deterministic.
inline DenseMatrix channel_forward(const GcnChannelParams& params,
                                   const SparseMatrix& a_hat, const DenseMatrix& attrs,
                                   Mode mode, double dropout_p = 0.5, Rng* rng = nullptr,
                                   bool relu_last = false) {
  if (a_hat.rows() != a_hat.cols() || a_hat.rows() != attrs.rows())
    throw ShapeError("channel_forward: adjacency/attribute row mismatch");
  if (attrs.cols() != params.w0.rows())
    throw ShapeError("channel_forward: attribute width does not match W0");
  Tape tape;
  AttrBundle bundle;
  bundle.dense = std::make_shared<DenseMatrix>(attrs);
  bundle.in_dim = attrs.cols();
  auto a = std::make_shared<const SparseMatrix>(a_hat);
  ChannelForwardIds ids =
      channel_forward_tape(tape, tape.constant(params.w0), tape.constant(params.w1), a,
                           bundle, mode, dropout_p, rng, relu_last);
  DenseMatrix z = tape.value(ids.z);
  require_finite(z, "channel_forward output");
  return z;
}

}  // namespace gda
