#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gda/common.hpp"
#include "gda/matrix.hpp"

namespace gda {

// Define-by-run reverse-mode differentiation over matrix-valued nodes.
// Operations append nodes in topological order; backward() replays local
// adjoint rules in reverse creation order. Scalars are 1×1 matrices.
//
// Single-writer: a Tape must not be mutated from multiple threads.
class Tape {
 public:
  using ValueId = std::size_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  ValueId constant(DenseMatrix v) { return push(std::move(v), false, {}); }

  // Tracked leaf; its gradient is retained by backward().
  ValueId parameter(const DenseMatrix& v) {
    ValueId id = push(v, true, {});
    nodes_[id].is_parameter = true;
    return id;
  }

  const DenseMatrix& value(ValueId id) const { return nodes_[id].value; }

  // Gradient of the last backward() target w.r.t. node `id`. Zero matrix for
  // nodes the loss does not depend on (including constants).
  DenseMatrix grad(ValueId id) const {
    const Node& n = nodes_[id];
    if (n.grad.empty()) return DenseMatrix(n.value.rows(), n.value.cols());
    return n.grad;
  }

  // Moves a parameter gradient out of the tape (shape-preserving for zeros).
  DenseMatrix take_grad(ValueId id) {
    Node& n = nodes_[id];
    if (n.grad.empty()) return DenseMatrix(n.value.rows(), n.value.cols());
    return std::move(n.grad);
  }

  std::size_t node_count() const { return nodes_.size(); }

  // -- operations ----------------------------------------------------------

  ValueId matmul(ValueId a, ValueId b) {
    DenseMatrix v = gda::matmul(value(a), value(b));
    return push(std::move(v), needs(a) || needs(b), [this, a, b](const DenseMatrix& g) {
      if (needs(a)) accumulate(a, matmul_nt(g, value(b)));
      if (needs(b)) accumulate(b, matmul_tn(value(a), g));
    });
  }

  // Sparse constant × dense node. The sparse operand is never tracked.
  ValueId matmul(std::shared_ptr<const SparseMatrix> a, ValueId b) {
    DenseMatrix v = gda::matmul(*a, value(b));
    auto state = std::make_shared<SparseMatrix>();  // cached aᵀ, built on demand
    return push(std::move(v), needs(b), [this, a, state, b](const DenseMatrix& g) {
      if (!needs(b)) return;
      if (a->symmetric()) {
        accumulate(b, gda::matmul(*a, g));
        return;
      }
      if (state->rows() == 0 && a->nnz() > 0) *state = a->transposed();
      accumulate(b, gda::matmul(a->nnz() > 0 ? *state : *a, g));
    });
  }

  ValueId transpose(ValueId a) {
    return push(gda::transpose(value(a)), needs(a), [this, a](const DenseMatrix& g) {
      if (needs(a)) accumulate(a, gda::transpose(g));
    });
  }

  ValueId add(ValueId a, ValueId b) {
    return push(gda::add(value(a), value(b)), needs(a) || needs(b),
                [this, a, b](const DenseMatrix& g) {
                  if (needs(a)) accumulate(a, g);
                  if (needs(b)) accumulate(b, g);
                });
  }

  ValueId add_row_broadcast(ValueId a, ValueId row) {
    return push(gda::add_row_broadcast(value(a), value(row)), needs(a) || needs(row),
                [this, a, row](const DenseMatrix& g) {
                  if (needs(a)) accumulate(a, g);
                  if (needs(row)) {
                    DenseMatrix col_sums(1, g.cols());
                    for (std::size_t i = 0; i < g.rows(); ++i)
                      for (std::size_t j = 0; j < g.cols(); ++j)
                        col_sums(0, j) += g(i, j);
                    accumulate(row, std::move(col_sums));
                  }
                });
  }

  ValueId relu(ValueId a) {
    return push(gda::relu(value(a)), needs(a), [this, a](const DenseMatrix& g) {
      if (!needs(a)) return;
      DenseMatrix d = g;
      const DenseMatrix& x = value(a);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (x.data()[i] <= 0.0) d.data()[i] = 0.0;
      accumulate(a, std::move(d));
    });
  }

  ValueId tanh(ValueId a) {
    DenseMatrix v = tanh_elementwise(value(a));
    ValueId out = push(std::move(v), needs(a), {});
    nodes_[out].backward = [this, a, out](const DenseMatrix& g) {
      if (!needs(a)) return;
      DenseMatrix d = g;
      const DenseMatrix& y = value(out);
      for (std::size_t i = 0; i < d.size(); ++i)
        d.data()[i] *= 1.0 - y.data()[i] * y.data()[i];
      accumulate(a, std::move(d));
    };
    return out;
  }

  ValueId softmax_rows(ValueId a) {
    DenseMatrix v = gda::softmax_rows(value(a));
    ValueId out = push(std::move(v), needs(a), {});
    nodes_[out].backward = [this, a, out](const DenseMatrix& g) {
      if (!needs(a)) return;
      const DenseMatrix& y = value(out);
      DenseMatrix d(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) dot += g(i, j) * y(i, j);
        for (std::size_t j = 0; j < g.cols(); ++j)
          d(i, j) = y(i, j) * (g(i, j) - dot);
      }
      accumulate(a, std::move(d));
    };
    return out;
  }

  // Inverted dropout with the mask drawn at node creation.
  ValueId dropout(ValueId a, double p, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ContractError("Tape::dropout: p must be in [0,1)");
    const DenseMatrix& x = value(a);
    auto mask = std::make_shared<std::vector<double>>(x.size());
    const double keep_scale = 1.0 / (1.0 - p);
    for (auto& m : *mask) m = rng.bernoulli(p) ? 0.0 : keep_scale;
    DenseMatrix v = x;
    for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] *= (*mask)[i];
    return push(std::move(v), needs(a), [this, a, mask](const DenseMatrix& g) {
      if (!needs(a)) return;
      DenseMatrix d = g;
      for (std::size_t i = 0; i < d.size(); ++i) d.data()[i] *= (*mask)[i];
      accumulate(a, std::move(d));
    });
  }

  // Multiplies row j of `a` by col(j); `col` is an N×1 node.
  ValueId scale_rows(ValueId a, ValueId col) {
    const DenseMatrix& x = value(a);
    const DenseMatrix& c = value(col);
    if (c.rows() != x.rows() || c.cols() != 1)
      throw ShapeError("scale_rows: need an N×1 scaling column");
    DenseMatrix v = x;
    for (std::size_t i = 0; i < v.rows(); ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) v(i, j) *= c(i, 0);
    return push(std::move(v), needs(a) || needs(col),
                [this, a, col](const DenseMatrix& g) {
                  const DenseMatrix& x = value(a);
                  const DenseMatrix& c = value(col);
                  if (needs(a)) {
                    DenseMatrix d = g;
                    for (std::size_t i = 0; i < d.rows(); ++i)
                      for (std::size_t j = 0; j < d.cols(); ++j) d(i, j) *= c(i, 0);
                    accumulate(a, std::move(d));
                  }
                  if (needs(col)) {
                    DenseMatrix d(c.rows(), 1);
                    for (std::size_t i = 0; i < g.rows(); ++i) {
                      double s = 0.0;
                      for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * x(i, j);
                      d(i, 0) = s;
                    }
                    accumulate(col, std::move(d));
                  }
                });
  }

  ValueId column(ValueId a, std::size_t j) {
    const DenseMatrix& x = value(a);
    if (j >= x.cols()) throw ShapeError("column: index out of range");
    DenseMatrix v(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) v(i, 0) = x(i, j);
    return push(std::move(v), needs(a), [this, a, j](const DenseMatrix& g) {
      if (!needs(a)) return;
      const DenseMatrix& x = value(a);
      DenseMatrix d(x.rows(), x.cols());
      for (std::size_t i = 0; i < x.rows(); ++i) d(i, j) = g(i, 0);
      accumulate(a, std::move(d));
    });
  }

  // Concatenates N×1 columns into an N×k matrix.
  ValueId hstack(const std::vector<ValueId>& cols) {
    if (cols.empty()) throw ContractError("hstack: no columns");
    const std::size_t n = value(cols[0]).rows();
    DenseMatrix v(n, cols.size());
    bool any = false;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const DenseMatrix& c = value(cols[j]);
      if (c.rows() != n || c.cols() != 1) throw ShapeError("hstack: need N×1 columns");
      for (std::size_t i = 0; i < n; ++i) v(i, j) = c(i, 0);
      any = any || needs(cols[j]);
    }
    return push(std::move(v), any, [this, cols](const DenseMatrix& g) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (!needs(cols[j])) continue;
        DenseMatrix d(g.rows(), 1);
        for (std::size_t i = 0; i < g.rows(); ++i) d(i, 0) = g(i, j);
        accumulate(cols[j], std::move(d));
      }
    });
  }

  ValueId center_columns(ValueId a) {
    return push(gda::center_columns(value(a)), needs(a),
                [this, a](const DenseMatrix& g) {
                  if (needs(a)) accumulate(a, gda::center_columns(g));
                });
  }

  ValueId frobenius_norm_sq(ValueId a) {
    DenseMatrix v(1, 1);
    v(0, 0) = gda::frobenius_norm_sq(value(a));
    return push(std::move(v), needs(a), [this, a](const DenseMatrix& g) {
      if (!needs(a)) return;
      accumulate(a, gda::scale(value(a), 2.0 * g(0, 0)));
    });
  }

  ValueId frobenius_dot(ValueId a, ValueId b) {
    DenseMatrix v(1, 1);
    v(0, 0) = gda::frobenius_dot(value(a), value(b));
    return push(std::move(v), needs(a) || needs(b),
                [this, a, b](const DenseMatrix& g) {
                  if (needs(a)) accumulate(a, gda::scale(value(b), g(0, 0)));
                  if (needs(b)) accumulate(b, gda::scale(value(a), g(0, 0)));
                });
  }

  ValueId sum_all(ValueId a) {
    DenseMatrix v(1, 1);
    v(0, 0) = gda::sum(value(a));
    return push(std::move(v), needs(a), [this, a](const DenseMatrix& g) {
      if (!needs(a)) return;
      const DenseMatrix& x = value(a);
      accumulate(a, DenseMatrix(x.rows(), x.cols(), g(0, 0)));
    });
  }

  ValueId scale(ValueId a, double s) {
    return push(gda::scale(value(a), s), needs(a), [this, a, s](const DenseMatrix& g) {
      if (needs(a)) accumulate(a, gda::scale(g, s));
    });
  }

  // Negative log-likelihood summed over `mask` rows of a row-stochastic
  // matrix; probabilities are clamped at `clamp` before the log.
  ValueId masked_nll(ValueId probs, std::vector<int> labels,
                     std::vector<std::size_t> mask, double clamp = 1e-12) {
    const DenseMatrix& y = value(probs);
    auto lab = std::make_shared<std::vector<int>>(std::move(labels));
    auto msk = std::make_shared<std::vector<std::size_t>>(std::move(mask));
    if (lab->size() != y.rows()) throw ShapeError("masked_nll: labels/rows mismatch");
    double loss = 0.0;
    for (std::size_t i : *msk) {
      const int c = (*lab)[i];
      if (c < 0 || static_cast<std::size_t>(c) >= y.cols())
        throw ContractError("masked_nll: masked node without valid label");
      loss -= std::log(std::max(y(i, static_cast<std::size_t>(c)), clamp));
    }
    DenseMatrix v(1, 1);
    v(0, 0) = loss;
    return push(std::move(v), needs(probs),
                [this, probs, lab, msk, clamp](const DenseMatrix& g) {
                  if (!needs(probs)) return;
                  const DenseMatrix& y = value(probs);
                  DenseMatrix d(y.rows(), y.cols());
                  for (std::size_t i : *msk) {
                    const auto c = static_cast<std::size_t>((*lab)[i]);
                    d(i, c) = -g(0, 0) / std::max(y(i, c), clamp);
                  }
                  accumulate(probs, std::move(d));
                });
  }

  // -- reverse pass ---------------------------------------------------------

  // Reverse sweep. With release_graph set, every non-parameter node's value,
  // gradient, and closure are dropped once its adjoint has been propagated —
  // after that only parameter gradients remain readable. Training uses this;
  // the peak footprint then shrinks as the sweep walks back.
  void backward(ValueId loss, bool release_graph = false) {
    const DenseMatrix& l = value(loss);
    if (l.rows() != 1 || l.cols() != 1)
      throw ContractError("backward: loss must be a 1×1 scalar");
    for (auto& n : nodes_) n.grad = DenseMatrix();
    nodes_[loss].grad = DenseMatrix(1, 1, 1.0);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      Node& n = nodes_[i];
      if (n.backward && !n.grad.empty()) n.backward(n.grad);
      if (release_graph && !n.is_parameter) {
        n.value = DenseMatrix();
        n.grad = DenseMatrix();
        n.backward = nullptr;
      }
    }
  }

 private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;  // empty until touched by backward
    bool needs_grad = false;
    bool is_parameter = false;
    std::function<void(const DenseMatrix&)> backward;
  };

  bool needs(ValueId id) const { return nodes_[id].needs_grad; }

  ValueId push(DenseMatrix v, bool needs_grad,
               std::function<void(const DenseMatrix&)> backward) {
    nodes_.push_back(
        Node{std::move(v), DenseMatrix(), needs_grad, false, std::move(backward)});
    return nodes_.size() - 1;
  }

  void accumulate(ValueId id, DenseMatrix g) {
    Node& n = nodes_[id];
    if (n.grad.empty()) {
      n.grad = std::move(g);
      return;
    }
    if (!n.grad.same_shape(g)) throw ShapeError("gradient accumulation shape mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) n.grad.data()[i] += g.data()[i];
  }

  std::vector<Node> nodes_;
};

}  // namespace gda
