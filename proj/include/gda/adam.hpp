#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gda/common.hpp"
#include "gda/matrix.hpp"

namespace gda {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

// Bias-corrected adaptive-moment optimizer over a fixed list of parameter
// matrices. Weight decay is decoupled: the moments see the raw gradient and
// lr·wd·param is added to the update. Single-writer.
class AdamState {
 public:
  AdamState(AdamConfig cfg, const std::vector<const DenseMatrix*>& params)
      : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const DenseMatrix* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  }

  const AdamConfig& config() const { return cfg_; }
  long step_count() const { return step_; }

  void step(const std::vector<DenseMatrix*>& params,
            const std::vector<const DenseMatrix*>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
      throw ShapeError("adam_step: parameter list size mismatch");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      DenseMatrix& p = *params[k];
      const DenseMatrix& g = *grads[k];
      DenseMatrix& m = m_[k];
      DenseMatrix& v = v_[k];
      if (!p.same_shape(m) || !g.same_shape(m))
        throw ShapeError("adam_step: shape mismatch with optimizer state");
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double gi = g.data()[i];
        m.data()[i] = cfg_.beta1 * m.data()[i] + (1.0 - cfg_.beta1) * gi;
        v.data()[i] = cfg_.beta2 * v.data()[i] + (1.0 - cfg_.beta2) * gi * gi;
        const double m_hat = m.data()[i] / bc1;
        const double v_hat = v.data()[i] / bc2;
        p.data()[i] -= cfg_.lr * (m_hat / (std::sqrt(v_hat) + cfg_.epsilon) +
                                  cfg_.weight_decay * p.data()[i]);
      }
    }
  }

 private:
  AdamConfig cfg_;
  long step_ = 0;
  std::vector<DenseMatrix> m_, v_;
};

inline void adam_step(AdamState& state, const std::vector<DenseMatrix*>& params,
                      const std::vector<const DenseMatrix*>& grads) {
  state.step(params, grads);
}

}  // namespace gda
