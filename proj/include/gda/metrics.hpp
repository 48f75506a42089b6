#pragma once

#include <cstddef>
#include <vector>

#include "gda/common.hpp"
#include "gda/matrix.hpp"

namespace gda {

struct ClassStats {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MetricsRecord {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassStats> per_class;
  std::size_t n_eval = 0;
};

// Argmax per row; ties go to the lower class index.
inline std::vector<int> argmax_rows(const DenseMatrix& m) {
  std::vector<int> out(m.rows(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double best = m(i, 0);
    int arg = 0;
    for (std::size_t j = 1; j < m.cols(); ++j) {
      if (m(i, j) > best) {
        best = m(i, j);
        arg = static_cast<int>(j);
      }
    }
    out[i] = arg;
  }
  return out;
}

// Accuracy and macro-F1 over the masked nodes. A class with neither
// predicted nor true positives contributes F1 = 0 to the macro average.
inline MetricsRecord compute_metrics(const DenseMatrix& y_hat,
                                     const std::vector<int>& labels,
                                     const std::vector<std::size_t>& mask) {
  if (mask.empty()) throw ContractError("compute_metrics: empty mask");
  if (labels.size() != y_hat.rows())
    throw ShapeError("compute_metrics: labels/rows mismatch");
  const std::size_t num_classes = y_hat.cols();
  std::vector<int> pred = argmax_rows(y_hat);
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i : mask) {
    const int truth = labels[i];
    if (truth < 0 || static_cast<std::size_t>(truth) >= num_classes)
      throw ContractError("compute_metrics: masked node lacks a valid label");
    if (pred[i] == truth) {
      ++correct;
      ++tp[truth];
    } else {
      ++fp[pred[i]];
      ++fn[truth];
    }
  }
  MetricsRecord rec;
  rec.n_eval = mask.size();
  rec.accuracy = static_cast<double>(correct) / static_cast<double>(mask.size());
  rec.per_class.resize(num_classes);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& s = rec.per_class[c];
    const double p_den = static_cast<double>(tp[c] + fp[c]);
    const double r_den = static_cast<double>(tp[c] + fn[c]);
    s.precision = p_den > 0.0 ? static_cast<double>(tp[c]) / p_den : 0.0;
    s.recall = r_den > 0.0 ? static_cast<double>(tp[c]) / r_den : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    f1_sum += s.f1;
  }
  rec.macro_f1 = f1_sum / static_cast<double>(num_classes);
  return rec;
}

}  // namespace gda
