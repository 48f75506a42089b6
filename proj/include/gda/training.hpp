#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gda/adam.hpp"
#include "gda/attention.hpp"
#include "gda/augmentation.hpp"
#include "gda/common.hpp"
#include "gda/gcn.hpp"
#include "gda/graph.hpp"
#include "gda/hsic.hpp"
#include "gda/matrix.hpp"
#include "gda/metrics.hpp"
#include "gda/rng.hpp"
#include "gda/tape.hpp"

namespace gda {

struct TrainConfig {
  double lr = 5e-4;
  double weight_decay = 1e-4;
  double dropout = 0.5;
  std::size_t k = 4;
  std::size_t t = 8;          // sampled embedding pairs per step
  std::size_t h1 = 256;
  std::size_t h2 = 128;
  std::size_t h_att = 0;      // 0 -> h2
  double lambda = 0.01;       // disparity weight
  std::size_t max_epochs = 1000;
  std::size_t patience = 100;
  std::uint64_t seed = 0;
  int single_channel = 0;     // 0 = all nine; 1..9 = that channel only, attention bypassed
  bool densify = true;
  bool row_normalize = true;
  bool relu_last = false;

  std::size_t attention_dim() const { return h_att == 0 ? h2 : h_att; }

  void validate() const {
    if (lambda < 0.0) throw ConfigError("TrainConfig: lambda must be >= 0");
    if (max_epochs < 1) throw ConfigError("TrainConfig: max_epochs must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("TrainConfig: dropout in [0,1)");
    if (single_channel < 0 || single_channel > 9)
      throw ConfigError("TrainConfig: single_channel must be 0..9");
    if (h1 == 0 || h2 == 0) throw ConfigError("TrainConfig: hidden dims must be positive");
    if (t < 1 || t > all_pair_count(9)) throw ConfigError("TrainConfig: t must be 1..36");
  }
};

struct ModelParams {
  std::vector<GcnChannelParams> channels;  // nine encoders
  AttentionParams attention;
  DenseMatrix cls_w;  // num_classes × h2
  DenseMatrix cls_b;  // 1 × num_classes

  // Fixed traversal order; checkpoints and the optimizer both rely on it.
  template <typename F>
  void for_each_matrix(F&& f) {
    for (std::size_t i = 0; i < channels.size(); ++i) {
      f("channel" + std::to_string(i + 1) + ".w0", channels[i].w0);
      f("channel" + std::to_string(i + 1) + ".w1", channels[i].w1);
    }
    for (std::size_t i = 0; i < attention.w.size(); ++i) {
      f("attention" + std::to_string(i + 1) + ".w", attention.w[i]);
      f("attention" + std::to_string(i + 1) + ".b", attention.b[i]);
    }
    f("attention.q", attention.q);
    f("classifier.w", cls_w);
    f("classifier.b", cls_b);
  }
};

inline ModelParams init_model(const std::array<ChannelInput, 9>& channels,
                              std::size_t h1, std::size_t h2, std::size_t h_att,
                              int num_classes, Rng& rng) {
  ModelParams p;
  p.channels.reserve(9);
  for (int i = 0; i < 9; ++i)
    p.channels.push_back(init_channel(channels[i].attrs->in_dim, h1, h2, rng, i + 1));
  p.attention = init_attention(9, h_att, h2, rng);
  p.cls_w = glorot_uniform(num_classes, h2, rng);
  p.cls_b = DenseMatrix(1, num_classes);
  return p;
}

// softmax(Z·Wᵀ + b): class probabilities, rows summing to 1.
inline DenseMatrix classify(const DenseMatrix& z, const DenseMatrix& w,
                            const DenseMatrix& b) {
  if (w.cols() != z.cols()) throw ShapeError("classify: W width must match embedding");
  return softmax_rows(add_row_broadcast(matmul_nt(z, w), b));
}

// Negative log-likelihood summed (not averaged) over the masked nodes.
inline double cross_entropy(const DenseMatrix& y_hat, const std::vector<int>& labels,
                            const std::vector<std::size_t>& mask, double clamp = 1e-12) {
  if (labels.size() != y_hat.rows()) throw ShapeError("cross_entropy: labels/rows mismatch");
  double loss = 0.0;
  for (std::size_t i : mask) {
    const int c = labels[i];
    if (c < 0 || static_cast<std::size_t>(c) >= y_hat.cols())
      throw ContractError("cross_entropy: masked node lacks a valid label");
    loss -= std::log(std::max(y_hat(i, static_cast<std::size_t>(c)), clamp));
  }
  return loss;
}

// -- whole-model tape -------------------------------------------------------

struct ModelTapeIds {
  static constexpr Tape::ValueId npos = static_cast<Tape::ValueId>(-1);
  std::vector<Tape::ValueId> params;       // aligned with active_params()
  std::vector<Tape::ValueId> z;            // active channel embeddings
  Tape::ValueId alpha = npos;              // npos in single-channel mode
  Tape::ValueId z_final = npos;
  Tape::ValueId y_hat = npos;
  Tape::ValueId loss_label = npos;
  Tape::ValueId loss_disparity = npos;     // npos when not on the tape
  Tape::ValueId loss_total = npos;
};

inline std::vector<int> active_channel_indices(const TrainConfig& cfg) {
  if (cfg.single_channel == 0) return {0, 1, 2, 3, 4, 5, 6, 7, 8};
  return {cfg.single_channel - 1};
}

// Pointers to the matrices the optimizer updates, in for_each_matrix order.
inline std::vector<DenseMatrix*> active_params(ModelParams& params,
                                               const TrainConfig& cfg) {
  std::vector<DenseMatrix*> out;
  const bool full = cfg.single_channel == 0;
  for (int i : active_channel_indices(cfg)) {
    out.push_back(&params.channels[i].w0);
    out.push_back(&params.channels[i].w1);
  }
  if (full) {
    for (std::size_t i = 0; i < params.attention.w.size(); ++i) {
      out.push_back(&params.attention.w[i]);
      out.push_back(&params.attention.b[i]);
    }
    out.push_back(&params.attention.q);
  }
  out.push_back(&params.cls_w);
  out.push_back(&params.cls_b);
  return out;
}

// Builds the full objective on `tape`. In train mode dropout draws come from
// `dropout_rng`; `pairs` (when non-null and lambda > 0) adds the disparity
// term. Parameter nodes are registered in active_params() order.
inline ModelTapeIds build_model_tape(Tape& tape, const ModelParams& params,
                                     const std::array<ChannelInput, 9>& channels,
                                     const std::vector<int>& labels,
                                     const std::vector<std::size_t>& train_mask,
                                     const TrainConfig& cfg, Mode mode,
                                     Rng* dropout_rng, const PairSample* pairs) {
  ModelTapeIds ids;
  const bool full = cfg.single_channel == 0;
  const auto active = active_channel_indices(cfg);

  std::vector<Tape::ValueId> ch_w0(active.size()), ch_w1(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    ch_w0[a] = tape.parameter(params.channels[active[a]].w0);
    ch_w1[a] = tape.parameter(params.channels[active[a]].w1);
    ids.params.push_back(ch_w0[a]);
    ids.params.push_back(ch_w1[a]);
  }
  AttentionIds att;
  if (full) {
    for (std::size_t i = 0; i < params.attention.w.size(); ++i) {
      att.w.push_back(tape.parameter(params.attention.w[i]));
      att.b.push_back(tape.parameter(params.attention.b[i]));
      ids.params.push_back(att.w[i]);
      ids.params.push_back(att.b[i]);
    }
    att.q = tape.parameter(params.attention.q);
    ids.params.push_back(att.q);
  }
  Tape::ValueId cls_w = tape.parameter(params.cls_w);
  Tape::ValueId cls_b = tape.parameter(params.cls_b);
  ids.params.push_back(cls_w);
  ids.params.push_back(cls_b);

  ids.z.reserve(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const ChannelInput& ch = channels[active[a]];
    ChannelForwardIds fwd =
        channel_forward_tape(tape, ch_w0[a], ch_w1[a], ch.adjacency, *ch.attrs, mode,
                             cfg.dropout, dropout_rng, cfg.relu_last);
    ids.z.push_back(fwd.z);
  }

  if (full) {
    Tape::ValueId scores = attention_scores_tape(tape, att, ids.z);
    FuseIds fused = fuse_tape(tape, scores, ids.z);
    ids.alpha = fused.alpha;
    ids.z_final = fused.fused;
  } else {
    ids.z_final = ids.z[0];
  }

  Tape::ValueId logits =
      tape.add_row_broadcast(tape.matmul(ids.z_final, tape.transpose(cls_w)), cls_b);
  ids.y_hat = tape.softmax_rows(logits);
  ids.loss_label = tape.masked_nll(ids.y_hat, labels, train_mask);

  ids.loss_total = ids.loss_label;
  if (full && pairs != nullptr && cfg.lambda > 0.0 && !pairs->pairs.empty()) {
    ids.loss_disparity = disparity_loss_tape(tape, ids.z, *pairs);
    ids.loss_total = tape.add(ids.loss_label, tape.scale(ids.loss_disparity, cfg.lambda));
  }
  return ids;
}

// -- reports ----------------------------------------------------------------

struct EpochRecord {
  std::size_t epoch = 0;
  double loss_label = 0.0;
  double loss_disparity = 0.0;  // sampled-pair sum (logged even when lambda = 0)
  double loss_total = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  std::array<double, 9> mean_attention{};
  double mean_pair_hsic = 0.0;  // loss_disparity / sampled pair count
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
  MetricsRecord final_train, final_val, final_test;
  DenseMatrix final_embeddings;
  AttentionReport final_attention;
  double final_mean_hsic = 0.0;  // all unordered pairs, eval-mode embeddings
};

// -- training loop ----------------------------------------------------------

inline std::array<ChannelInput, 9> prepare_channels(const Graph& g,
                                                    const TrainConfig& cfg) {
  FeatureSet fs = build_feature_set(g, cfg.k, cfg.densify);
  ChannelOptions opt;
  opt.row_normalize = cfg.row_normalize;
  return enumerate_channels(fs, opt);
}

inline std::pair<ModelParams, TrainReport> train_on_channels(
    const std::array<ChannelInput, 9>& channels, const std::vector<int>& labels,
    int num_classes, const SplitMasks& splits, const TrainConfig& cfg) {
  cfg.validate();
  if (splits.train.empty()) throw ConfigError("train: empty training mask");
  const bool full = cfg.single_channel == 0;

  Rng init_rng = Rng(cfg.seed).fork(1);
  Rng dropout_rng = Rng(cfg.seed).fork(2);
  Rng pair_rng = Rng(cfg.seed).fork(3);

  ModelParams params = init_model(channels, cfg.h1, cfg.h2, cfg.attention_dim(),
                                  num_classes, init_rng);
  std::vector<DenseMatrix*> trainable = active_params(params, cfg);
  AdamState adam(AdamConfig{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay},
                 {trainable.begin(), trainable.end()});

  TrainReport report;
  ModelParams best = params;
  double best_val = -1.0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t patience_anchor = 0;  // last strict val-accuracy improvement

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    PairSample pairs;
    if (full) pairs = sample_pairs(cfg.t, pair_rng);

    double loss_label = 0.0, loss_disparity = 0.0, loss_total = 0.0;
    std::vector<DenseMatrix> grads;
    {
      // Scoped so the training graph is gone before the eval forward below.
      Tape tape;
      ModelTapeIds ids = build_model_tape(tape, params, channels, labels,
                                          splits.train, cfg, Mode::train,
                                          &dropout_rng, full ? &pairs : nullptr);
      loss_label = tape.value(ids.loss_label)(0, 0);
      if (ids.loss_disparity != ModelTapeIds::npos) {
        loss_disparity = tape.value(ids.loss_disparity)(0, 0);
      } else if (full) {
        std::vector<DenseMatrix> z_now;
        z_now.reserve(ids.z.size());
        for (auto zid : ids.z) z_now.push_back(tape.value(zid));
        loss_disparity = disparity_loss(z_now, pairs);
      }
      loss_total = tape.value(ids.loss_total)(0, 0);
      if (!std::isfinite(loss_label))
        throw NumericError("label loss (cross-entropy) became non-finite at epoch " +
                           std::to_string(epoch));
      if (!std::isfinite(loss_disparity))
        throw NumericError("disparity loss (HSIC) became non-finite at epoch " +
                           std::to_string(epoch));

      tape.backward(ids.loss_total, /*release_graph=*/true);
      grads.reserve(ids.params.size());
      for (auto pid : ids.params) grads.push_back(tape.take_grad(pid));
    }
    std::vector<const DenseMatrix*> grad_ptrs;
    grad_ptrs.reserve(grads.size());
    for (auto& g : grads) grad_ptrs.push_back(&g);
    adam.step(trainable, grad_ptrs);
    grads.clear();
    grads.shrink_to_fit();

    // Clean forward for metrics and the attention trajectory.
    Tape eval_tape;
    ModelTapeIds eval_ids = build_model_tape(eval_tape, params, channels, labels,
                                             splits.train, cfg, Mode::eval, nullptr,
                                             nullptr);
    const DenseMatrix& y_hat = eval_tape.value(eval_ids.y_hat);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss_label = loss_label;
    rec.loss_disparity = loss_disparity;
    rec.loss_total = loss_total;
    rec.train_acc = compute_metrics(y_hat, labels, splits.train).accuracy;
    rec.val_acc = splits.val.empty()
                      ? 0.0
                      : compute_metrics(y_hat, labels, splits.val).accuracy;
    if (full) {
      const DenseMatrix& alpha = eval_tape.value(eval_ids.alpha);
      for (std::size_t j = 0; j < 9; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < alpha.rows(); ++i) mean += alpha(i, j);
        rec.mean_attention[j] = mean / static_cast<double>(alpha.rows());
      }
      rec.mean_pair_hsic =
          pairs.pairs.empty() ? 0.0
                              : loss_disparity / static_cast<double>(pairs.pairs.size());
    } else {
      rec.mean_attention[cfg.single_channel - 1] = 1.0;
    }
    report.epochs.push_back(rec);

    // Snapshot the best validation accuracy; ties go to the epoch with the
    // lower validation label loss (val accuracy is heavily quantized on
    // small graphs). Patience counts from the last strict improvement.
    const double val_loss =
        splits.val.empty() ? 0.0 : cross_entropy(y_hat, labels, splits.val);
    const bool improved = rec.val_acc > best_val;
    if (improved || splits.val.empty() ||
        (rec.val_acc == best_val && val_loss < best_val_loss)) {
      best_val = rec.val_acc;
      best_val_loss = val_loss;
      best = params;
      best_epoch = epoch;
    }
    if (improved) patience_anchor = epoch;
    if (!splits.val.empty() && epoch - patience_anchor >= cfg.patience) break;
  }

  params = best;
  report.best_epoch = best_epoch;
  report.best_val_acc = best_val;

  Tape final_tape;
  ModelTapeIds final_ids = build_model_tape(final_tape, params, channels, labels,
                                            splits.train, cfg, Mode::eval, nullptr,
                                            nullptr);
  const DenseMatrix& y_hat = final_tape.value(final_ids.y_hat);
  report.final_train = compute_metrics(y_hat, labels, splits.train);
  if (!splits.val.empty()) report.final_val = compute_metrics(y_hat, labels, splits.val);
  if (!splits.test.empty())
    report.final_test = compute_metrics(y_hat, labels, splits.test);
  report.final_embeddings = final_tape.value(final_ids.z_final);
  if (full) {
    report.final_attention =
        make_attention_report(final_tape.value(final_ids.alpha));
    std::vector<DenseMatrix> z_final;
    z_final.reserve(final_ids.z.size());
    for (auto zid : final_ids.z) z_final.push_back(final_tape.value(zid));
    report.final_mean_hsic = mean_pairwise_hsic(z_final);
  } else {
    DenseMatrix alpha(report.final_embeddings.rows(), 9);
    for (std::size_t i = 0; i < alpha.rows(); ++i)
      alpha(i, cfg.single_channel - 1) = 1.0;
    report.final_attention = make_attention_report(alpha);
  }
  return {std::move(params), std::move(report)};
}

// Full pipeline: feature construction, channel resolution, training.
inline std::pair<ModelParams, TrainReport> train(const Graph& g, const SplitMasks& splits,
                                                 const TrainConfig& cfg) {
  return train_on_channels(prepare_channels(g, cfg), g.labels, g.num_classes, splits,
                           cfg);
}

// -- checkpoints ------------------------------------------------------------

namespace detail {
inline void write_matrix_block(std::ostream& out, const std::string& name,
                               const DenseMatrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? '\n' : ' ');
    }
  }
}
}  // namespace detail

inline void save_checkpoint(const std::string& path, ModelParams& params,
                            const TrainConfig& cfg, int num_classes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out << "gda_checkpoint 1\n";
  out << "h1 " << cfg.h1 << "\nh2 " << cfg.h2 << "\nh_att " << cfg.attention_dim()
      << "\nnum_classes " << num_classes << "\nk " << cfg.k << "\nsingle_channel "
      << cfg.single_channel << "\ndensify " << (cfg.densify ? 1 : 0)
      << "\nrow_normalize " << (cfg.row_normalize ? 1 : 0) << "\nrelu_last "
      << (cfg.relu_last ? 1 : 0) << "\n";
  params.for_each_matrix([&](const std::string& name, const DenseMatrix& m) {
    detail::write_matrix_block(out, name, m);
  });
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

struct Checkpoint {
  ModelParams params;
  std::size_t h1 = 0, h2 = 0, h_att = 0, k = 0;
  int num_classes = 0, single_channel = 0;
  bool densify = true, row_normalize = true, relu_last = false;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "gda_checkpoint" || version != 1)
    throw ParseError("not a recognized checkpoint file: " + path);
  Checkpoint ck;
  ck.params.channels.resize(9);
  ck.params.attention.w.resize(9);
  ck.params.attention.b.resize(9);
  for (int i = 0; i < 9; ++i) ck.params.channels[i].channel_index = i + 1;
  std::string key;
  while (in >> key) {
    if (key == "matrix") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      in >> name >> rows >> cols;
      DenseMatrix m(rows, cols);
      for (std::size_t i = 0; i < m.size(); ++i)
        if (!(in >> m.data()[i]))
          throw ParseError("truncated matrix block '" + name + "' in " + path);
      bool placed = false;
      ck.params.for_each_matrix([&](const std::string& n, DenseMatrix& slot) {
        if (n == name) {
          slot = m;
          placed = true;
        }
      });
      if (!placed) throw ParseError("unknown matrix '" + name + "' in " + path);
    } else {
      long long v = 0;
      if (!(in >> v)) throw ParseError("malformed header entry '" + key + "' in " + path);
      if (key == "h1") ck.h1 = v;
      else if (key == "h2") ck.h2 = v;
      else if (key == "h_att") ck.h_att = v;
      else if (key == "num_classes") ck.num_classes = static_cast<int>(v);
      else if (key == "k") ck.k = v;
      else if (key == "single_channel") ck.single_channel = static_cast<int>(v);
      else if (key == "densify") ck.densify = v != 0;
      else if (key == "row_normalize") ck.row_normalize = v != 0;
      else if (key == "relu_last") ck.relu_last = v != 0;
      else throw ParseError("unknown checkpoint key '" + key + "' in " + path);
    }
  }
  return ck;
}

}  // namespace gda
