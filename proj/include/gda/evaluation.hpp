#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gda/attention.hpp"
#include "gda/common.hpp"
#include "gda/data_io.hpp"
#include "gda/graph.hpp"
#include "gda/matrix.hpp"
#include "gda/metrics.hpp"
#include "gda/training.hpp"

namespace gda {

// -- feature-availability investigation ----------------------------------------

struct InvestigationRow {
  int channel = 0;  // 1..9, or 0 for the full attention model
  std::string name;
  double mean_accuracy = 0.0;
  double mean_macro_f1 = 0.0;
};

struct InvestigationResult {
  std::vector<InvestigationRow> rows;  // nine single-channel rows, then "full"
};

struct InvestigationOptions {
  std::size_t labels_per_class = 20;
  std::size_t val_size = 15;
  std::size_t test_size = 15;
};

// Trains each channel alone (attention bypassed) and the full model on fresh
// synthetic graphs, one per seed; reports mean test metrics per configuration.
inline InvestigationResult investigate_features(const SyntheticSpec& spec,
                                                const std::vector<std::uint64_t>& seeds,
                                                const TrainConfig& base_cfg,
                                                const InvestigationOptions& opt = {}) {
  if (seeds.empty()) throw ConfigError("investigate_features: no seeds");
  InvestigationResult result;
  for (int mode = 1; mode <= 10; ++mode) {
    const int channel = mode <= 9 ? mode : 0;
    InvestigationRow row;
    row.channel = channel;
    row.name = channel == 0 ? "full" : channel_name(kChannelTable[channel - 1]);
    for (std::uint64_t seed : seeds) {
      Rng data_rng = Rng(seed).fork(100);
      Graph g = generate_synthetic(spec, data_rng);
      Rng split_rng = Rng(seed).fork(101);
      SplitMasks splits = make_splits(g, opt.labels_per_class, opt.val_size,
                                      opt.test_size, split_rng);
      TrainConfig cfg = base_cfg;
      cfg.seed = seed;
      cfg.single_channel = channel;
      auto [params, report] = train(g, splits, cfg);
      row.mean_accuracy += report.final_test.accuracy;
      row.mean_macro_f1 += report.final_test.macro_f1;
    }
    row.mean_accuracy /= static_cast<double>(seeds.size());
    row.mean_macro_f1 /= static_cast<double>(seeds.size());
    result.rows.push_back(row);
  }
  return result;
}

// -- k sensitivity sweep ----------------------------------------------------------

struct SweepRow {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (k, seed)
};

// One full training run per (k, seed) over a fixed split. The feature set is
// rebuilt per k; seeds only vary initialization, dropout, and pair sampling.
inline SweepResult sweep_k(const Graph& g, const SplitMasks& splits,
                           const TrainConfig& base_cfg,
                           const std::vector<std::size_t>& k_values,
                           const std::vector<std::uint64_t>& seeds) {
  for (std::size_t k : k_values)
    if (k < 1 || k >= g.n)
      throw ConfigError("sweep_k: k=" + std::to_string(k) + " outside [1, n-1]");
  SweepResult result;
  std::vector<std::size_t> ks = k_values;
  std::sort(ks.begin(), ks.end());
  for (std::size_t k : ks) {
    TrainConfig cfg = base_cfg;
    cfg.k = k;
    auto channels = prepare_channels(g, cfg);
    std::vector<std::uint64_t> ss = seeds;
    std::sort(ss.begin(), ss.end());
    for (std::uint64_t seed : ss) {
      cfg.seed = seed;
      auto [params, report] =
          train_on_channels(channels, g.labels, g.num_classes, splits, cfg);
      result.rows.push_back(SweepRow{k, seed, report.final_test.accuracy,
                                     report.final_test.macro_f1});
    }
  }
  return result;
}

// -- exports ----------------------------------------------------------------------

inline void export_embeddings(const DenseMatrix& z, const std::string& path) {
  write_matrix(path, z);
}

// Delimited table: node id + one weight per channel, node order preserved.
inline void export_attention(const AttentionReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open attention table for writing: " + path);
  out << "node";
  for (std::size_t j = 0; j < report.alpha.cols(); ++j) out << "\talpha" << (j + 1);
  out << '\n';
  for (std::size_t i = 0; i < report.alpha.rows(); ++i) {
    out << i;
    for (std::size_t j = 0; j < report.alpha.cols(); ++j)
      out << '\t' << detail::fmt_double(report.alpha(i, j));
    out << '\n';
  }
  if (!out) throw IoError("failed writing attention table: " + path);
}

inline void write_investigation_table(const InvestigationResult& result,
                                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open investigation table for writing: " + path);
  out << "channel\tname\tmean_accuracy\tmean_macro_f1\n";
  for (const auto& row : result.rows)
    out << row.channel << '\t' << row.name << '\t'
        << detail::fmt_double(row.mean_accuracy) << '\t'
        << detail::fmt_double(row.mean_macro_f1) << '\n';
  if (!out) throw IoError("failed writing investigation table: " + path);
}

inline void write_sweep_table(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open sweep table for writing: " + path);
  out << "k\tseed\taccuracy\tmacro_f1\n";
  for (const auto& row : result.rows)
    out << row.k << '\t' << row.seed << '\t' << detail::fmt_double(row.accuracy)
        << '\t' << detail::fmt_double(row.macro_f1) << '\n';
  if (!out) throw IoError("failed writing sweep table: " + path);
}

}  // namespace gda
