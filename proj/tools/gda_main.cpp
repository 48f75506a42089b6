// Command-line interface: augment / train / evaluate / investigate / sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "gda/gda.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSplitTag = 7;   // fork tag for split sampling
constexpr std::uint64_t kDataTag = 100;  // fork tag for synthetic generation

struct DataOptions {
  std::string dataset;
  std::string data_dir = "data";
  std::string edges, features, labels;
  std::string synthetic;  // attributes | topology | both
  gda::SyntheticSpec spec;
  std::uint64_t data_seed = 0;

  bool is_synthetic() const { return !synthetic.empty(); }

  gda::CorrelationMode mode() const {
    if (synthetic == "attributes") return gda::CorrelationMode::attributes;
    if (synthetic == "topology") return gda::CorrelationMode::topology;
    if (synthetic == "both") return gda::CorrelationMode::both;
    throw gda::ConfigError("unknown synthetic mode '" + synthetic +
                           "' (want attributes|topology|both)");
  }

  gda::Graph load() const {
    if (is_synthetic()) {
      gda::SyntheticSpec s = spec;
      s.mode = mode();
      gda::Rng rng = gda::Rng(data_seed).fork(kDataTag);
      return gda::generate_synthetic(s, rng);
    }
    if (!edges.empty() || !features.empty() || !labels.empty()) {
      if (edges.empty() || features.empty() || labels.empty())
        throw gda::ConfigError("--edges/--features/--labels must be given together");
      return gda::load_dataset(gda::DatasetPaths{edges, features, labels});
    }
    if (!dataset.empty()) return gda::load_dataset(dataset, data_dir);
    throw gda::ConfigError("no input graph: use --dataset, --synthetic, or explicit paths");
  }

  std::string describe() const {
    if (is_synthetic()) return "synthetic:" + synthetic;
    if (!dataset.empty()) return dataset;
    return edges;
  }
};

struct SplitOptions {
  std::string split_file;
  std::size_t labels_per_class = 20;
  std::size_t val_size = 500;
  std::size_t test_size = 1000;

  gda::SplitMasks resolve(const gda::Graph& g, std::uint64_t seed) const {
    if (!split_file.empty()) return gda::read_split_file(split_file, g.n);
    gda::Rng rng = gda::Rng(seed).fork(kSplitTag);
    return gda::make_splits(g, labels_per_class, val_size, test_size, rng);
  }
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--dataset", d.dataset, "Named dataset under the data directory");
  cmd->add_option("--data-dir", d.data_dir, "Dataset directory root")
      ->capture_default_str();
  cmd->add_option("--edges", d.edges, "Edge list file (u<TAB>v per line)");
  cmd->add_option("--features", d.features, "Attribute matrix file");
  cmd->add_option("--labels", d.labels, "Label file (node_id class_id per line)");
  cmd->add_option("--synthetic", d.synthetic,
                  "Generate a synthetic graph: attributes|topology|both");
  cmd->add_option("--n-per-class", d.spec.n_per_class, "Synthetic nodes per class")
      ->capture_default_str();
  cmd->add_option("--classes", d.spec.num_classes, "Synthetic class count")
      ->capture_default_str();
  cmd->add_option("--p-intra", d.spec.p_intra, "Synthetic intra-class edge probability")
      ->capture_default_str();
  cmd->add_option("--p-inter", d.spec.p_inter, "Synthetic inter-class edge probability")
      ->capture_default_str();
  cmd->add_option("--attr-dim", d.spec.attr_dim, "Synthetic attribute dimension")
      ->capture_default_str();
  cmd->add_option("--center-distance", d.spec.center_distance,
                  "Synthetic class-center separation")
      ->capture_default_str();
  cmd->add_option("--cov-scale", d.spec.cov_scale, "Synthetic attribute covariance scale")
      ->capture_default_str();
  cmd->add_option("--data-seed", d.data_seed, "Seed for synthetic generation")
      ->capture_default_str();
}

void add_split_options(CLI::App* cmd, SplitOptions& s) {
  cmd->add_option("--split", s.split_file, "Split file (node_id train|val|test)");
  cmd->add_option("--labels-per-class", s.labels_per_class,
                  "Training nodes sampled per class")
      ->capture_default_str();
  cmd->add_option("--val-size", s.val_size, "Validation node count")
      ->capture_default_str();
  cmd->add_option("--test-size", s.test_size, "Test node count")->capture_default_str();
}

void add_train_options(CLI::App* cmd, gda::TrainConfig& cfg, bool& no_densify,
                       bool& no_row_norm) {
  cmd->add_option("--k", cfg.k, "kNN size for the augmented adjacencies")
      ->capture_default_str();
  cmd->add_option("--t", cfg.t, "Sampled embedding pairs per step")
      ->capture_default_str();
  cmd->add_option("--lambda", cfg.lambda, "Disparity constraint weight")
      ->capture_default_str();
  cmd->add_option("--lr", cfg.lr, "Learning rate")->capture_default_str();
  cmd->add_option("--weight-decay", cfg.weight_decay, "Weight decay coefficient")
      ->capture_default_str();
  cmd->add_option("--dropout", cfg.dropout, "Dropout rate")->capture_default_str();
  cmd->add_option("--h1", cfg.h1, "Hidden layer width")->capture_default_str();
  cmd->add_option("--h2", cfg.h2, "Embedding width")->capture_default_str();
  cmd->add_option("--h-att", cfg.h_att, "Attention width (0 = same as --h2)")
      ->capture_default_str();
  cmd->add_option("--epochs", cfg.max_epochs, "Maximum training epochs")
      ->capture_default_str();
  cmd->add_option("--patience", cfg.patience, "Early-stopping patience (epochs)")
      ->capture_default_str();
  cmd->add_option("--single-channel", cfg.single_channel,
                  "Train one channel only (1..9); bypasses attention")
      ->capture_default_str();
  cmd->add_flag("--no-densify", no_densify, "Skip the two-hop adjacency densification");
  cmd->add_flag("--no-row-norm", no_row_norm, "Skip attribute row normalization");
  cmd->add_flag("--relu-last", cfg.relu_last, "Apply the activation after layer 2 too");
}

std::string fmt(double v) { return gda::detail::fmt_double(v); }

void print_config_block(const std::string& command,
                        const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "== effective config (" << command << ") ==\n";
  for (const auto& [k, v] : kv) std::cout << k << " = " << v << '\n';
  std::cout << "==\n";
}

std::vector<std::pair<std::string, std::string>> config_kv(const DataOptions& data,
                                                           const gda::TrainConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("input", data.describe());
  if (data.is_synthetic()) {
    kv.emplace_back("n_per_class", std::to_string(data.spec.n_per_class));
    kv.emplace_back("classes", std::to_string(data.spec.num_classes));
    kv.emplace_back("p_intra", fmt(data.spec.p_intra));
    kv.emplace_back("p_inter", fmt(data.spec.p_inter));
    kv.emplace_back("attr_dim", std::to_string(data.spec.attr_dim));
    kv.emplace_back("center_distance", fmt(data.spec.center_distance));
    kv.emplace_back("data_seed", std::to_string(data.data_seed));
  }
  kv.emplace_back("k", std::to_string(cfg.k));
  kv.emplace_back("t", std::to_string(cfg.t));
  kv.emplace_back("lambda", fmt(cfg.lambda));
  kv.emplace_back("lr", fmt(cfg.lr));
  kv.emplace_back("weight_decay", fmt(cfg.weight_decay));
  kv.emplace_back("dropout", fmt(cfg.dropout));
  kv.emplace_back("h1", std::to_string(cfg.h1));
  kv.emplace_back("h2", std::to_string(cfg.h2));
  kv.emplace_back("h_att", std::to_string(cfg.attention_dim()));
  kv.emplace_back("epochs", std::to_string(cfg.max_epochs));
  kv.emplace_back("patience", std::to_string(cfg.patience));
  kv.emplace_back("single_channel", std::to_string(cfg.single_channel));
  kv.emplace_back("densify", cfg.densify ? "true" : "false");
  kv.emplace_back("row_normalize", cfg.row_normalize ? "true" : "false");
  kv.emplace_back("relu_last", cfg.relu_last ? "true" : "false");
  return kv;
}

void write_run_log(const std::string& path, const gda::TrainReport& report) {
  std::ofstream out(path);
  if (!out) throw gda::IoError("cannot open run log for writing: " + path);
  for (const auto& rec : report.epochs) {
    json line;
    line["epoch"] = rec.epoch;
    line["loss_label"] = rec.loss_label;
    line["loss_disparity"] = rec.loss_disparity;
    line["loss_total"] = rec.loss_total;
    line["train_acc"] = rec.train_acc;
    line["val_acc"] = rec.val_acc;
    line["mean_attention"] = rec.mean_attention;
    line["mean_pair_hsic"] = rec.mean_pair_hsic;
    out << line.dump() << '\n';
  }
  if (!out) throw gda::IoError("failed writing run log: " + path);
}

// Dense matrices below this density are exported in the sparse MatrixFile
// variant to keep augmentation dumps reviewable.
void write_matrix_auto(const std::string& path, const gda::DenseMatrix& m) {
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.data()[i] != 0.0) ++nnz;
  if (m.size() > 0 && static_cast<double>(nnz) / m.size() <= 0.25) {
    gda::write_matrix(path, gda::SparseMatrix::from_dense(m));
  } else {
    gda::write_matrix(path, m);
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// -- subcommands --------------------------------------------------------------

int cmd_augment(const DataOptions& data, const gda::TrainConfig& cfg,
                const std::string& out_dir) {
  gda::Graph g = data.load();
  fs::create_directories(out_dir);
  gda::FeatureSet features = gda::build_feature_set(g, cfg.k, cfg.densify);
  const std::string base = out_dir + "/";
  gda::write_matrix(base + "a_high.txt", features.a_high);
  write_matrix_auto(base + "a_c.txt", features.a_c);
  write_matrix_auto(base + "x_c.txt", features.x_c);
  gda::write_matrix(base + "a_t.txt", features.a_t);
  gda::write_matrix(base + "x_t.txt", features.x_t);
  write_matrix_auto(base + "x.txt", features.x);

  std::ofstream manifest(base + "manifest.txt");
  if (!manifest) throw gda::IoError("cannot write manifest: " + base + "manifest.txt");
  manifest << "input " << data.describe() << '\n';
  manifest << "nodes " << g.n << '\n';
  manifest << "k " << cfg.k << "  # pre-symmetrization out-degree of a_t/x_t rows\n";
  manifest << "densified " << (cfg.densify ? "yes" : "no") << '\n';
  manifest << "files a_high.txt a_c.txt x_c.txt a_t.txt x_t.txt x.txt\n";
  manifest << "channels:\n";
  for (const auto& spec : gda::kChannelTable)
    manifest << "  " << spec.index << ' ' << gda::channel_name(spec) << '\n';
  std::cout << "wrote feature set for " << data.describe() << " (n=" << g.n
            << ", k=" << cfg.k << ") to " << out_dir << '\n';
  return 0;
}

int cmd_train(const DataOptions& data, const SplitOptions& split_opts,
              gda::TrainConfig cfg, const std::vector<std::uint64_t>& seeds,
              const std::string& out_dir, bool export_embeddings,
              bool export_attention) {
  if (seeds.empty()) throw gda::ConfigError("train: need at least one seed");
  gda::Graph g = data.load();
  fs::create_directories(out_dir);
  auto channels = gda::prepare_channels(g, cfg);

  json summary;
  summary["command"] = "train";
  summary["input"] = data.describe();
  summary["seeds"] = seeds;
  summary["per_seed"] = json::array();
  std::vector<double> accs, f1s;

  for (std::uint64_t seed : seeds) {
    cfg.seed = seed;
    gda::SplitMasks splits = split_opts.resolve(g, seed);
    auto [params, report] =
        gda::train_on_channels(channels, g.labels, g.num_classes, splits, cfg);
    const std::string tag = "seed" + std::to_string(seed);
    write_run_log(out_dir + "/train_" + tag + ".log.jsonl", report);
    gda::save_checkpoint(out_dir + "/checkpoint_" + tag + ".txt", params, cfg,
                         g.num_classes);
    if (export_embeddings)
      gda::export_embeddings(report.final_embeddings,
                             out_dir + "/embeddings_" + tag + ".txt");
    if (export_attention)
      gda::export_attention(report.final_attention,
                            out_dir + "/attention_" + tag + ".tsv");

    json row;
    row["seed"] = seed;
    row["best_epoch"] = report.best_epoch;
    row["epochs_run"] = report.epochs.size();
    row["val_acc"] = report.best_val_acc;
    row["test_acc"] = report.final_test.accuracy;
    row["test_macro_f1"] = report.final_test.macro_f1;
    row["final_mean_hsic"] = report.final_mean_hsic;
    summary["per_seed"].push_back(row);
    accs.push_back(report.final_test.accuracy);
    f1s.push_back(report.final_test.macro_f1);
    std::cout << tag << ": test_acc=" << fmt(report.final_test.accuracy)
              << " test_f1=" << fmt(report.final_test.macro_f1)
              << " best_epoch=" << report.best_epoch << " (" << report.epochs.size()
              << " epochs)\n";
  }
  summary["mean_test_acc"] = mean_of(accs);
  summary["std_test_acc"] = stddev_of(accs);
  summary["mean_test_macro_f1"] = mean_of(f1s);
  summary["std_test_macro_f1"] = stddev_of(f1s);
  std::ofstream out(out_dir + "/summary.json");
  if (!out) throw gda::IoError("cannot write summary: " + out_dir + "/summary.json");
  out << summary.dump(2) << '\n';
  std::cout << "mean test acc " << fmt(mean_of(accs)) << " +- " << fmt(stddev_of(accs))
            << ", mean macro-F1 " << fmt(mean_of(f1s)) << " +- " << fmt(stddev_of(f1s))
            << '\n';
  return 0;
}

int cmd_evaluate(const DataOptions& data, const SplitOptions& split_opts,
                 const std::string& checkpoint_path, std::uint64_t split_seed,
                 const std::string& out_dir, bool export_embeddings,
                 bool export_attention) {
  gda::Graph g = data.load();
  gda::Checkpoint ck = gda::load_checkpoint(checkpoint_path);
  if (ck.num_classes != g.num_classes)
    throw gda::ConfigError("checkpoint was trained with " +
                           std::to_string(ck.num_classes) + " classes, graph has " +
                           std::to_string(g.num_classes));
  gda::TrainConfig cfg;
  cfg.k = ck.k;
  cfg.h1 = ck.h1;
  cfg.h2 = ck.h2;
  cfg.h_att = ck.h_att;
  cfg.single_channel = ck.single_channel;
  cfg.densify = ck.densify;
  cfg.row_normalize = ck.row_normalize;
  cfg.relu_last = ck.relu_last;

  auto channels = gda::prepare_channels(g, cfg);
  gda::SplitMasks splits = split_opts.resolve(g, split_seed);
  gda::Tape tape;
  gda::ModelTapeIds ids =
      gda::build_model_tape(tape, ck.params, channels, g.labels, splits.train, cfg,
                            gda::Mode::eval, nullptr, nullptr);
  const gda::DenseMatrix& y_hat = tape.value(ids.y_hat);

  json result;
  result["command"] = "evaluate";
  result["checkpoint"] = checkpoint_path;
  auto add_metrics = [&](const char* name, const std::vector<std::size_t>& mask) {
    if (mask.empty()) return;
    gda::MetricsRecord rec = gda::compute_metrics(y_hat, g.labels, mask);
    result[name] = {{"accuracy", rec.accuracy},
                    {"macro_f1", rec.macro_f1},
                    {"n_eval", rec.n_eval}};
    std::cout << name << ": acc=" << fmt(rec.accuracy) << " f1=" << fmt(rec.macro_f1)
              << " (n=" << rec.n_eval << ")\n";
  };
  add_metrics("train", splits.train);
  add_metrics("val", splits.val);
  add_metrics("test", splits.test);

  fs::create_directories(out_dir);
  if (export_embeddings)
    gda::export_embeddings(tape.value(ids.z_final), out_dir + "/embeddings.txt");
  if (export_attention && ids.alpha != gda::ModelTapeIds::npos)
    gda::export_attention(gda::make_attention_report(tape.value(ids.alpha)),
                          out_dir + "/attention.tsv");
  std::ofstream out(out_dir + "/evaluate.json");
  if (!out) throw gda::IoError("cannot write " + out_dir + "/evaluate.json");
  out << result.dump(2) << '\n';
  return 0;
}

int cmd_investigate(const DataOptions& data, const gda::TrainConfig& cfg,
                    const SplitOptions& split_opts,
                    const std::vector<std::uint64_t>& seeds,
                    const std::string& out_dir) {
  if (!data.is_synthetic())
    throw gda::ConfigError("investigate runs on synthetic specs; pass --synthetic");
  gda::SyntheticSpec spec = data.spec;
  spec.mode = data.mode();
  gda::InvestigationOptions opt;
  opt.labels_per_class = split_opts.labels_per_class;
  opt.val_size = split_opts.val_size;
  opt.test_size = split_opts.test_size;
  gda::InvestigationResult result = gda::investigate_features(spec, seeds, cfg, opt);
  fs::create_directories(out_dir);
  gda::write_investigation_table(result, out_dir + "/investigation.tsv");
  std::cout << "channel\tname\tmean_acc\tmean_f1\n";
  for (const auto& row : result.rows)
    std::cout << row.channel << '\t' << row.name << '\t' << fmt(row.mean_accuracy)
              << '\t' << fmt(row.mean_macro_f1) << '\n';
  return 0;
}

int cmd_sweep(const DataOptions& data, const gda::TrainConfig& cfg,
              const SplitOptions& split_opts, std::vector<std::size_t> k_values,
              const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  gda::Graph g = data.load();
  if (k_values.empty()) k_values = {2, 3, 4, 5, 6, 7, 8, 9};
  const std::uint64_t split_seed = seeds.empty() ? 0 : seeds.front();
  gda::SplitMasks splits = split_opts.resolve(g, split_seed);
  gda::SweepResult result = gda::sweep_k(g, splits, cfg, k_values, seeds);
  fs::create_directories(out_dir);
  gda::write_sweep_table(result, out_dir + "/sweep.tsv");

  std::map<std::size_t, std::vector<double>> by_k;
  for (const auto& row : result.rows) by_k[row.k].push_back(row.accuracy);
  std::cout << "k\tmean_acc over " << seeds.size() << " seed(s)\n";
  for (const auto& [k, accs] : by_k) std::cout << k << '\t' << fmt(mean_of(accs)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training churns through large per-epoch buffers; keep them on the heap
  // instead of round-tripping pages through mmap.
  ::mallopt(M_MMAP_THRESHOLD, 1 << 30);
  ::mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Graph data augmentation for GCNs: nine-channel attention-fused "
               "training with an HSIC disparity constraint"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file (sections per command)");

  DataOptions data;
  SplitOptions split_opts;
  gda::TrainConfig cfg;
  bool no_densify = false, no_row_norm = false;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::uint64_t split_seed = 0;
  std::string out_dir = "out";
  std::string checkpoint_path;
  std::vector<std::size_t> k_values;
  bool export_embeddings = false, export_attention = false;

  auto* augment =
      app.add_subcommand("augment", "Write the six augmented feature matrices");
  add_data_options(augment, data);
  augment->add_option("--k", cfg.k, "kNN size")->capture_default_str();
  augment->add_flag("--no-densify", no_densify, "Skip two-hop densification");
  augment->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train the nine-channel model");
  add_data_options(train, data);
  add_split_options(train, split_opts);
  add_train_options(train, cfg, no_densify, no_row_norm);
  train->add_option("--seeds", seeds, "Training seeds (one full run each)")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--out", out_dir, "Output directory")->capture_default_str();
  train->add_flag("--export-embeddings", export_embeddings,
                  "Write final embeddings per seed");
  train->add_flag("--export-attention", export_attention,
                  "Write the attention table per seed");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint");
  add_data_options(evaluate, data);
  add_split_options(evaluate, split_opts);
  evaluate->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  evaluate->add_option("--split-seed", split_seed,
                       "Seed for split sampling when --split is absent")
      ->capture_default_str();
  evaluate->add_option("--out", out_dir, "Output directory")->capture_default_str();
  evaluate->add_flag("--export-embeddings", export_embeddings,
                     "Write final embeddings");
  evaluate->add_flag("--export-attention", export_attention,
                     "Write the attention table");

  auto* investigate = app.add_subcommand(
      "investigate", "Per-channel vs full-model accuracy on a synthetic spec");
  add_data_options(investigate, data);
  add_split_options(investigate, split_opts);
  add_train_options(investigate, cfg, no_densify, no_row_norm);
  investigate->add_option("--seeds", seeds, "Seeds (fresh graph per seed)")
      ->delimiter(',')
      ->capture_default_str();
  investigate->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Accuracy across kNN sizes");
  add_data_options(sweep, data);
  add_split_options(sweep, split_opts);
  add_train_options(sweep, cfg, no_densify, no_row_norm);
  sweep->add_option("--k-values", k_values, "k values to sweep (default 2..9)")
      ->delimiter(',');
  sweep->add_option("--seeds", seeds, "Training seeds per k")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.densify = !no_densify;
  cfg.row_normalize = !no_row_norm;

  try {
    if (augment->parsed()) {
      print_config_block("augment", config_kv(data, cfg));
      return cmd_augment(data, cfg, out_dir);
    }
    if (train->parsed()) {
      print_config_block("train", config_kv(data, cfg));
      return cmd_train(data, split_opts, cfg, seeds, out_dir, export_embeddings,
                       export_attention);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(data, split_opts, checkpoint_path, split_seed, out_dir,
                          export_embeddings, export_attention);
    }
    if (investigate->parsed()) {
      print_config_block("investigate", config_kv(data, cfg));
      return cmd_investigate(data, cfg, split_opts, seeds, out_dir);
    }
    if (sweep->parsed()) {
      print_config_block("sweep", config_kv(data, cfg));
      return cmd_sweep(data, cfg, split_opts, k_values, seeds, out_dir);
    }
  } catch (const gda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const gda::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const gda::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const gda::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const gda::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
