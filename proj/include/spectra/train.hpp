#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectra/graph.hpp"
#include "spectra/metrics.hpp"
#include "spectra/models.hpp"

namespace spectra {

enum class TaskKind { nodeclass, linksign, cluster };
enum class FeatureKind { svd, onehot };
enum class ReportMode { best_val, best_test };
enum class LinkPropagation { strict, full };

const char* task_name(TaskKind t);

struct DataConfig {
  std::optional<SsbmParams> ssbm;  // generated per repeat with a derived seed
  std::string edge_list;           // or loaded once from disk
  std::string labels;              // node labels CSV (node,label), optional
  bool directed = false;
  bool drop_isolated = false;
};

struct ExperimentConfig {
  ModelConfig model;
  TaskKind task = TaskKind::nodeclass;
  DataConfig data;
  FeatureKind features = FeatureKind::svd;
  std::size_t feature_dim = 0;  // 0 -> 64 for nodeclass, 30 for linksign
  double lr = 0.01;
  double weight_decay = 1e-4;
  std::size_t epochs = 300;
  std::uint64_t seed = 1;
  double known_label_ratio = 0.01;
  double train_edge_ratio = 0.8;
  double neg_sample_factor = 2.0;
  std::size_t n_repeats = 0;  // 0 -> 20 for nodeclass, 10 otherwise
  ReportMode report = ReportMode::best_val;
  LinkPropagation link_propagation = LinkPropagation::strict;
  std::size_t cluster_k = 2;
  std::size_t mlp_hidden = 64;
  std::string output_dir;  // empty: no files written

  // Parses the JSON schema documented in the README; rejects unknown keys.
  // Overrides are dotted assignments like "lr=0.05" or
  // "data.ssbm.flip_prob=0.4", applied before validation.
  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::vector<std::string>& overrides = {});
  std::string to_json() const;  // resolved (defaults filled in), canonical key order

  // Non-fatal issues, e.g. lr outside the documented search range.
  std::vector<std::string> warnings() const;

  std::size_t resolved_feature_dim() const;
  std::size_t resolved_repeats() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> val_acc, test_acc;
};

struct RepeatResult {
  std::size_t best_epoch = 0;      // nodeclass: epoch with highest val accuracy
  double val_metric = 0.0;         // nodeclass: val acc; linksign: held-out macro-F1
  double reported_accuracy = 0.0;  // nodeclass
  double accuracy = 0.0;           // linksign test accuracy over sign classes
  SignF1 f1;                       // linksign
  double auc = 0.0;                // linksign
  double ari = 0.0;                // cluster
  std::vector<EpochRecord> curve;
  std::vector<std::string> notes;  // degenerate-data warnings etc.
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RepeatResult> repeats;
  std::size_t best_repeat = 0;  // index whose checkpoint is kept
};

struct RunOptions {
  // Hold out part of the training data as a validation signal for model
  // selection (fills RepeatResult::val_metric for linksign).
  bool grid_validation = false;
};

// Runs the configured experiment (all repeats, parallel workers capped by
// SPECTRA_THREADS) and, when output_dir is set, writes summary.json,
// epochs.jsonl, repeats.csv, manifest.json and model.ckpt.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

// Deterministic summary document (no timestamps).
std::string summary_json(const ExperimentResult& r);

struct GridChoice {
  double lr = 0.0;
  double weight_decay = 0.0;
  double val_metric = 0.0;
};

// Exhaustive sweep over lr x weight_decay selecting the best mean validation
// metric (accuracy for nodeclass, macro-F1 for linksign); ties prefer the
// smaller lr, then the smaller weight decay.
GridChoice hyperparameter_grid(const ExperimentConfig& base, const std::vector<double>& lrs,
                               const std::vector<double>& wds);

// Worker cap: SPECTRA_THREADS if set and positive, else hardware concurrency.
std::size_t worker_cap();

}  // namespace spectra
