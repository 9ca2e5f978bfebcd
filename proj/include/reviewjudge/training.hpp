// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reviewjudge/siamese.hpp"

namespace reviewjudge {

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// Moments sized to match `params`.
AdamState make_adam_state(const SiameseParams& params, double learning_rate = 1e-3);

/// Bias-corrected Adam step over matching tensor lists; increments step.
void adam_update(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
                 AdamState& state);
void adam_update(SiameseParams& params, const SiameseParams& grads, AdamState& state);

/// One labelled review in model-input form.
struct Example {
  std::int64_t review_id = -1;
  Eigen::VectorXd context;               // fed to branch a as a length-1 sequence
  std::vector<std::int32_t> token_ids;   // columns of FeatureSet::token_table
  int label = 0;                         // 1 = CG (fake)
};

struct FeatureSet {
  Eigen::MatrixXd token_table;  // D x V
  std::vector<Example> examples;

  Eigen::MatrixXd token_sequence(const Example& e, Eigen::Index max_len) const;
  Eigen::MatrixXd context_sequence(const Example& e) const { return e.context; }
};

ForwardResult forward_example(const SiameseModel& model, const FeatureSet& features, const Example& e,
                              Mode mode = Mode::Infer, Rng* rng = nullptr);

struct Metrics {
  std::size_t count = 0;
  double loss = 0.0;  // mean BCE
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Metrics with CG as the positive class; score >= threshold predicts CG.
/// Throws ArgumentError on an empty set.
Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);
/// Same, from already-made class predictions (1 = CG).
Metrics compute_metrics_from_predictions(std::span<const int> predicted, std::span<const int> labels);

/// Infer-mode scores, optionally on several threads.
std::vector<double> predict_scores(const SiameseModel& model, const FeatureSet& features,
                                   std::span<const std::size_t> indices, unsigned workers = 1);

Metrics evaluate(const SiameseModel& model, const FeatureSet& features, std::span<const std::size_t> indices,
                 double threshold = 0.5, unsigned workers = 1);

struct TrainConfig {
  int max_epochs = 100;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  /// Non-improving epochs tolerated; 0 stops at the first one.
  int patience = 20;
  std::uint64_t seed = 42;
  /// Threads for per-batch gradients; the reduction order is fixed.
  unsigned workers = 1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int stopped_epoch = 0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  int patience = 0;
  /// Validation metrics of the returned (checkpoint-precision) model.
  Metrics final_validation;
};

struct TrainResult {
  SiameseModel model;
  TrainReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minibatch Adam on BCE with early stopping on validation loss. Returns
/// the parameters of the best epoch rounded to 32-bit float precision, the
/// precision checkpoints store.
TrainResult train(const SiameseModel& initial, const FeatureSet& features, std::span<const std::size_t> train_idx,
                  std::span<const std::size_t> val_idx, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Rounds every parameter to the nearest float.
void round_to_float(SiameseParams& params);

std::string metrics_json(const Metrics& m);
std::string report_json(const TrainReport& report);

}  // namespace reviewjudge
