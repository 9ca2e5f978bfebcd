// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reviewjudge/lstm.hpp"
#include "reviewjudge/rng.hpp"

namespace reviewjudge {

enum class Activation : std::uint32_t { Relu = 0, Sigmoid = 1 };

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;  // out
  Activation activation = Activation::Relu;
};

struct SiameseConfig {
  Eigen::Index input_dim = 384;
  Eigen::Index hidden_dim = 64;
  /// Widths of the relu layers between the feature vector and the sigmoid unit.
  std::vector<Eigen::Index> head_hidden{32};
  double dropout = 0.3;
  /// One LSTM serves both branches.
  bool shared_weights = false;
  /// Longer token sequences are truncated to their first max_seq_len steps.
  Eigen::Index max_seq_len = 200;

  Eigen::Index feature_dim() const { return 2 * hidden_dim + 2; }
  void validate() const;
};

struct SiameseParams {
  LstmParams branch_a;  // contextual branch
  LstmParams branch_b;  // word2vec branch; empty when weights are shared
  std::vector<DenseLayer> head;

  /// Zero-filled parameters of the same shapes.
  SiameseParams zeros_like() const;
  /// Every tensor in checkpoint order (a.W, a.U, a.b, b.W, b.U, b.b, then
  /// W, b per head layer), skipping empty ones.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
};

struct SiameseModel {
  SiameseConfig config;
  SiameseParams params;

  const LstmParams& word_branch() const { return config.shared_weights ? params.branch_a : params.branch_b; }
};

/// Random initialization: LSTM as in LstmParams::random, dense layers
/// He-uniform (relu) or Glorot-uniform (sigmoid), zero biases.
SiameseModel make_model(const SiameseConfig& config, std::uint64_t seed);

/// 1 - cos(A, B) computed on the L2-normalized vectors, in [0, 2]. Defined
/// as 1 when either vector is zero.
double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// (1 + cos(A, B)) / 2, evaluated as 1 - cosine_distance / 2.
double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Clamped binary cross-entropy, eps = 1e-7.
double bce_loss(double score, int label);
inline constexpr double kBceEpsilon = 1e-7;

enum class Mode { Train, Infer };

struct ForwardCache {
  LstmTrace trace_a;
  LstmTrace trace_b;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd features;
  std::vector<Eigen::VectorXd> layer_input;  // input to each head layer
  std::vector<Eigen::VectorXd> pre;          // W x + b of each head layer
  std::vector<Eigen::VectorXd> mask;         // inverted dropout mask per hidden layer (empty in infer mode)
};

struct ForwardResult {
  double score = 0.5;
  double logit = 0.0;
  ForwardCache cache;
};

/// Feature vector [a*b, |a-b|, cosine_distance, similarity] fed to the head.
Eigen::VectorXd siamese_features(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Scores one example. ctx_seq and w2v_seq hold one D-vector per column.
/// Dropout is applied only in train mode and needs `rng`.
ForwardResult forward(const SiameseModel& model, const Eigen::MatrixXd& ctx_seq, const Eigen::MatrixXd& w2v_seq,
                      Mode mode = Mode::Infer, Rng* rng = nullptr);

inline double predict(const SiameseModel& model, const Eigen::MatrixXd& ctx_seq, const Eigen::MatrixXd& w2v_seq) {
  return forward(model, ctx_seq, w2v_seq, Mode::Infer).score;
}

/// Gradient of scale * bce_loss(score, label) with respect to every
/// parameter, added into `grad`.
void backward(const SiameseModel& model, const ForwardResult& result, int label, SiameseParams& grad,
              double scale = 1.0);
SiameseParams backward(const SiameseModel& model, const ForwardResult& result, int label, double scale = 1.0);

}  // namespace reviewjudge
