// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gradcheck.hpp"
#include "reviewjudge/checkpoint.hpp"
#include "reviewjudge/error.hpp"
#include "reviewjudge/lstm.hpp"
#include "reviewjudge/siamese.hpp"
#include "reviewjudge/training.hpp"
#include "scalar_oracle.hpp"
#include "separable.hpp"
#include "test_support.hpp"

using namespace reviewjudge;

namespace {

Eigen::MatrixXd random_seq(Eigen::Index dim, Eigen::Index len, Rng& rng) {
  Eigen::MatrixXd s(dim, len);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = rng.uniform(-1.0, 1.0);
  return s;
}

SiameseConfig tiny_config(Eigen::Index dim = 3, Eigen::Index hidden = 2, Eigen::Index head = 4) {
  SiameseConfig c;
  c.input_dim = dim;
  c.hidden_dim = hidden;
  c.head_hidden = {head};
  c.dropout = 0.0;
  return c;
}

}  // namespace

TEST(Lstm, ZeroParamsGiveHalfGatesAndZeroState) {
  const LstmParams p = LstmParams::zeros(3, 2);
  LstmTrace trace;
  Eigen::MatrixXd x(3, 1);
  x << 0.4, -2.0, 7.0;
  const Eigen::VectorXd h = branch_forward(x, p, &trace);
  for (Eigen::Index r = 0; r < 6; ++r) EXPECT_DOUBLE_EQ(trace.gates(r, 0), 0.5);
  EXPECT_EQ(trace.c.col(1), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(h, Eigen::VectorXd::Zero(2));
  const LstmState s = lstm_step(x.col(0), LstmState::zero(2), p);
  EXPECT_EQ(s.h, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(s.c, Eigen::VectorXd::Zero(2));
}

TEST(Lstm, HandCaseInputGateOpen) {
  LstmParams p = LstmParams::zeros(1, 1);
  p.b[0] = 30.0;  // i ~ 1
  p.b[1] = -30.0; // f ~ 0
  p.b[3] = 1.0;   // candidate tanh(1)
  Eigen::VectorXd x(1);
  x << 0.7;
  LstmState prev = LstmState::zero(1);
  prev.c[0] = 5.0;
  const LstmState s = lstm_step(x, prev, p);
  const double i = 1.0 / (1.0 + std::exp(-30.0)), f = 1.0 / (1.0 + std::exp(30.0));
  const double c = f * 5.0 + i * std::tanh(1.0);
  EXPECT_NEAR(s.c[0], c, 1e-12);
  EXPECT_NEAR(s.h[0], 0.5 * std::tanh(c), 1e-12);
  EXPECT_NEAR(s.c[0], std::tanh(1.0), 1e-9);
}

TEST(Lstm, ForgetGateCarriesCell) {
  LstmParams p = LstmParams::zeros(2, 3);
  p.gate_rows(Gate::Forget).setConstant(20.0);
  p.gate_rows(Gate::Input).setConstant(-20.0);
  Rng rng(3);
  for (Eigen::Index i = 0; i < p.W.size(); ++i) p.W.data()[i] = rng.uniform(-0.5, 0.5);
  LstmState prev = LstmState::zero(3);
  prev.c << 0.3, -0.8, 1.2;
  const LstmState s = lstm_step(Eigen::Vector2d(0.2, -0.4), prev, p);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(s.c[j], prev.c[j], 1e-3);
}

TEST(Lstm, StepMatchesScalarOracle) {
  Rng rng(17);
  const LstmParams p = LstmParams::random(4, 3, rng);
  const Eigen::VectorXd x = random_seq(4, 1, rng).col(0);
  LstmState s = LstmState::zero(3);
  s.h << 0.1, -0.2, 0.3;
  s.c << 0.5, 0.0, -0.5;
  const LstmState got = lstm_step(x, s, p);
  const rjtest::oracle::State want = rjtest::oracle::step(
      p, std::vector<double>(x.data(), x.data() + x.size()),
      {std::vector<double>(s.h.data(), s.h.data() + 3), std::vector<double>(s.c.data(), s.c.data() + 3)});
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(got.h[j], want.h[static_cast<std::size_t>(j)], 1e-14);
    EXPECT_NEAR(got.c[j], want.c[static_cast<std::size_t>(j)], 1e-14);
    EXPECT_LT(std::abs(got.h[j]), 1.0);
  }
}

TEST(Lstm, BranchForwardIsFoldOfSteps) {
  Rng rng(4);
  const LstmParams p = LstmParams::random(5, 3, rng);
  EXPECT_EQ(branch_forward(Eigen::MatrixXd(5, 0), p), Eigen::VectorXd::Zero(3));
  const Eigen::MatrixXd seq = random_seq(5, 3, rng);
  LstmState s = LstmState::zero(3);
  for (Eigen::Index t = 0; t < 3; ++t) s = lstm_step(seq.col(t), s, p);
  EXPECT_TRUE(branch_forward(seq, p).isApprox(s.h, 1e-15));
  const LstmState one = lstm_step(seq.col(0), LstmState::zero(3), p);
  EXPECT_EQ(branch_forward(seq.leftCols(1), p), one.h);
}

TEST(Lstm, ShapeMismatchIsDimensionError) {
  const LstmParams p = LstmParams::zeros(3, 2);
  EXPECT_THROW(lstm_step(Eigen::VectorXd::Zero(4), LstmState::zero(2), p), DimensionError);
  EXPECT_THROW(branch_forward(Eigen::MatrixXd::Zero(2, 3), p), DimensionError);
}

TEST(Siamese, CosineExamples) {
  const Eigen::Vector3d a(1.0, 2.0, -3.0);
  EXPECT_NEAR(cosine_distance(a, a), 0.0, 1e-15);
  EXPECT_NEAR(cosine_distance(a, -a), 2.0, 1e-15);
  EXPECT_NEAR(cosine_distance(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(similarity(a, a), 1.0, 1e-15);
  EXPECT_NEAR(similarity(a, -a), 0.0, 1e-15);
  EXPECT_NEAR(similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), 0.5, 1e-15);
  EXPECT_EQ(cosine_distance(Eigen::Vector3d::Zero(), a), 1.0);
  EXPECT_EQ(similarity(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), 0.5);
}

TEST(Siamese, CosinePropertiesRandomized) {
  Rng rng(101);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
    Eigen::VectorXd a(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a[i] = rng.normal(0.0, std::pow(10.0, rng.uniform(-3, 3)));
      b[i] = rng.normal(0.0, std::pow(10.0, rng.uniform(-3, 3)));
    }
    const double d = cosine_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 2.0);
    const double s = similarity(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s, 1.0 - d / 2.0);
    const double k = std::exp(rng.uniform(-5, 5)), m = std::exp(rng.uniform(-5, 5));
    EXPECT_NEAR(cosine_distance(k * a, m * b), d, 1e-9);
    EXPECT_NEAR(cosine_distance(b, a), d, 1e-12);
  }
}

TEST(Siamese, BceValues) {
  EXPECT_NEAR(bce_loss(0.5, 0), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(0.5, 1), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(1.0, 1), 0.0, 1e-6);
  EXPECT_NEAR(bce_loss(0.9, 0), -std::log(0.1), 1e-12);
  EXPECT_NEAR(bce_loss(0.0, 1), -std::log(1e-7), 1e-9);
}

TEST(Siamese, ZeroHeadGivesHalf) {
  SiameseModel m = make_model(tiny_config(), 3);
  for (auto& layer : m.params.head) {
    layer.W.setZero();
    layer.b.setZero();
  }
  Rng rng(1);
  EXPECT_EQ(predict(m, random_seq(3, 1, rng), random_seq(3, 4, rng)), 0.5);
}

TEST(Siamese, ForwardMatchesStraightLineOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SiameseModel m = make_model(tiny_config(3, 2, 4), seed);
    Rng rng(seed + 100);
    for (auto t : m.params.tensors()) {
      for (double& x : t) x += rng.uniform(-0.5, 0.5);
    }
    const Eigen::MatrixXd ctx = random_seq(3, 1, rng), w2v = random_seq(3, 5, rng);
    const double got = predict(m, ctx, w2v);
    EXPECT_NEAR(got, rjtest::oracle::score(m, ctx, w2v), 1e-10);
    EXPECT_EQ(got, predict(m, ctx, w2v));
  }
}

TEST(Siamese, FeatureLayout) {
  const Eigen::Vector2d a(1.0, 0.0), b(0.0, 2.0);
  const Eigen::VectorXd f = siamese_features(a, b);
  ASSERT_EQ(f.size(), 6);
  EXPECT_EQ(f[0], 0.0);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_EQ(f[2], 1.0);
  EXPECT_EQ(f[3], 2.0);
  EXPECT_NEAR(f[4], 1.0, 1e-15);
  EXPECT_NEAR(f[5], 0.5, 1e-15);
}

TEST(Siamese, SequencesTruncatedToMaxLength) {
  SiameseConfig c = tiny_config();
  c.max_seq_len = 3;
  const SiameseModel m = make_model(c, 2);
  Rng rng(9);
  const Eigen::MatrixXd ctx = random_seq(3, 1, rng), long_seq = random_seq(3, 7, rng);
  EXPECT_EQ(predict(m, ctx, long_seq), predict(m, ctx, Eigen::MatrixXd(long_seq.leftCols(3))));
}

TEST(Siamese, GradientCheckSmallModels) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto r = rjtest::siamese_grad_check(seed, 4, 8, 5, 50, 1e-4);
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
  }
}

TEST(Siamese, GradientCheckSharedAndDropout) {
  EXPECT_LT(rjtest::siamese_grad_check(7, 3, 5, 4, 50, 1e-4, true).max_rel_error, 1e-4);
  EXPECT_LT(rjtest::siamese_grad_check(8, 3, 5, 4, 50, 1e-4, false, 0.3).max_rel_error, 1e-4);
}

TEST(Siamese, EmptySequencesGiveZeroBranchGradients) {
  const SiameseModel m = make_model(tiny_config(3, 2, 4), 5);
  const ForwardResult r = forward(m, Eigen::MatrixXd(3, 0), Eigen::MatrixXd(3, 0), Mode::Train);
  const SiameseParams g = backward(m, r, 1);
  EXPECT_EQ(g.branch_a.W.norm() + g.branch_a.U.norm() + g.branch_a.b.norm(), 0.0);
  EXPECT_EQ(g.branch_b.W.norm() + g.branch_b.U.norm() + g.branch_b.b.norm(), 0.0);
  EXPECT_GT(g.head.back().b.norm(), 0.0);
}

TEST(Siamese, GradientsScaleLinearly) {
  const SiameseModel m = make_model(tiny_config(4, 3, 5), 6);
  Rng rng(6);
  const ForwardResult r = forward(m, random_seq(4, 1, rng), random_seq(4, 3, rng), Mode::Train);
  const SiameseParams g1 = backward(m, r, 0);
  const SiameseParams g3 = backward(m, r, 0, 3.0);
  const auto a = g1.tensors();
  const auto b = g3.tensors();
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) EXPECT_NEAR(b[t][i], 3.0 * a[t][i], 1e-14 + 1e-12 * std::abs(a[t][i]));
  }
}

TEST(Siamese, SharedWeightsUseOneBranch) {
  SiameseConfig c = tiny_config();
  c.shared_weights = true;
  const SiameseModel m = make_model(c, 1);
  EXPECT_TRUE(m.params.branch_b.empty());
  EXPECT_EQ(&m.word_branch(), &m.params.branch_a);
  const SiameseModel separate = make_model(tiny_config(), 1);
  EXPECT_GT(separate.params.parameter_count(), m.params.parameter_count());
}

TEST(Siamese, DefaultsMatchDocumentedArchitecture) {
  const SiameseConfig c;
  EXPECT_EQ(c.input_dim, 384);
  EXPECT_EQ(c.hidden_dim, 64);
  EXPECT_EQ(c.feature_dim(), 130);
  EXPECT_EQ(c.head_hidden, std::vector<Eigen::Index>{32});
  EXPECT_DOUBLE_EQ(c.dropout, 0.3);
  EXPECT_EQ(c.max_seq_len, 200);
  const SiameseModel m = make_model(c, 42);
  ASSERT_EQ(m.params.head.size(), 2u);
  EXPECT_EQ(m.params.head[0].W.rows(), 32);
  EXPECT_EQ(m.params.head[0].W.cols(), 130);
  EXPECT_EQ(m.params.head[0].activation, Activation::Relu);
  EXPECT_EQ(m.params.head[1].W.rows(), 1);
  EXPECT_EQ(m.params.head[1].activation, Activation::Sigmoid);
  EXPECT_EQ(m.params.branch_a.gate_rows(Gate::Forget), Eigen::VectorXd::Ones(64));
}

TEST(Siamese, DropoutNeedsRandomSource) {
  SiameseConfig c = tiny_config();
  c.dropout = 0.5;
  const SiameseModel m = make_model(c, 1);
  Rng rng(2);
  EXPECT_THROW(forward(m, random_seq(3, 1, rng), random_seq(3, 1, rng), Mode::Train), ArgumentError);
}

TEST(Siamese, DropoutMeanMatchesInferenceLogit) {
  SiameseConfig c = tiny_config(3, 3, 6);
  c.dropout = 0.3;
  SiameseModel m = make_model(c, 12);
  Rng rng(12);
  for (auto& layer : m.params.head) {
    for (Eigen::Index i = 0; i < layer.b.size(); ++i) layer.b[i] = rng.uniform(0.1, 0.5);
  }
  const Eigen::MatrixXd ctx = random_seq(3, 1, rng), w2v = random_seq(3, 3, rng);
  const double infer = forward(m, ctx, w2v, Mode::Infer).logit;
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  Rng masks(99);
  for (int i = 0; i < n; ++i) {
    const double l = forward(m, ctx, w2v, Mode::Train, &masks).logit;
    sum += l;
    sum_sq += l * l;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
  EXPECT_GT(sd, 0.0);
  EXPECT_LE(std::abs(mean - infer), 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Adam, ZeroGradientLeavesParameters) {
  SiameseModel m = make_model(tiny_config(), 1);
  const SiameseParams before = m.params;
  AdamState s = make_adam_state(m.params, 1e-3);
  adam_update(m.params, m.params.zeros_like(), s);
  EXPECT_EQ(s.step, 1);
  const auto a = before.tensors();
  const auto b = std::as_const(m.params).tensors();
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) EXPECT_EQ(a[t][i], b[t][i]);
  }
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  std::vector<double> p{1.0, -2.0, 0.5, 3.0};
  const std::vector<double> g{0.3, -4.0, 1e-3, 0.0};
  AdamState s;
  s.learning_rate = 0.01;
  s.m.assign(1, std::vector<double>(4, 0.0));
  s.v.assign(1, std::vector<double>(4, 0.0));
  const std::vector<std::span<double>> ps{p};
  const std::vector<std::span<const double>> gs{g};
  const std::vector<double> before = p;
  adam_update(ps, gs, s);
  for (std::size_t i = 0; i < 4; ++i) {
    // m_hat = g, v_hat = g^2, so the step is -lr * g / (|g| + eps).
    const double expected = -0.01 * g[i] / (std::abs(g[i]) + 1e-8);
    EXPECT_NEAR(p[i] - before[i], expected, 1e-12);
  }
  EXPECT_NEAR(p[0] - before[0], -0.01, 1e-7);
  EXPECT_NEAR(p[1] - before[1], 0.01, 1e-7);
  for (const auto& v : s.v[0]) EXPECT_GE(v, 0.0);
}

TEST(Adam, Deterministic) {
  SiameseModel m1 = make_model(tiny_config(), 1);
  SiameseModel m2 = m1;
  Rng rng(5);
  const ForwardResult r = forward(m1, random_seq(3, 1, rng), random_seq(3, 2, rng), Mode::Train);
  const SiameseParams g = backward(m1, r, 1);
  AdamState s1 = make_adam_state(m1.params), s2 = make_adam_state(m2.params);
  adam_update(m1.params, g, s1);
  adam_update(m2.params, g, s2);
  const auto a = m1.params.tensors(), b = m2.params.tensors();
  for (std::size_t t = 0; t < a.size(); ++t) {
    for (std::size_t i = 0; i < a[t].size(); ++i) EXPECT_EQ(a[t][i], b[t][i]);
  }
}

TEST(Metrics, Examples) {
  const std::vector<double> perfect{0.9, 0.8, 0.1, 0.2};
  const std::vector<int> labels{1, 1, 0, 0};
  const Metrics m = compute_metrics(perfect, labels);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.f1, 1.0);

  const std::vector<double> half(4, 0.5);
  EXPECT_EQ(compute_metrics(half, labels).accuracy, 0.5);

  const std::vector<double> mixed{0.9, 0.9, 0.1, 0.1};
  const std::vector<int> mixed_labels{1, 0, 1, 0};
  const Metrics c = compute_metrics(mixed, mixed_labels);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_DOUBLE_EQ(c.precision, 0.5);
  EXPECT_DOUBLE_EQ(c.recall, 0.5);
  EXPECT_DOUBLE_EQ(c.f1, 0.5);

  EXPECT_THROW(compute_metrics({}, {}), ArgumentError);
}

TEST(Train, SeparableDataReachesHighAccuracy) {
  const FeatureSet fs = rjtest::separable_features(240, 4, 3);
  std::vector<std::size_t> train_idx, val_idx;
  rjtest::first_and_rest(fs.examples.size(), 40, train_idx, val_idx);
  SiameseConfig c = tiny_config(4, 6, 8);
  c.dropout = 0.1;
  TrainConfig tc;
  tc.max_epochs = 60;
  tc.batch_size = 16;
  tc.learning_rate = 1e-2;
  tc.patience = 60;
  const TrainResult r = train(make_model(c, 3), fs, train_idx, val_idx, tc);
  EXPECT_GE(evaluate(r.model, fs, train_idx).accuracy, 0.95);
  EXPECT_LE(r.report.stopped_epoch - r.report.best_epoch, std::max(tc.patience, 1));
}

TEST(Train, PatienceZeroStopsAfterFirstNonImprovingEpoch) {
  FeatureSet fs = rjtest::separable_features(60, 3, 8);
  std::vector<std::size_t> train_idx, val_idx;
  rjtest::first_and_rest(fs.examples.size(), 20, train_idx, val_idx);
  // Inverted validation labels: fitting the training set raises validation loss.
  for (const std::size_t i : val_idx) fs.examples[i].label = 1 - fs.examples[i].label;
  TrainConfig tc;
  tc.max_epochs = 200;
  tc.batch_size = 8;
  tc.learning_rate = 0.05;
  tc.patience = 0;
  const TrainResult r = train(make_model(tiny_config(3, 2, 3), 8), fs, train_idx, val_idx, tc);
  ASSERT_LT(r.report.stopped_epoch, 200);
  // The stopping epoch is the first one whose loss did not improve.
  const auto& e = r.report.epochs;
  double best = e.front().val_loss;
  for (std::size_t k = 1; k + 1 < e.size(); ++k) {
    EXPECT_LT(e[k].val_loss, best);
    best = e[k].val_loss;
  }
  EXPECT_GE(e.back().val_loss, best);
  EXPECT_EQ(r.report.stopped_epoch - r.report.best_epoch, 1);
}

TEST(Train, DeterministicForFixedSeed) {
  const FeatureSet fs = rjtest::separable_features(80, 3, 5);
  std::vector<std::size_t> train_idx, val_idx;
  rjtest::first_and_rest(fs.examples.size(), 20, train_idx, val_idx);
  SiameseConfig c = tiny_config(3, 3, 4);
  c.dropout = 0.3;
  TrainConfig tc;
  tc.max_epochs = 5;
  tc.batch_size = 8;
  const TrainResult a = train(make_model(c, 5), fs, train_idx, val_idx, tc);
  const TrainResult b = train(make_model(c, 5), fs, train_idx, val_idx, tc);
  EXPECT_EQ(report_json(a.report), report_json(b.report));
  const auto pa = a.model.params.tensors(), pb = b.model.params.tensors();
  for (std::size_t t = 0; t < pa.size(); ++t) {
    for (std::size_t i = 0; i < pa[t].size(); ++i) EXPECT_EQ(pa[t][i], pb[t][i]);
  }
  // Worker threads reduce in a fixed order, so a second multi-worker run
  // repeats itself too.
  tc.workers = 3;
  const TrainResult c1 = train(make_model(c, 5), fs, train_idx, val_idx, tc);
  const TrainResult c2 = train(make_model(c, 5), fs, train_idx, val_idx, tc);
  EXPECT_EQ(report_json(c1.report), report_json(c2.report));
}

TEST(Train, FinalValidationMatchesEvaluate) {
  const FeatureSet fs = rjtest::separable_features(60, 3, 6);
  std::vector<std::size_t> train_idx, val_idx;
  rjtest::first_and_rest(fs.examples.size(), 20, train_idx, val_idx);
  TrainConfig tc;
  tc.max_epochs = 3;
  tc.batch_size = 10;
  const TrainResult r = train(make_model(tiny_config(3, 2, 3), 6), fs, train_idx, val_idx, tc);
  std::stringstream buf;
  save_model(r.model, buf);
  const SiameseModel reloaded = load_model(buf);
  const Metrics m = evaluate(reloaded, fs, val_idx);
  EXPECT_EQ(m.loss, r.report.final_validation.loss);
  EXPECT_EQ(m.accuracy, r.report.final_validation.accuracy);
}

TEST(Train, EmptyTrainingSetIsConfigError) {
  const FeatureSet fs = rjtest::separable_features(10, 3, 6);
  const std::vector<std::size_t> none, val{0, 1};
  EXPECT_THROW(train(make_model(tiny_config(), 1), fs, none, val, TrainConfig{}), ConfigError);
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
  for (bool shared : {false, true}) {
    SiameseConfig c = tiny_config(5, 4, 6);
    c.shared_weights = shared;
    c.head_hidden = {6, 3};
    SiameseModel m = make_model(c, 11);
    round_to_float(m.params);
    std::stringstream first;
    save_model(m, first);
    const std::string bytes = first.str();
    EXPECT_EQ(bytes.substr(0, 4), "SIAM");
    std::istringstream in(bytes);
    const SiameseModel loaded = load_model(in);
    EXPECT_EQ(loaded.config.hidden_dim, 4);
    EXPECT_EQ(loaded.config.shared_weights, shared);
    EXPECT_EQ(loaded.config.head_hidden, c.head_hidden);
    std::stringstream second;
    save_model(loaded, second);
    EXPECT_EQ(second.str(), bytes);
    Rng rng(1);
    const Eigen::MatrixXd ctx = random_seq(5, 1, rng), w2v = random_seq(5, 2, rng);
    EXPECT_EQ(predict(loaded, ctx, w2v), predict(m, ctx, w2v));
  }
}

TEST(Checkpoint, CorruptionDetected) {
  const SiameseModel m = make_model(tiny_config(), 2);
  std::stringstream buf;
  save_model(m, buf);
  std::string bytes = buf.str();

  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream bad_magic(bad);
  EXPECT_THROW(load_model(bad_magic), FormatError);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_model(truncated), FormatError);

  std::istringstream trailing(bytes + "zz");
  EXPECT_THROW(load_model(trailing), FormatError);

  EXPECT_THROW(load_model(std::filesystem::path("/nonexistent/model.siam")), IoError);
}
