// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <thread>

#include "reviewjudge/error.hpp"

namespace reviewjudge {

AdamState make_adam_state(const SiameseParams& params, double learning_rate) {
  AdamState s;
  s.learning_rate = learning_rate;
  for (auto t : params.tensors()) {
    s.m.emplace_back(t.size(), 0.0);
    s.v.emplace_back(t.size(), 0.0);
  }
  return s;
}

void adam_update(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
                 AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() || params.size() != state.v.size()) {
    throw DimensionError("Adam: parameter, gradient and moment tensor counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k];
    auto g = grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (p.size() != g.size() || p.size() != m.size()) throw DimensionError("Adam: tensor shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void adam_update(SiameseParams& params, const SiameseParams& grads, AdamState& state) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  adam_update(p, g, state);
}

Eigen::MatrixXd FeatureSet::token_sequence(const Example& e, Eigen::Index max_len) const {
  const auto n = std::min<Eigen::Index>(static_cast<Eigen::Index>(e.token_ids.size()), max_len);
  Eigen::MatrixXd seq(token_table.rows(), n);
  for (Eigen::Index t = 0; t < n; ++t) seq.col(t) = token_table.col(e.token_ids[static_cast<std::size_t>(t)]);
  return seq;
}

ForwardResult forward_example(const SiameseModel& model, const FeatureSet& features, const Example& e, Mode mode,
                              Rng* rng) {
  return forward(model, features.context_sequence(e), features.token_sequence(e, model.config.max_seq_len), mode,
                 rng);
}

Metrics compute_metrics_from_predictions(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.empty()) throw ArgumentError("cannot compute metrics on an empty set");
  if (predicted.size() != labels.size()) throw DimensionError("prediction and label counts differ");
  Metrics m;
  m.count = predicted.size();
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred = predicted[i] != 0;
    const bool truth = labels[i] != 0;
    if (pred && truth) ++m.tp;
    else if (pred && !truth) ++m.fp;
    else if (!pred && truth) ++m.fn;
    else ++m.tn;
  }
  const auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  m.accuracy = ratio(m.tp + m.tn, m.count);
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.empty()) throw ArgumentError("cannot compute metrics on an empty set");
  if (scores.size() != labels.size()) throw DimensionError("score and label counts differ");
  std::vector<int> predicted(scores.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    predicted[i] = scores[i] >= threshold ? 1 : 0;
    loss += bce_loss(scores[i], labels[i]);
  }
  Metrics m = compute_metrics_from_predictions(predicted, labels);
  m.loss = loss / static_cast<double>(scores.size());
  return m;
}

std::vector<double> predict_scores(const SiameseModel& model, const FeatureSet& features,
                                   std::span<const std::size_t> indices, unsigned workers) {
  std::vector<double> scores(indices.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = forward_example(model, features, features.examples[indices[i]]).score;
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, indices.size()))));
  if (workers == 1) {
    run(0, indices.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (indices.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(indices.size(), w * chunk);
      const std::size_t end = std::min(indices.size(), begin + chunk);
      pool.emplace_back(run, begin, end);
    }
  }
  return scores;
}

Metrics evaluate(const SiameseModel& model, const FeatureSet& features, std::span<const std::size_t> indices,
                 double threshold, unsigned workers) {
  const auto scores = predict_scores(model, features, indices, workers);
  std::vector<int> labels(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) labels[i] = features.examples[indices[i]].label;
  return compute_metrics(scores, labels, threshold);
}

void TrainConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("model.max_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("model.batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("model.learning_rate must be > 0");
  if (patience < 0) throw ConfigError("model.patience must be >= 0");
}

void round_to_float(SiameseParams& params) {
  for (auto t : params.tensors()) {
    for (double& x : t) x = static_cast<double>(static_cast<float>(x));
  }
}

namespace {

struct BatchStats {
  double loss = 0.0;
  std::size_t correct = 0;
};

// Forward + backward for samples [begin, end) of `order`, gradients added
// into `grad`. Each sample draws dropout masks from its own seeded stream so
// results do not depend on how samples are distributed over threads.
BatchStats accumulate(const SiameseModel& model, const FeatureSet& features, std::span<const std::size_t> order,
                      std::size_t begin, std::size_t end, double scale, std::uint64_t seed, int epoch,
                      SiameseParams& grad) {
  BatchStats stats;
  for (std::size_t i = begin; i < end; ++i) {
    const Example& e = features.examples[order[i]];
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(epoch) << 32 | 0xD0, i));
    const ForwardResult r = forward_example(model, features, e, Mode::Train, &rng);
    stats.loss += bce_loss(r.score, e.label);
    stats.correct += static_cast<std::size_t>((r.score >= 0.5 ? 1 : 0) == e.label);
    backward(model, r, e.label, grad, scale);
  }
  return stats;
}

}  // namespace

TrainResult train(const SiameseModel& initial, const FeatureSet& features, std::span<const std::size_t> train_idx,
                  std::span<const std::size_t> val_idx, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_idx.empty()) throw ConfigError("training set is empty");
  if (val_idx.empty()) throw ConfigError("validation set is empty");

  SiameseModel model = initial;
  AdamState adam = make_adam_state(model.params, config.learning_rate);
  SiameseParams best = model.params;
  TrainReport report;
  report.patience = config.patience;
  report.best_val_loss = std::numeric_limits<double>::infinity();

  // A patience of 0 still lets one non-improving epoch through.
  const int stop_after = std::max(config.patience, 1);
  int since_best = 0;
  const unsigned workers = std::max(1u, config.workers);
  std::vector<std::size_t> order(train_idx.begin(), train_idx.end());

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    std::copy(train_idx.begin(), train_idx.end(), order.begin());
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    BatchStats epoch_stats;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      SiameseParams grad = model.params.zeros_like();

      const unsigned used = std::min<unsigned>(workers, static_cast<unsigned>(stop - start));
      if (used <= 1) {
        const BatchStats s = accumulate(model, features, order, start, stop, scale, config.seed, epoch, grad);
        epoch_stats.loss += s.loss;
        epoch_stats.correct += s.correct;
      } else {
        std::vector<SiameseParams> partial(used, grad);
        std::vector<BatchStats> stats(used);
        const std::size_t chunk = (stop - start + used - 1) / used;
        {
          std::vector<std::jthread> pool;
          for (unsigned w = 0; w < used; ++w) {
            const std::size_t b = std::min(stop, start + w * chunk);
            const std::size_t e = std::min(stop, b + chunk);
            pool.emplace_back([&, w, b, e] {
              stats[w] = accumulate(model, features, order, b, e, scale, config.seed, epoch, partial[w]);
            });
          }
        }
        auto dst = grad.tensors();
        for (unsigned w = 0; w < used; ++w) {
          const auto src = partial[w].tensors();
          for (std::size_t k = 0; k < dst.size(); ++k) {
            for (std::size_t i = 0; i < dst[k].size(); ++i) dst[k][i] += src[k][i];
          }
          epoch_stats.loss += stats[w].loss;
          epoch_stats.correct += stats[w].correct;
        }
      }
      adam_update(model.params, grad, adam);
    }
    if (!model.params.all_finite()) {
      throw Error("training diverged: non-finite parameter after epoch " + std::to_string(epoch));
    }

    const Metrics val = evaluate(model, features, val_idx, 0.5, workers);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_stats.loss / static_cast<double>(order.size());
    rec.train_acc = static_cast<double>(epoch_stats.correct) / static_cast<double>(order.size());
    rec.val_loss = val.loss;
    rec.val_acc = val.accuracy;
    report.epochs.push_back(rec);
    report.stopped_epoch = epoch;
    if (on_epoch) on_epoch(rec);

    if (val.loss < report.best_val_loss) {
      report.best_val_loss = val.loss;
      report.best_epoch = epoch;
      best = model.params;
      since_best = 0;
    } else if (++since_best >= stop_after) {
      break;
    }
  }

  model.params = std::move(best);
  round_to_float(model.params);
  report.final_validation = evaluate(model, features, val_idx, 0.5, workers);
  return {std::move(model), std::move(report)};
}

namespace {

nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  return {{"count", m.count},
          {"loss", m.loss},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}}}};
}

}  // namespace

std::string metrics_json(const Metrics& m) { return metrics_to_json(m).dump(2); }

std::string report_json(const TrainReport& report) {
  nlohmann::ordered_json epochs = nlohmann::ordered_json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_acc", e.train_acc},
                      {"val_loss", e.val_loss},
                      {"val_acc", e.val_acc}});
  }
  nlohmann::ordered_json j = {{"epochs", epochs},
                              {"stopped_epoch", report.stopped_epoch},
                              {"best_epoch", report.best_epoch},
                              {"best_val_loss", report.best_val_loss},
                              {"patience", report.patience},
                              {"final_validation", metrics_to_json(report.final_validation)}};
  return j.dump(2);
}

}  // namespace reviewjudge
