// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/siamese.hpp"

#include <algorithm>
#include <cmath>

#include "reviewjudge/error.hpp"
#include "reviewjudge/word2vec.hpp"

namespace reviewjudge {

void SiameseConfig::validate() const {
  if (input_dim <= 0) throw ConfigError("model.input_dim must be > 0");
  if (hidden_dim <= 0) throw ConfigError("model.hidden must be > 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model.dropout must be in [0,1)");
  if (max_seq_len <= 0) throw ConfigError("model.max_seq_len must be > 0");
  for (auto w : head_hidden) {
    if (w <= 0) throw ConfigError("model.head widths must be > 0");
  }
}

namespace {

void append(std::vector<std::span<double>>& out, Eigen::MatrixXd& m) {
  if (m.size() > 0) out.emplace_back(m.data(), static_cast<std::size_t>(m.size()));
}
void append(std::vector<std::span<double>>& out, Eigen::VectorXd& v) {
  if (v.size() > 0) out.emplace_back(v.data(), static_cast<std::size_t>(v.size()));
}

LstmParams zeros_like(const LstmParams& p) {
  return {Eigen::MatrixXd::Zero(p.W.rows(), p.W.cols()), Eigen::MatrixXd::Zero(p.U.rows(), p.U.cols()),
          Eigen::VectorXd::Zero(p.b.size())};
}

}  // namespace

SiameseParams SiameseParams::zeros_like() const {
  SiameseParams z;
  z.branch_a = reviewjudge::zeros_like(branch_a);
  z.branch_b = reviewjudge::zeros_like(branch_b);
  for (const auto& layer : head) {
    z.head.push_back({Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()), Eigen::VectorXd::Zero(layer.b.size()),
                      layer.activation});
  }
  return z;
}

std::vector<std::span<double>> SiameseParams::tensors() {
  std::vector<std::span<double>> out;
  for (LstmParams* p : {&branch_a, &branch_b}) {
    append(out, p->W);
    append(out, p->U);
    append(out, p->b);
  }
  for (auto& layer : head) {
    append(out, layer.W);
    append(out, layer.b);
  }
  return out;
}

std::vector<std::span<const double>> SiameseParams::tensors() const {
  auto mutable_views = const_cast<SiameseParams*>(this)->tensors();
  return {mutable_views.begin(), mutable_views.end()};
}

std::size_t SiameseParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

bool SiameseParams::all_finite() const {
  for (auto t : tensors()) {
    if (!std::all_of(t.begin(), t.end(), [](double x) { return std::isfinite(x); })) return false;
  }
  return true;
}

SiameseModel make_model(const SiameseConfig& config, std::uint64_t seed) {
  config.validate();
  SiameseModel model;
  model.config = config;
  Rng rng(derive_seed(seed, 0x51A3));
  model.params.branch_a = LstmParams::random(config.input_dim, config.hidden_dim, rng);
  if (!config.shared_weights) model.params.branch_b = LstmParams::random(config.input_dim, config.hidden_dim, rng);

  Eigen::Index in = config.feature_dim();
  std::vector<Eigen::Index> widths = config.head_hidden;
  widths.push_back(1);
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const Eigen::Index out = widths[l];
    const bool last = l + 1 == widths.size();
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out),
                     last ? Activation::Sigmoid : Activation::Relu};
    const double limit = last ? std::sqrt(6.0 / static_cast<double>(in + out)) : std::sqrt(6.0 / static_cast<double>(in));
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) layer.W(i, j) = rng.uniform(-limit, limit);
    }
    model.params.head.push_back(std::move(layer));
    in = out;
  }
  return model;
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  const Eigen::VectorXd ua = a / na;
  const Eigen::VectorXd ub = b / nb;
  const double cos = ua.dot(ub) / (ua.norm() * ub.norm());
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 1.0 - cosine_distance(a, b) / 2.0; }

double bce_loss(double score, int label) {
  const double s = std::clamp(score, kBceEpsilon, 1.0 - kBceEpsilon);
  return label != 0 ? -std::log(s) : -std::log(1.0 - s);
}

Eigen::VectorXd siamese_features(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index H = a.size();
  Eigen::VectorXd f(2 * H + 2);
  f.head(H) = a.cwiseProduct(b);
  f.segment(H, H) = (a - b).cwiseAbs();
  const double dist = cosine_distance(a, b);
  f[2 * H] = dist;
  f[2 * H + 1] = 1.0 - dist / 2.0;
  return f;
}

ForwardResult forward(const SiameseModel& model, const Eigen::MatrixXd& ctx_seq, const Eigen::MatrixXd& w2v_seq,
                      Mode mode, Rng* rng) {
  const SiameseConfig& cfg = model.config;
  if (mode == Mode::Train && cfg.dropout > 0.0 && rng == nullptr) {
    throw ArgumentError("train-mode forward with dropout needs a random source");
  }
  ForwardResult r;
  ForwardCache& cache = r.cache;

  const auto clip = [&](const Eigen::MatrixXd& s) -> Eigen::MatrixXd {
    return s.cols() > cfg.max_seq_len ? Eigen::MatrixXd(s.leftCols(cfg.max_seq_len)) : s;
  };
  cache.a = branch_forward(clip(ctx_seq), model.params.branch_a, &cache.trace_a);
  cache.b = branch_forward(clip(w2v_seq), model.word_branch(), &cache.trace_b);
  cache.features = siamese_features(cache.a, cache.b);

  const auto& head = model.params.head;
  if (head.empty()) throw ConfigError("model has no head layers");
  Eigen::VectorXd x = cache.features;
  for (std::size_t l = 0; l < head.size(); ++l) {
    const DenseLayer& layer = head[l];
    if (layer.W.cols() != x.size()) {
      throw DimensionError("head layer " + std::to_string(l) + " expects " + std::to_string(layer.W.cols()) +
                           " inputs, got " + std::to_string(x.size()));
    }
    cache.layer_input.push_back(x);
    Eigen::VectorXd z = layer.W * x + layer.b;
    cache.pre.push_back(z);
    if (l + 1 == head.size()) {
      if (z.size() != 1) throw DimensionError("final head layer must have one output unit");
      r.logit = z[0];
      r.score = sigmoid(z[0]);
      break;
    }
    x = layer.activation == Activation::Relu ? Eigen::VectorXd(z.cwiseMax(0.0)) : Eigen::VectorXd(z.unaryExpr([](double v) { return sigmoid(v); }));
    if (mode == Mode::Train && cfg.dropout > 0.0) {
      const double keep = 1.0 - cfg.dropout;
      Eigen::VectorXd mask(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) mask[k] = rng->uniform() < keep ? 1.0 / keep : 0.0;
      x = x.cwiseProduct(mask);
      cache.mask.push_back(std::move(mask));
    } else {
      cache.mask.emplace_back();
    }
  }
  return r;
}

void backward(const SiameseModel& model, const ForwardResult& result, int label, SiameseParams& grad, double scale) {
  const ForwardCache& cache = result.cache;
  const auto& head = model.params.head;
  const Eigen::Index H = model.config.hidden_dim;

  // d(loss)/d(logit); zero where the clamp in bce_loss is active.
  const double s = result.score;
  double d_logit = 0.0;
  if (s > kBceEpsilon && s < 1.0 - kBceEpsilon) d_logit = (s - static_cast<double>(label != 0)) * scale;

  Eigen::VectorXd dz = Eigen::VectorXd::Constant(1, d_logit);
  Eigen::VectorXd dx;
  for (std::size_t l = head.size(); l-- > 0;) {
    const DenseLayer& layer = head[l];
    grad.head[l].W.noalias() += dz * cache.layer_input[l].transpose();
    grad.head[l].b += dz;
    dx.noalias() = layer.W.transpose() * dz;
    if (l == 0) break;
    // Back through dropout and the activation of layer l-1.
    const std::size_t p = l - 1;
    if (cache.mask[p].size() > 0) dx.array() *= cache.mask[p].array();
    const Eigen::VectorXd& z = cache.pre[p];
    if (head[p].activation == Activation::Relu) {
      dz = dx.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    } else {
      dz = dx.cwiseProduct(z.unaryExpr([](double v) {
        const double g = sigmoid(v);
        return g * (1.0 - g);
      }));
    }
  }

  // Feature vector -> branch outputs.
  const Eigen::VectorXd& a = cache.a;
  const Eigen::VectorXd& b = cache.b;
  Eigen::VectorXd da = dx.head(H).cwiseProduct(b);
  Eigen::VectorXd db = dx.head(H).cwiseProduct(a);
  const Eigen::VectorXd sign = (a - b).unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
  da += dx.segment(H, H).cwiseProduct(sign);
  db -= dx.segment(H, H).cwiseProduct(sign);

  const double na = a.norm();
  const double nb = b.norm();
  const double dist = cosine_distance(a, b);
  if (na > 0.0 && nb > 0.0 && dist > 0.0 && dist < 2.0) {
    // similarity = 1 - dist/2 and dist = 1 - cos.
    const double d_cos = -dx[2 * H] + 0.5 * dx[2 * H + 1];
    const double cos = a.dot(b) / (na * nb);
    da += d_cos * (b / (na * nb) - cos * a / (na * na));
    db += d_cos * (a / (na * nb) - cos * b / (nb * nb));
  }

  branch_backward(cache.trace_a, model.params.branch_a, da, grad.branch_a);
  if (model.config.shared_weights) {
    branch_backward(cache.trace_b, model.params.branch_a, db, grad.branch_a);
  } else {
    branch_backward(cache.trace_b, model.params.branch_b, db, grad.branch_b);
  }
}

SiameseParams backward(const SiameseModel& model, const ForwardResult& result, int label, double scale) {
  SiameseParams grad = model.params.zeros_like();
  backward(model, result, label, grad, scale);
  return grad;
}

}  // namespace reviewjudge
