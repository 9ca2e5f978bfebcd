// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "reviewjudge/preprocess.hpp"
#include "reviewjudge/rng.hpp"

namespace reviewjudge {

struct Vocabulary {
  std::vector<std::string> tokens;  // index -> token
  std::unordered_map<std::string, std::int32_t> token_to_index;
  std::vector<std::int64_t> counts;
  std::int64_t min_count = 1;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::optional<std::int32_t> index_of(std::string_view token) const;
};

/// Tokens with frequency >= min_count, indexed by descending frequency with
/// lexicographic tie-break.
Vocabulary build_vocab(std::span<const TokenizedReview> corpus, std::int64_t min_count = 1);

struct W2VConfig {
  std::size_t dim = 384;
  int window = 5;
  std::int64_t min_count = 1;
  unsigned workers = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
  /// Use the full window for every center instead of sampling its width.
  bool fixed_window = false;

  void validate() const;
};

/// Row-major V x dim matrices. `input` rows are the published token
/// embeddings; `output` holds the context-side vectors and is empty for
/// matrices loaded from disk.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> input;
  std::vector<float> output;

  std::span<const float> vector(std::size_t i) const { return {input.data() + i * dim, dim}; }
  std::span<float> input_row(std::size_t i) { return {input.data() + i * dim, dim}; }
  std::span<float> output_row(std::size_t i) { return {output.data() + i * dim, dim}; }
  bool all_finite() const;
};

struct TrainingPair {
  std::int32_t center;
  std::int32_t context;
  bool operator==(const TrainingPair&) const = default;
};

/// Maps tokens to vocabulary indices, dropping out-of-vocabulary tokens.
std::vector<std::int32_t> to_indices(std::span<const std::string> tokens, const Vocabulary& vocab);

/// (center, context) pairs within a per-center window. With fixed_window
/// every center uses `window`; otherwise its width is drawn uniformly from
/// [1, window].
std::vector<TrainingPair> training_pairs(std::span<const std::int32_t> indices, int window, Rng& rng,
                                         bool fixed_window = false);

/// Draws from the unigram distribution raised to the 3/4 power.
class NegativeSampler {
 public:
  explicit NegativeSampler(const Vocabulary& vocab, double power = 0.75);

  /// k draws, resampling any draw equal to `exclude`.
  std::vector<std::int32_t> sample(Rng& rng, int k, std::int32_t exclude) const;
  void sample_into(Rng& rng, std::span<std::int32_t> out, std::int32_t exclude) const;
  /// Probability of index i before exclusion.
  double probability(std::size_t i) const;

 private:
  std::vector<double> cumulative_;
};

inline std::vector<std::int32_t> negative_sample(const Vocabulary& vocab, Rng& rng, int k, std::int32_t exclude) {
  return NegativeSampler(vocab).sample(rng, k, exclude);
}

/// -log(sigmoid(x)), stable for large |x|.
template <typename T>
T neg_log_sigmoid(T x) {
  return x >= T(0) ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

/// Negative-sampling loss of one pair,
///   -log s(u_o . v_c) - sum_j log s(-u_j . v_c),
/// and its gradients with respect to v_c, u_o and each u_j (written, not
/// accumulated). `negatives` and `grad_negatives` are k x dim row-major.
template <typename T>
T sgns_pair_loss(std::span<const T> center, std::span<const T> context, std::span<const T> negatives,
                 std::span<T> grad_center, std::span<T> grad_context, std::span<T> grad_negatives) {
  const std::size_t dim = center.size();
  const std::size_t k = dim == 0 ? 0 : negatives.size() / dim;
  auto dot = [dim](const T* a, const T* b) {
    T s = 0;
    for (std::size_t d = 0; d < dim; ++d) s += a[d] * b[d];
    return s;
  };

  const T pos = dot(center.data(), context.data());
  T loss = neg_log_sigmoid(pos);
  const T g_pos = sigmoid(pos) - T(1);
  for (std::size_t d = 0; d < dim; ++d) {
    grad_center[d] = g_pos * context[d];
    grad_context[d] = g_pos * center[d];
  }
  for (std::size_t j = 0; j < k; ++j) {
    const T* u = negatives.data() + j * dim;
    const T neg = dot(center.data(), u);
    loss += neg_log_sigmoid(-neg);
    const T g_neg = sigmoid(neg);
    T* gu = grad_negatives.data() + j * dim;
    for (std::size_t d = 0; d < dim; ++d) {
      grad_center[d] += g_neg * u[d];
      gu[d] = g_neg * center[d];
    }
  }
  return loss;
}

struct Word2Vec {
  Vocabulary vocab;
  EmbeddingMatrix matrix;
  /// Mean pair loss of each epoch.
  std::vector<double> epoch_loss;
};

/// Uniform [-0.5/dim, 0.5/dim] input vectors, zero output vectors.
EmbeddingMatrix initialize_embeddings(std::size_t rows, std::size_t dim, std::uint64_t seed);

/// Skip-gram with negative sampling over the cleaned corpus. The learning
/// rate decays linearly to 10% of its initial value. With workers == 1 the
/// result is a pure function of (corpus, config).
Word2Vec train_skipgram(std::span<const TokenizedReview> corpus, const W2VConfig& config);
Word2Vec train_skipgram(std::span<const TokenizedReview> corpus, Vocabulary vocab, const W2VConfig& config);

/// One D-vector per in-vocabulary token, as the columns of a dim x n matrix.
Eigen::MatrixXd embed_tokens(const TokenizedReview& review, const EmbeddingMatrix& matrix,
                             const Vocabulary& vocab);
Eigen::MatrixXd embed_indices(std::span<const std::int32_t> indices, const EmbeddingMatrix& matrix);

/// Top-k tokens by cosine similarity to `token`, query excluded.
std::vector<std::pair<std::string, double>> nearest_neighbors(std::string_view token, std::size_t k,
                                                              const EmbeddingMatrix& matrix,
                                                              const Vocabulary& vocab);

double cosine(std::span<const float> a, std::span<const float> b);

/// W2V1 binary: "W2V1", u32 V, u32 dim, then V x (u16 len, token bytes,
/// dim f32), little-endian. Only input vectors are stored.
void save_word2vec(const std::filesystem::path& path, const Vocabulary& vocab, const EmbeddingMatrix& matrix);
void save_word2vec(std::ostream& out, const Vocabulary& vocab, const EmbeddingMatrix& matrix);
/// Loaded vocabularies keep file order and carry zero counts.
Word2Vec load_word2vec(const std::filesystem::path& path);
Word2Vec load_word2vec(std::istream& in);

/// "token v1 v2 ... vdim" per line.
void save_word2vec_text(const std::filesystem::path& path, const Vocabulary& vocab, const EmbeddingMatrix& matrix);
Word2Vec load_word2vec_text(const std::filesystem::path& path);

}  // namespace reviewjudge
