// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/word2vec.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "reviewjudge/binary_io.hpp"
#include "reviewjudge/error.hpp"

namespace reviewjudge {

std::optional<std::int32_t> Vocabulary::index_of(std::string_view token) const {
  auto it = token_to_index.find(std::string(token));
  if (it == token_to_index.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(std::span<const TokenizedReview> corpus, std::int64_t min_count) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& r : corpus) {
    for (const auto& t : r.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  vocab.min_count = min_count;
  vocab.tokens.reserve(kept.size());
  vocab.counts.reserve(kept.size());
  for (auto& [token, count] : kept) {
    vocab.token_to_index.emplace(token, static_cast<std::int32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(token));
    vocab.counts.push_back(count);
  }
  return vocab;
}

void W2VConfig::validate() const {
  if (dim == 0) throw ConfigError("w2v.dim must be > 0");
  if (window < 1) throw ConfigError("w2v.window must be >= 1");
  if (negatives < 1) throw ConfigError("w2v.negatives must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("w2v.learning_rate must be > 0");
  if (epochs < 0) throw ConfigError("w2v.epochs must be >= 0");
  if (min_count < 0) throw ConfigError("w2v.min_count must be >= 0");
}

bool EmbeddingMatrix::all_finite() const {
  auto finite = [](float x) { return std::isfinite(x); };
  return std::all_of(input.begin(), input.end(), finite) && std::all_of(output.begin(), output.end(), finite);
}

std::vector<std::int32_t> to_indices(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<std::int32_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto idx = vocab.index_of(t)) out.push_back(*idx);
  }
  return out;
}

std::vector<TrainingPair> training_pairs(std::span<const std::int32_t> indices, int window, Rng& rng,
                                         bool fixed_window) {
  std::vector<TrainingPair> pairs;
  const auto n = static_cast<std::ptrdiff_t>(indices.size());
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const std::ptrdiff_t w = fixed_window ? window : rng.between(1, window);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - w);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, t + w);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j != t) pairs.push_back({indices[t], indices[j]});
    }
  }
  return pairs;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
  if (vocab.size() < 2) throw ArgumentError("negative sampling needs a vocabulary of at least 2 tokens");
  cumulative_.resize(vocab.size());
  const bool have_counts = std::any_of(vocab.counts.begin(), vocab.counts.end(), [](auto c) { return c > 0; });
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double c = have_counts ? static_cast<double>(vocab.counts[i]) : 1.0;
    total += std::pow(c, power);
    cumulative_[i] = total;
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

double NegativeSampler::probability(std::size_t i) const {
  return i == 0 ? cumulative_[0] : cumulative_[i] - cumulative_[i - 1];
}

void NegativeSampler::sample_into(Rng& rng, std::span<std::int32_t> out, std::int32_t exclude) const {
  for (auto& slot : out) {
    std::int32_t draw;
    do {
      const double u = rng.uniform();
      draw = static_cast<std::int32_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                       cumulative_.begin());
      draw = std::min<std::int32_t>(draw, static_cast<std::int32_t>(cumulative_.size()) - 1);
    } while (draw == exclude);
    slot = draw;
  }
}

std::vector<std::int32_t> NegativeSampler::sample(Rng& rng, int k, std::int32_t exclude) const {
  std::vector<std::int32_t> out(static_cast<std::size_t>(std::max(0, k)));
  sample_into(rng, out, exclude);
  return out;
}

EmbeddingMatrix initialize_embeddings(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  EmbeddingMatrix m;
  m.rows = rows;
  m.dim = dim;
  m.input.resize(rows * dim);
  m.output.assign(rows * dim, 0.0f);
  Rng rng(derive_seed(seed, 0x1417));
  const double half = 0.5 / static_cast<double>(dim);
  for (float& x : m.input) x = static_cast<float>(rng.uniform(-half, half));
  return m;
}

namespace {

// Row access for lock-free training. Several workers may touch the same
// row; relaxed atomics make the races well defined while still allowing
// lost updates, as in the canonical implementation.
void load_row(const float* src, float* dst, std::size_t dim) {
  for (std::size_t d = 0; d < dim; ++d) {
    dst[d] = std::atomic_ref<float>(*const_cast<float*>(src + d)).load(std::memory_order_relaxed);
  }
}

void add_row(float* dst, const float* grad, float scale, std::size_t dim) {
  for (std::size_t d = 0; d < dim; ++d) {
    std::atomic_ref<float> cell(dst[d]);
    cell.store(cell.load(std::memory_order_relaxed) + scale * grad[d], std::memory_order_relaxed);
  }
}

struct PairScratch {
  std::vector<float> center, context, negatives;
  std::vector<float> g_center, g_context, g_negatives;
  std::vector<std::int32_t> neg_index;

  PairScratch(std::size_t dim, int k)
      : center(dim),
        context(dim),
        negatives(dim * static_cast<std::size_t>(k)),
        g_center(dim),
        g_context(dim),
        g_negatives(dim * static_cast<std::size_t>(k)),
        neg_index(static_cast<std::size_t>(k)) {}
};

}  // namespace

Word2Vec train_skipgram(std::span<const TokenizedReview> corpus, const W2VConfig& config) {
  config.validate();
  return train_skipgram(corpus, build_vocab(corpus, config.min_count), config);
}

Word2Vec train_skipgram(std::span<const TokenizedReview> corpus, Vocabulary vocab, const W2VConfig& config) {
  config.validate();
  if (vocab.empty()) throw ConfigError("cannot train word2vec on an empty vocabulary");

  Word2Vec result;
  result.matrix = initialize_embeddings(vocab.size(), config.dim, config.seed);
  result.vocab = std::move(vocab);
  if (config.epochs == 0) return result;

  const std::size_t dim = config.dim;
  const int k = config.negatives;
  std::vector<std::vector<std::int32_t>> sentences;
  sentences.reserve(corpus.size());
  std::uint64_t total_words = 0;
  for (const auto& r : corpus) {
    sentences.push_back(to_indices(r.tokens, result.vocab));
    total_words += sentences.back().size();
  }
  const double work = static_cast<double>(total_words) * config.epochs;

  // A one-token vocabulary has nothing to contrast against.
  std::optional<NegativeSampler> sampler;
  if (result.vocab.size() >= 2) sampler.emplace(result.vocab);

  EmbeddingMatrix& m = result.matrix;
  std::atomic<std::uint64_t> words_done{0};
  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(std::max<std::size_t>(1, sentences.size()))));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<double> loss_sum(workers, 0.0);
    std::vector<std::uint64_t> pair_count(workers, 0);

    auto run = [&](unsigned worker) {
      PairScratch s(dim, k);
      for (std::size_t i = worker; i < sentences.size(); i += workers) {
        const auto& sentence = sentences[i];
        if (sentence.empty()) continue;
        const double progress = static_cast<double>(words_done.load(std::memory_order_relaxed)) / work;
        const float lr = static_cast<float>(config.learning_rate * std::max(0.1, 1.0 - 0.9 * progress));

        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1, i));
        const auto pairs = training_pairs(sentence, config.window, rng, config.fixed_window);
        for (const TrainingPair& p : pairs) {
          if (!sampler) break;
          sampler->sample_into(rng, s.neg_index, p.context);
          load_row(&m.input[static_cast<std::size_t>(p.center) * dim], s.center.data(), dim);
          load_row(&m.output[static_cast<std::size_t>(p.context) * dim], s.context.data(), dim);
          for (int j = 0; j < k; ++j) {
            load_row(&m.output[static_cast<std::size_t>(s.neg_index[j]) * dim], &s.negatives[j * dim], dim);
          }
          const float loss = sgns_pair_loss<float>(s.center, s.context, s.negatives, s.g_center, s.g_context,
                                                   s.g_negatives);
          loss_sum[worker] += loss;
          ++pair_count[worker];
          add_row(&m.output[static_cast<std::size_t>(p.context) * dim], s.g_context.data(), -lr, dim);
          for (int j = 0; j < k; ++j) {
            add_row(&m.output[static_cast<std::size_t>(s.neg_index[j]) * dim], &s.g_negatives[j * dim], -lr, dim);
          }
          add_row(&m.input[static_cast<std::size_t>(p.center) * dim], s.g_center.data(), -lr, dim);
        }
        words_done.fetch_add(sentence.size(), std::memory_order_relaxed);
      }
    };

    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    const double total_loss = std::accumulate(loss_sum.begin(), loss_sum.end(), 0.0);
    const auto total_pairs = std::accumulate(pair_count.begin(), pair_count.end(), std::uint64_t{0});
    result.epoch_loss.push_back(total_pairs > 0 ? total_loss / static_cast<double>(total_pairs) : 0.0);
    if (!m.all_finite()) {
      throw Error("word2vec training diverged: non-finite embedding after epoch " + std::to_string(epoch + 1));
    }
  }
  return result;
}

Eigen::MatrixXd embed_indices(std::span<const std::int32_t> indices, const EmbeddingMatrix& matrix) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(matrix.dim), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const auto row = matrix.vector(static_cast<std::size_t>(indices[t]));
    for (std::size_t d = 0; d < matrix.dim; ++d) {
      out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = row[d];
    }
  }
  return out;
}

Eigen::MatrixXd embed_tokens(const TokenizedReview& review, const EmbeddingMatrix& matrix, const Vocabulary& vocab) {
  return embed_indices(to_indices(review.tokens, vocab), matrix);
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    dot += static_cast<double>(a[d]) * b[d];
    na += static_cast<double>(a[d]) * a[d];
    nb += static_cast<double>(b[d]) * b[d];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::pair<std::string, double>> nearest_neighbors(std::string_view token, std::size_t k,
                                                              const EmbeddingMatrix& matrix,
                                                              const Vocabulary& vocab) {
  const auto query = vocab.index_of(token);
  if (!query) throw LookupError("token not in vocabulary: " + std::string(token));
  std::vector<std::pair<std::string, double>> all;
  all.reserve(vocab.size());
  const auto qv = matrix.vector(static_cast<std::size_t>(*query));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (static_cast<std::int32_t>(i) == *query) continue;
    all.emplace_back(vocab.tokens[i], cosine(qv, matrix.vector(i)));
  }
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  all.resize(k);
  return all;
}

void save_word2vec(std::ostream& out, const Vocabulary& vocab, const EmbeddingMatrix& matrix) {
  if (vocab.size() != matrix.rows) throw DimensionError("vocabulary size does not match embedding rows");
  binary::Writer w(out);
  w.magic("W2V1");
  w.u32(static_cast<std::uint32_t>(vocab.size()));
  w.u32(static_cast<std::uint32_t>(matrix.dim));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const std::string& t = vocab.tokens[i];
    if (t.size() > UINT16_MAX) throw FormatError("token longer than 65535 bytes");
    w.u16(static_cast<std::uint16_t>(t.size()));
    w.bytes(t.data(), t.size());
    for (float x : matrix.vector(i)) w.f32(x);
  }
}

void save_word2vec(const std::filesystem::path& path, const Vocabulary& vocab, const EmbeddingMatrix& matrix) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_word2vec(out, vocab, matrix);
}

Word2Vec load_word2vec(std::istream& in) {
  binary::Reader r(in);
  if (r.fixed(4, "magic") != "W2V1") throw FormatError("not a W2V1 file (bad magic)");
  const std::uint32_t count = r.u32("vocabulary size");
  const std::uint32_t dim = r.u32("dimension");
  Word2Vec out;
  out.vocab.min_count = 0;
  out.matrix.rows = count;
  out.matrix.dim = dim;
  out.matrix.input.resize(static_cast<std::size_t>(count) * dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = r.u16("token length");
    std::string token = r.fixed(len, "token");
    auto row = out.matrix.input_row(i);
    for (std::uint32_t d = 0; d < dim; ++d) row[d] = r.f32("vector");
    if (!out.vocab.token_to_index.emplace(token, static_cast<std::int32_t>(i)).second) {
      throw FormatError("duplicate token in W2V1 file: " + token);
    }
    out.vocab.tokens.push_back(std::move(token));
    out.vocab.counts.push_back(0);
  }
  return out;
}

Word2Vec load_word2vec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return load_word2vec(in);
}

void save_word2vec_text(const std::filesystem::path& path, const Vocabulary& vocab, const EmbeddingMatrix& matrix) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.tokens[i];
    for (float x : matrix.vector(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Word2Vec load_word2vec_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  Word2Vec out;
  out.vocab.min_count = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = tokenize(line);
    if (fields.size() < 2) throw FormatError("line " + std::to_string(lineno) + ": expected token and values");
    const std::size_t dim = fields.size() - 1;
    if (out.matrix.rows == 0) out.matrix.dim = dim;
    if (dim != out.matrix.dim) {
      throw DimensionError("line " + std::to_string(lineno) + ": expected " + std::to_string(out.matrix.dim) +
                           " values, got " + std::to_string(dim));
    }
    for (std::size_t d = 1; d < fields.size(); ++d) {
      float v = 0;
      const auto& f = fields[d];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw FormatError("line " + std::to_string(lineno) + ": bad number '" + f + "'");
      }
      out.matrix.input.push_back(v);
    }
    out.vocab.token_to_index.emplace(fields[0], static_cast<std::int32_t>(out.vocab.tokens.size()));
    out.vocab.tokens.push_back(fields[0]);
    out.vocab.counts.push_back(0);
    ++out.matrix.rows;
  }
  return out;
}

}  // namespace reviewjudge
