// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "clique_corpus.hpp"
#include "reviewjudge/error.hpp"
#include "reviewjudge/word2vec.hpp"
#include "test_support.hpp"

using namespace reviewjudge;

namespace {

std::vector<TokenizedReview> corpus_of(std::vector<std::vector<std::string>> docs) {
  std::vector<TokenizedReview> out;
  for (std::size_t i = 0; i < docs.size(); ++i) out.push_back({static_cast<std::int64_t>(i), std::move(docs[i])});
  return out;
}

W2VConfig small_config() {
  W2VConfig c;
  c.dim = 16;
  c.workers = 1;
  c.epochs = 3;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Word2Vec, VocabExamples) {
  const auto corpus = corpus_of({{"a", "b", "a"}});
  const Vocabulary v1 = build_vocab(corpus, 1);
  ASSERT_EQ(v1.size(), 2u);
  EXPECT_EQ(v1.tokens[0], "a");
  EXPECT_EQ(v1.tokens[1], "b");
  EXPECT_EQ(v1.counts[0], 2);
  EXPECT_EQ(v1.counts[1], 1);
  EXPECT_EQ(*v1.index_of("b"), 1);
  EXPECT_FALSE(v1.index_of("zzz").has_value());

  const Vocabulary v2 = build_vocab(corpus, 2);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2.tokens[0], "a");

  EXPECT_TRUE(build_vocab({}, 1).empty());
}

TEST(Word2Vec, VocabTiesAreLexicographic) {
  const Vocabulary v = build_vocab(corpus_of({{"c", "b", "a", "c"}}), 1);
  EXPECT_EQ(v.tokens, (std::vector<std::string>{"c", "a", "b"}));
}

TEST(Word2Vec, PairsWindowOne) {
  Rng rng(1);
  const std::vector<std::int32_t> abc{0, 1, 2};
  const auto pairs = training_pairs(abc, 1, rng);
  const std::set<std::pair<int, int>> got = [&] {
    std::set<std::pair<int, int>> s;
    for (auto p : pairs) s.insert({p.center, p.context});
    return s;
  }();
  EXPECT_EQ(pairs.size(), 4u);
  EXPECT_EQ(got, (std::set<std::pair<int, int>>{{0, 1}, {1, 0}, {1, 2}, {2, 1}}));
  const std::vector<std::int32_t> single{0};
  EXPECT_TRUE(training_pairs(single, 5, rng).empty());
}

TEST(Word2Vec, PairsFixedWindowEnumeration) {
  Rng rng(1);
  const std::vector<std::int32_t> abcd{0, 1, 2, 3};
  const auto pairs = training_pairs(abcd, 2, rng, true);
  // Independent count: every (t, j) with 0 < |t - j| <= 2 inside [0, 4).
  std::size_t expected = 0;
  for (int t = 0; t < 4; ++t) {
    for (int j = 0; j < 4; ++j) expected += (j != t && std::abs(j - t) <= 2) ? 1 : 0;
  }
  EXPECT_EQ(expected, 10u);
  EXPECT_EQ(pairs.size(), expected);
}

TEST(Word2Vec, DynamicWindowStaysInBounds) {
  Rng rng(8);
  std::vector<std::int32_t> seq(30);
  for (int i = 0; i < 30; ++i) seq[static_cast<std::size_t>(i)] = i;
  for (int trial = 0; trial < 50; ++trial) {
    for (auto p : training_pairs(seq, 5, rng)) {
      EXPECT_NE(p.center, p.context);
      EXPECT_LE(std::abs(p.center - p.context), 5);
    }
  }
}

TEST(Word2Vec, NegativeSamplerTwoTokens) {
  const Vocabulary v = build_vocab(corpus_of({{"a", "b"}}), 1);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    for (auto idx : negative_sample(v, rng, 3, 0)) EXPECT_EQ(idx, 1);
  }
}

TEST(Word2Vec, NegativeSamplerNeedsTwoTokens) {
  const Vocabulary v = build_vocab(corpus_of({{"a"}}), 1);
  EXPECT_THROW(NegativeSampler{v}, ArgumentError);
}

TEST(Word2Vec, NegativeSamplerFrequencies) {
  std::vector<std::string> toks;
  for (int i = 0; i < 10; ++i) toks.push_back("t" + std::to_string(i));
  const Vocabulary v = build_vocab(corpus_of({toks}), 1);
  const NegativeSampler sampler(v);
  Rng rng(21);
  const int draws = 100000;
  std::vector<int> hist(v.size(), 0);
  for (int i = 0; i < draws; ++i) {
    for (auto idx : sampler.sample(rng, 1, -1)) ++hist[static_cast<std::size_t>(idx)];
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double expected = 1.0 / static_cast<double>(v.size());
    EXPECT_NEAR(static_cast<double>(hist[i]) / draws, expected, 0.02 * expected)
        << "token " << i;
    EXPECT_NEAR(sampler.probability(i), expected, 1e-12);
  }
}

TEST(Word2Vec, NegativeSamplerUnigramPower) {
  const Vocabulary v = build_vocab(corpus_of({{"a", "a", "a", "a", "a", "a", "a", "a", "b"}}), 1);
  const NegativeSampler sampler(v);
  const double wa = std::pow(8.0, 0.75), wb = 1.0;
  EXPECT_NEAR(sampler.probability(0), wa / (wa + wb), 1e-12);
  Rng rng(2);
  const std::vector<std::int32_t> draws = sampler.sample(rng, 1000, 1);
  for (auto d : draws) EXPECT_NE(d, 1);
}

TEST(Word2Vec, PairLossGradientCheck) {
  Rng rng(77);
  const std::size_t dim = 6, k = 3;
  std::vector<double> center(dim), context(dim), negs(k * dim);
  for (auto* v : {&center, &context, &negs}) {
    for (double& x : *v) x = rng.uniform(-0.8, 0.8);
  }
  std::vector<double> gc(dim), gx(dim), gn(k * dim);
  sgns_pair_loss<double>(center, context, negs, gc, gx, gn);

  auto loss = [&]() {
    std::vector<double> a(dim), b(dim), c(k * dim);
    return sgns_pair_loss<double>(center, context, negs, a, b, c);
  };
  const double eps = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    const auto which = rng.below(3);
    std::vector<double>& vec = which == 0 ? center : which == 1 ? context : negs;
    const std::vector<double>& grad = which == 0 ? gc : which == 1 ? gx : gn;
    const std::size_t i = rng.below(vec.size());
    const double saved = vec[i];
    vec[i] = saved + eps;
    const double up = loss();
    vec[i] = saved - eps;
    const double down = loss();
    vec[i] = saved;
    const double numeric = (up - down) / (2 * eps);
    const double rel = std::abs(numeric - grad[i]) / std::max(1e-8, std::abs(numeric) + std::abs(grad[i]));
    EXPECT_LT(rel, 1e-5) << "coordinate " << which << ":" << i;
  }
}

TEST(Word2Vec, PairLossKnownValue) {
  const std::vector<double> c{1.0, 0.0}, o{2.0, 0.0}, n{0.0, 0.0};
  std::vector<double> a(2), b(2), g(2);
  const double loss = sgns_pair_loss<double>(c, o, n, a, b, g);
  EXPECT_NEAR(loss, std::log(1 + std::exp(-2.0)) + std::log(2.0), 1e-12);
}

TEST(Word2Vec, InitializationRanges) {
  const EmbeddingMatrix m = initialize_embeddings(7, 50, 9);
  for (float x : m.input) {
    EXPECT_LE(std::abs(x), 0.5f / 50.0f);
  }
  for (float x : m.output) EXPECT_EQ(x, 0.0f);
}

TEST(Word2Vec, ZeroEpochsKeepsInitialization) {
  const auto corpus = rjtest::clique_corpus(10, 20, 5, 1);
  W2VConfig c = small_config();
  c.epochs = 0;
  const Word2Vec w = train_skipgram(corpus, c);
  const EmbeddingMatrix init = initialize_embeddings(w.vocab.size(), c.dim, c.seed);
  EXPECT_EQ(w.matrix.input, init.input);
  EXPECT_EQ(w.matrix.output, init.output);
}

TEST(Word2Vec, EmptyVocabularyIsConfigError) {
  const auto corpus = corpus_of({{}, {}});
  EXPECT_THROW(train_skipgram(corpus, small_config()), ConfigError);
}

TEST(Word2Vec, SingleWorkerDeterministic) {
  const auto corpus = rjtest::clique_corpus(12, 100, 6, 2);
  const Word2Vec a = train_skipgram(corpus, small_config());
  const Word2Vec b = train_skipgram(corpus, small_config());
  EXPECT_EQ(a.matrix.input, b.matrix.input);
  EXPECT_EQ(a.matrix.output, b.matrix.output);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  EXPECT_TRUE(a.matrix.all_finite());
}

TEST(Word2Vec, MultiWorkerFinite) {
  const auto corpus = rjtest::clique_corpus(12, 200, 6, 2);
  W2VConfig c = small_config();
  c.workers = 4;
  const Word2Vec w = train_skipgram(corpus, c);
  EXPECT_TRUE(w.matrix.all_finite());
  EXPECT_EQ(w.epoch_loss.size(), 3u);
}

TEST(Word2Vec, CliqueStructureAndLossDecrease) {
  const auto corpus = rjtest::clique_corpus(20, 600, 8, 5);
  W2VConfig c = small_config();
  c.dim = 24;
  c.epochs = 20;
  const Word2Vec w = train_skipgram(corpus, c);
  const auto cos = rjtest::clique_cosines(w);
  EXPECT_GT(cos.intra, cos.cross);
  ASSERT_EQ(w.epoch_loss.size(), 20u);
  EXPECT_GT(w.epoch_loss.front(), w.epoch_loss.back());
  // 5-epoch window means never rise by more than 1% (online-loss noise floor).
  const auto window_mean = [&](std::size_t start) {
    double sum = 0.0;
    for (std::size_t e = start; e < start + 5; ++e) sum += w.epoch_loss[e];
    return sum / 5.0;
  };
  for (std::size_t start = 5; start + 5 <= w.epoch_loss.size(); start += 5) {
    EXPECT_LE(window_mean(start), 1.01 * window_mean(start - 5)) << "window at epoch " << start;
  }

  const auto nn = nearest_neighbors("w0", 5, w.matrix, w.vocab);
  ASSERT_EQ(nn.size(), 5u);
  int same = 0;
  for (const auto& [tok, score] : nn) same += rjtest::clique_of(tok) == 0 ? 1 : 0;
  EXPECT_GE(same, 4);
  for (std::size_t i = 1; i < nn.size(); ++i) EXPECT_GE(nn[i - 1].second, nn[i].second);
}

TEST(Word2Vec, NearestNeighborEdges) {
  const auto corpus = rjtest::clique_corpus(8, 20, 4, 1);
  const Word2Vec w = train_skipgram(corpus, small_config());
  EXPECT_TRUE(nearest_neighbors("w0", 0, w.matrix, w.vocab).empty());
  const auto all = nearest_neighbors("w0", 100, w.matrix, w.vocab);
  EXPECT_EQ(all.size(), w.vocab.size() - 1);
  for (const auto& [tok, s] : all) EXPECT_NE(tok, "w0");
  EXPECT_THROW(nearest_neighbors("missing", 3, w.matrix, w.vocab), LookupError);
}

TEST(Word2Vec, EmbedTokens) {
  const auto corpus = rjtest::clique_corpus(8, 20, 4, 1);
  const Word2Vec w = train_skipgram(corpus, small_config());
  TokenizedReview r{0, {"w0", "nope", "w1", "w0"}};
  const Eigen::MatrixXd seq = embed_tokens(r, w.matrix, w.vocab);
  ASSERT_EQ(seq.rows(), 16);
  ASSERT_EQ(seq.cols(), 3);
  EXPECT_EQ(seq.col(0), seq.col(2));
  EXPECT_EQ(embed_tokens(TokenizedReview{1, {"x", "y"}}, w.matrix, w.vocab).cols(), 0);
}

TEST(Word2Vec, BinaryRoundTripIsByteIdentical) {
  const auto corpus = rjtest::clique_corpus(10, 40, 5, 3);
  const Word2Vec w = train_skipgram(corpus, small_config());
  std::ostringstream first;
  save_word2vec(first, w.vocab, w.matrix);
  std::istringstream in(first.str());
  const Word2Vec loaded = load_word2vec(in);
  EXPECT_EQ(loaded.vocab.tokens, w.vocab.tokens);
  EXPECT_EQ(loaded.matrix.input, w.matrix.input);
  std::ostringstream second;
  save_word2vec(second, loaded.vocab, loaded.matrix);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(first.str().substr(0, 4), "W2V1");
  // Header: magic, V, dim; then per record u16 length, bytes, dim floats.
  std::size_t expected = 12;
  for (const auto& t : w.vocab.tokens) expected += 2 + t.size() + 4 * 16;
  EXPECT_EQ(first.str().size(), expected);
}

TEST(Word2Vec, BinaryLoadRejectsGarbage) {
  std::istringstream bad_magic(std::string("W2V0\0\0\0\0\0\0\0\0", 12));
  EXPECT_THROW(load_word2vec(bad_magic), FormatError);
  const auto corpus = rjtest::clique_corpus(10, 40, 5, 3);
  const Word2Vec w = train_skipgram(corpus, small_config());
  std::ostringstream out;
  save_word2vec(out, w.vocab, w.matrix);
  std::istringstream truncated(out.str().substr(0, out.str().size() - 3));
  EXPECT_THROW(load_word2vec(truncated), CorruptionError);
}

TEST(Word2Vec, TextRoundTrip) {
  const auto corpus = rjtest::clique_corpus(10, 40, 5, 3);
  const Word2Vec w = train_skipgram(corpus, small_config());
  rjtest::TempDir dir;
  save_word2vec_text(dir / "a.txt", w.vocab, w.matrix);
  const Word2Vec loaded = load_word2vec_text(dir / "a.txt");
  EXPECT_EQ(loaded.vocab.tokens, w.vocab.tokens);
  EXPECT_EQ(loaded.matrix.input, w.matrix.input);
  save_word2vec_text(dir / "b.txt", loaded.vocab, loaded.matrix);
  EXPECT_EQ(rjtest::read_bytes(dir / "a.txt"), rjtest::read_bytes(dir / "b.txt"));
}

TEST(Word2Vec, ConfigValidation) {
  W2VConfig c;
  EXPECT_NO_THROW(c.validate());
  c.dim = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = W2VConfig{};
  c.window = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = W2VConfig{};
  c.negatives = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = W2VConfig{};
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(W2VConfig{}.dim, 384u);
  EXPECT_EQ(W2VConfig{}.window, 5);
  EXPECT_EQ(W2VConfig{}.workers, 5u);
  EXPECT_EQ(W2VConfig{}.min_count, 1);
}
