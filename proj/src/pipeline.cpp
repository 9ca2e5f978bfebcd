// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "reviewjudge/checkpoint.hpp"
#include "reviewjudge/fuzzy.hpp"
#include "reviewjudge/siamese.hpp"

namespace reviewjudge {

namespace {

using Json = nlohmann::ordered_json;

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

template <typename F>
int guarded(const char* command, std::ostream& err, F&& f) {
  try {
    f();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "reviewjudge " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "reviewjudge " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "reviewjudge " << command << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_output_dir(const PipelineConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
}

std::vector<Review> load_corpus(const PipelineConfig& config, std::ostream& err) {
  return stage("load", [&] {
    LoadOptions opts;
    opts.skip_bad_records = config.skip_bad_records;
    LoadResult loaded = load_reviews(config.dataset_path, opts);
    for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
    return std::move(loaded.reviews);
  });
}

FuzzyConfig fuzzy_config_for(const PipelineConfig& config) {
  if (!config.fuzzy_config_path) return FuzzyConfig{};
  return load_fuzzy_config(*config.fuzzy_config_path);
}

std::filesystem::path w2v_path_for(const PipelineConfig& config) {
  return config.w2v_path ? *config.w2v_path : config.output_dir / files::kWord2Vec;
}

std::filesystem::path checkpoint_for(const PipelineConfig& config,
                                     const std::optional<std::filesystem::path>& checkpoint) {
  std::filesystem::path p = checkpoint ? *checkpoint : config.output_dir / files::kModel;
  if (!std::filesystem::exists(p)) throw ConfigError("checkpoint not found: " + p.string());
  return p;
}

std::unique_ptr<ContextProvider> make_context(const PipelineConfig& config, const Word2Vec& w2v,
                                              std::span<const TokenizedReview> tokenized, std::ostream& err) {
  return stage("context", [&]() -> std::unique_ptr<ContextProvider> {
    if (!config.context_store) return std::make_unique<FallbackProvider>(w2v.matrix, w2v.vocab);
    EmbeddingStore store = load_store(*config.context_store, static_cast<std::uint32_t>(w2v.matrix.dim));
    if (store.source_digest != file_digest(config.dataset_path)) {
      err << "warning: context store was built from a different dataset file\n";
    }
    return std::make_unique<StoreProvider>(std::move(store), tokenized);
  });
}

/// Loads, preprocesses and embeds the corpus. A null w2v_file trains fresh
/// embeddings.
PreparedData prepare(const PipelineConfig& config, const std::filesystem::path* w2v_file, std::ostream& err) {
  PreparedData data;
  data.reviews = load_corpus(config, err);
  err << "loaded " << data.reviews.size() << " reviews\n";
  data.tokenized = stage("preprocess", [&] {
    return preprocess_corpus(data.reviews, stopwords_for(config), config.w2v.workers);
  });
  data.w2v = stage("word2vec", [&] {
    if (w2v_file != nullptr) return load_word2vec(*w2v_file);
    err << "training word2vec (dim " << config.w2v.dim << ", " << config.w2v.epochs << " epochs)\n";
    return train_skipgram(data.tokenized, config.w2v);
  });
  data.context = make_context(config, data.w2v, data.tokenized, err);
  data.features = stage("features", [&] {
    return build_features(data.reviews, data.tokenized, data.w2v, *data.context);
  });
  stage("split", [&] {
    split_indices(data.reviews, config.validation_fraction, config.seed, data.train_idx, data.val_idx);
  });
  return data;
}

SiameseConfig model_config_for(const PipelineConfig& config, const Word2Vec& w2v) {
  SiameseConfig mc = config.model;
  mc.input_dim = static_cast<Eigen::Index>(w2v.matrix.dim);
  return mc;
}

void check_checkpoint(const SiameseConfig& got, const SiameseConfig& want) {
  auto mismatch = [](const std::string& field, const std::string& a, const std::string& b) {
    throw ConfigError("checkpoint does not match model config: " + field + " is " + a + " in the checkpoint but " +
                      b + " in the config");
  };
  auto list = [](const std::vector<Eigen::Index>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  if (got.input_dim != want.input_dim) {
    mismatch("input_dim", std::to_string(got.input_dim), std::to_string(want.input_dim));
  }
  if (got.hidden_dim != want.hidden_dim) {
    mismatch("model.hidden", std::to_string(got.hidden_dim), std::to_string(want.hidden_dim));
  }
  if (got.head_hidden != want.head_hidden) mismatch("model.head", list(got.head_hidden), list(want.head_hidden));
  if (got.shared_weights != want.shared_weights) {
    mismatch("model.shared_weights", got.shared_weights ? "true" : "false", want.shared_weights ? "true" : "false");
  }
  if (got.max_seq_len != want.max_seq_len) {
    mismatch("model.max_seq_len", std::to_string(got.max_seq_len), std::to_string(want.max_seq_len));
  }
}

std::vector<int> labels_of(const FeatureSet& features, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(features.examples[i].label);
  return out;
}

struct FuzzySummary {
  Metrics metrics;
  std::size_t correct = 0;
  std::size_t confident = 0;
  BatchDecision batch;
};

FuzzySummary fuzzy_summary(std::span<const double> scores, std::span<const int> labels, const FuzzyConfig& fc,
                           double cutoff) {
  std::vector<double> inputs(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) inputs[i] = realness(scores[i]);
  FuzzySummary s;
  s.batch = classify_batch(inputs, fc.sets, fc.threshold);
  std::vector<int> predicted;
  predicted.reserve(scores.size());
  for (std::size_t i = 0; i < s.batch.decisions.size(); ++i) {
    const auto& d = s.batch.decisions[i];
    predicted.push_back(class_index(d.label));
    if (class_index(d.label) == labels[i]) ++s.correct;
    if (d.confidence >= cutoff) ++s.confident;
  }
  s.metrics = compute_metrics_from_predictions(predicted, labels);
  // Loss is not defined for crisp decisions; carry the sigmoid BCE for reference.
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) loss += bce_loss(scores[i], labels[i]);
  s.metrics.loss = scores.empty() ? 0.0 : loss / static_cast<double>(scores.size());
  return s;
}

Json metrics_block(const Metrics& m) { return Json::parse(metrics_json(m)); }

Json fuzzy_block(const FuzzySummary& s, double cutoff) {
  Json j = metrics_block(s.metrics);
  j["correct_count"] = s.correct;
  j["confident_count"] = s.confident;
  j["confidence_cutoff"] = cutoff;
  j["histogram"] = s.batch.histogram;
  return j;
}

}  // namespace

StopwordList stopwords_for(const PipelineConfig& config) {
  return config.stopwords_path ? StopwordList::from_file(*config.stopwords_path) : StopwordList::builtin();
}

FeatureSet build_features(std::span<const Review> reviews, std::span<const TokenizedReview> tokenized,
                          const Word2Vec& w2v, const ContextProvider& context) {
  if (reviews.size() != tokenized.size()) throw ArgumentError("reviews and tokenized corpus differ in length");
  if (context.dim() != w2v.matrix.dim) {
    throw DimensionError("context dim " + std::to_string(context.dim()) + " does not match word2vec dim " +
                         std::to_string(w2v.matrix.dim));
  }
  FeatureSet fs;
  const auto dim = static_cast<Eigen::Index>(w2v.matrix.dim);
  const auto rows = static_cast<Eigen::Index>(w2v.matrix.rows);
  fs.token_table.resize(dim, rows);
  for (Eigen::Index v = 0; v < rows; ++v) {
    const auto row = w2v.matrix.vector(static_cast<std::size_t>(v));
    for (Eigen::Index d = 0; d < dim; ++d) fs.token_table(d, v) = row[static_cast<std::size_t>(d)];
  }
  fs.examples.reserve(reviews.size());
  for (std::size_t i = 0; i < reviews.size(); ++i) {
    Example e;
    e.review_id = reviews[i].id;
    e.context = context.get(tokenized[i]);
    e.token_ids = to_indices(tokenized[i].tokens, w2v.vocab);
    e.label = class_index(reviews[i].label);
    fs.examples.push_back(std::move(e));
  }
  return fs;
}

void split_indices(std::span<const Review> reviews, double fraction, std::uint64_t seed,
                   std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx) {
  std::unordered_map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < reviews.size(); ++i) position.emplace(reviews[i].id, i);
  const Split split = split_train_validation(reviews, fraction, seed);
  train_idx.clear();
  val_idx.clear();
  for (const auto& r : split.train) train_idx.push_back(position.at(r.id));
  for (const auto& r : split.validation) val_idx.push_back(position.at(r.id));
}

std::string stats_json(const CorpusStats& stats) {
  Json cats = Json::object();
  for (const auto& [name, c] : stats.categories) {
    cats[name] = {{"fake_count", c.fake_count},
                  {"fake_avg_len", c.fake_avg_len},
                  {"real_count", c.real_count},
                  {"real_avg_len", c.real_avg_len}};
  }
  Json j = {{"unit", stats.unit == LengthUnit::Chars ? "chars" : "tokens"},
            {"total", stats.total()},
            {"fake_total", stats.fake_total},
            {"real_total", stats.real_total},
            {"categories", cats}};
  return j.dump(2);
}

int cmd_stats(const PipelineConfig& config, const StatsOptions& options, std::ostream& out, std::ostream& err) {
  return guarded("stats", err, [&] {
    config.validate();
    const auto reviews = load_corpus(config, err);
    const CorpusStats stats = stage("stats", [&] { return corpus_stats(reviews, config.length_unit); });
    const std::string json = stats_json(stats);
    stage("write", [&] {
      ensure_output_dir(config);
      write_file(config.output_dir / files::kStats, json + "\n");
    });
    if (options.json_only) {
      out << json << '\n';
    } else {
      out << format_stats_table(stats);
    }
  });
}

int cmd_preprocess(const PipelineConfig& config, const PreprocessOptions& options, std::ostream& out,
                   std::ostream& err) {
  return guarded("preprocess", err, [&] {
    config.validate();
    const auto reviews = load_corpus(config, err);
    const FrequencyTable table = stage("preprocess", [&] {
      return frequency_table(reviews, options.stage, stopwords_for(config));
    });
    const std::string json = frequency_json(table, options.top_n);
    stage("write", [&] {
      ensure_output_dir(config);
      const char* name = options.stage == FrequencyStage::Raw ? "frequency_raw.json" : "frequency_cleaned.json";
      write_file(config.output_dir / name, json + "\n");
    });
    out << json << '\n';
  });
}

int cmd_train_w2v(const PipelineConfig& config, const TrainW2VOptions& options, std::ostream& out,
                  std::ostream& err) {
  return guarded("train-w2v", err, [&] {
    config.validate();
    const auto reviews = load_corpus(config, err);
    const auto tokenized = stage("preprocess", [&] {
      return preprocess_corpus(reviews, stopwords_for(config), config.w2v.workers);
    });
    const Word2Vec w2v = stage("word2vec", [&] { return train_skipgram(tokenized, config.w2v); });
    stage("write", [&] {
      ensure_output_dir(config);
      save_word2vec(config.output_dir / files::kWord2Vec, w2v.vocab, w2v.matrix);
      if (options.write_text) save_word2vec_text(config.output_dir / files::kWord2VecText, w2v.vocab, w2v.matrix);
    });
    Json j = {{"vocab_size", w2v.vocab.size()}, {"dim", w2v.matrix.dim}, {"epoch_loss", w2v.epoch_loss}};
    if (!options.neighbors_of.empty()) {
      Json nn = Json::object();
      for (const auto& token : options.neighbors_of) {
        Json list = Json::array();
        for (const auto& [word, cos] : nearest_neighbors(token, options.k, w2v.matrix, w2v.vocab)) {
          list.push_back({{"token", word}, {"cosine", cos}});
        }
        nn[token] = list;
      }
      j["neighbors"] = nn;
    }
    out << j.dump(2) << '\n';
  });
}

int cmd_train(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    config.validate();
    ensure_output_dir(config);
    PreparedData data = prepare(config, config.w2v_path ? &*config.w2v_path : nullptr, err);
    stage("write", [&] { save_word2vec(config.output_dir / files::kWord2Vec, data.w2v.vocab, data.w2v.matrix); });

    const SiameseConfig mc = model_config_for(config, data.w2v);
    TrainConfig tc = config.train;
    tc.seed = config.seed;
    tc.workers = config.workers;
    err << "training siamese model on " << data.train_idx.size() << " reviews, validating on "
        << data.val_idx.size() << '\n';
    const TrainResult result = stage("train", [&] {
      const SiameseModel initial = make_model(mc, config.seed);
      return train(initial, data.features, data.train_idx, data.val_idx, tc, [&](const EpochRecord& e) {
        err << "epoch " << e.epoch << '/' << tc.max_epochs << " train_loss=" << e.train_loss
            << " train_acc=" << e.train_acc << " val_loss=" << e.val_loss << " val_acc=" << e.val_acc << '\n';
      });
    });
    const std::string report = report_json(result.report);
    stage("write", [&] {
      save_model(result.model, config.output_dir / files::kModel);
      write_file(config.output_dir / files::kReport, report + "\n");
    });
    err << "stopped at epoch " << result.report.stopped_epoch << ", best epoch " << result.report.best_epoch
        << '\n';
    out << report << '\n';
  });
}

int cmd_evaluate(const PipelineConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 std::ostream& out, std::ostream& err) {
  return guarded("evaluate", err, [&] {
    config.validate();
    const auto ckpt = checkpoint_for(config, checkpoint);
    const auto w2v_file = w2v_path_for(config);
    if (!std::filesystem::exists(w2v_file)) throw ConfigError("word2vec file not found: " + w2v_file.string());
    const SiameseModel model = stage("checkpoint", [&] { return load_model(ckpt); });
    const FuzzyConfig fc = stage("fuzzy", [&] { return fuzzy_config_for(config); });
    PreparedData data = prepare(config, &w2v_file, err);
    check_checkpoint(model.config, model_config_for(config, data.w2v));

    const unsigned workers = config.workers;
    Json j = Json::object();
    stage("evaluate", [&] {
      std::vector<std::size_t> all(data.features.examples.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const auto val_scores = predict_scores(model, data.features, data.val_idx, workers);
      const auto train_scores = predict_scores(model, data.features, data.train_idx, workers);
      const auto all_scores = predict_scores(model, data.features, all, workers);
      const auto val_labels = labels_of(data.features, data.val_idx);
      const auto train_labels = labels_of(data.features, data.train_idx);
      const auto all_labels = labels_of(data.features, all);

      const auto val_fuzzy = fuzzy_summary(val_scores, val_labels, fc, config.confidence_cutoff);
      const auto train_fuzzy = fuzzy_summary(train_scores, train_labels, fc, config.confidence_cutoff);
      const auto all_fuzzy = fuzzy_summary(all_scores, all_labels, fc, config.confidence_cutoff);
      const Metrics all_sigmoid = compute_metrics(all_scores, all_labels);

      j["split"] = {{"validation_fraction", config.validation_fraction},
                    {"seed", config.seed},
                    {"train_count", data.train_idx.size()},
                    {"validation_count", data.val_idx.size()}};
      j["sigmoid"] = metrics_block(compute_metrics(val_scores, val_labels));
      j["fuzzy"] = fuzzy_block(val_fuzzy, config.confidence_cutoff);
      j["train"] = {{"sigmoid", metrics_block(compute_metrics(train_scores, train_labels))},
                    {"fuzzy", fuzzy_block(train_fuzzy, config.confidence_cutoff)}};
      j["corpus"] = {{"count", all.size()},
                     {"sigmoid_accuracy", all_sigmoid.accuracy},
                     {"fuzzy_accuracy", all_fuzzy.metrics.accuracy},
                     {"correct_count", all_fuzzy.correct},
                     {"confident_count", all_fuzzy.confident},
                     {"confidence_cutoff", config.confidence_cutoff}};
      j["context"] = data.context->kind() == ContextProvider::Kind::Store ? "store" : "fallback";
    });
    const std::string json = j.dump(2);
    stage("write", [&] { write_file(config.output_dir / files::kMetrics, json + "\n"); });
    out << json << '\n';
  });
}

int cmd_classify(const PipelineConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 const std::string& text, std::ostream& out, std::ostream& err) {
  return guarded("classify", err, [&] {
    config.validate(false);
    const auto ckpt = checkpoint_for(config, checkpoint);
    const auto w2v_file = w2v_path_for(config);
    if (!std::filesystem::exists(w2v_file)) throw ConfigError("word2vec file not found: " + w2v_file.string());
    const SiameseModel model = stage("checkpoint", [&] { return load_model(ckpt); });
    const Word2Vec w2v = stage("word2vec", [&] { return load_word2vec(w2v_file); });
    const FuzzyConfig fc = stage("fuzzy", [&] { return fuzzy_config_for(config); });
    check_checkpoint(model.config, model_config_for(config, w2v));

    Review review;
    review.text = text;
    const TokenizedReview tokens = stage("preprocess", [&] { return preprocess_review(review, stopwords_for(config)); });
    const bool empty = tokens.tokens.empty();
    if (empty) err << "warning: no tokens left after cleaning; scoring the zero-vector input\n";

    Json j = Json::object();
    stage("classify", [&] {
      // A store only covers the corpus it was built from, so new text uses
      // the fallback embedding.
      const FallbackProvider context(w2v.matrix, w2v.vocab);
      const Eigen::MatrixXd ctx = context.get(tokens);
      const Eigen::MatrixXd seq = embed_tokens(tokens, w2v.matrix, w2v.vocab);
      const double score = predict(model, ctx, seq);
      const FuzzyDecision d = classify(realness(score), fc.sets, fc.threshold);
      j["tokens"] = tokens.tokens;
      j["empty_after_cleaning"] = empty;
      j["sigmoid_score"] = score;
      j["fuzzy"] = Json::parse(decision_json(d));
      j["label"] = label_name(d.label);
    });
    out << j.dump() << '\n';
  });
}

}  // namespace reviewjudge
