// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "reviewjudge/config.hpp"
#include "reviewjudge/context_embed.hpp"
#include "reviewjudge/corpus.hpp"
#include "reviewjudge/error.hpp"
#include "reviewjudge/preprocess.hpp"
#include "reviewjudge/training.hpp"
#include "reviewjudge/word2vec.hpp"

namespace reviewjudge {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// A runtime failure tagged with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Output file names inside PipelineConfig::output_dir.
namespace files {
inline constexpr const char* kStats = "stats.json";
inline constexpr const char* kWord2Vec = "w2v.bin";
inline constexpr const char* kWord2VecText = "w2v.txt";
inline constexpr const char* kModel = "model.siam";
inline constexpr const char* kReport = "train_report.json";
inline constexpr const char* kMetrics = "metrics.json";
}  // namespace files

/// Everything the model sees for a loaded corpus.
struct PreparedData {
  std::vector<Review> reviews;
  std::vector<TokenizedReview> tokenized;
  Word2Vec w2v;
  std::unique_ptr<ContextProvider> context;
  FeatureSet features;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
};

StopwordList stopwords_for(const PipelineConfig& config);

/// Token table and per-review examples in corpus order.
FeatureSet build_features(std::span<const Review> reviews, std::span<const TokenizedReview> tokenized,
                          const Word2Vec& w2v, const ContextProvider& context);

/// Maps the split's reviews back to example positions.
void split_indices(std::span<const Review> reviews, double fraction, std::uint64_t seed,
                   std::vector<std::size_t>& train_idx, std::vector<std::size_t>& val_idx);

/// Fuzzy input for a sigmoid score: high means "real".
inline double realness(double sigmoid_score) { return 1.0 - sigmoid_score; }

std::string stats_json(const CorpusStats& stats);

struct StatsOptions {
  bool json_only = false;
};

struct PreprocessOptions {
  FrequencyStage stage = FrequencyStage::Cleaned;
  std::size_t top_n = 50;
};

struct TrainW2VOptions {
  bool write_text = false;
  std::vector<std::string> neighbors_of;
  std::size_t k = 10;
};

int cmd_stats(const PipelineConfig& config, const StatsOptions& options, std::ostream& out, std::ostream& err);
int cmd_preprocess(const PipelineConfig& config, const PreprocessOptions& options, std::ostream& out,
                   std::ostream& err);
int cmd_train_w2v(const PipelineConfig& config, const TrainW2VOptions& options, std::ostream& out,
                  std::ostream& err);
int cmd_train(const PipelineConfig& config, std::ostream& out, std::ostream& err);
/// checkpoint defaults to output_dir/model.siam.
int cmd_evaluate(const PipelineConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 std::ostream& out, std::ostream& err);
int cmd_classify(const PipelineConfig& config, const std::optional<std::filesystem::path>& checkpoint,
                 const std::string& text, std::ostream& out, std::ostream& err);

}  // namespace reviewjudge
