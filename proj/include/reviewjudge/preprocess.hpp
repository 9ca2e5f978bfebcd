// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reviewjudge/corpus.hpp"

namespace reviewjudge {

struct TokenizedReview {
  std::int64_t review_id = 0;
  std::vector<std::string> tokens;
};

class StopwordList {
 public:
  enum class Source { Builtin, File, Empty };

  StopwordList() = default;

  /// The shipped English list (data/stopwords_en.txt, 179 entries).
  static StopwordList builtin();
  /// One word per line, '#' comments, entries lowercased and deduplicated.
  static StopwordList from_file(const std::filesystem::path& path);
  static StopwordList parse(std::string_view text, Source source);

  bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
  std::size_t size() const { return words_.size(); }
  Source source() const { return source_; }
  const std::set<std::string, std::less<>>& words() const { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
  Source source_ = Source::Empty;
};

/// Lowercases, transliterates Latin-1 / Latin Extended-A letters to ASCII,
/// turns punctuation and whitespace into single spaces and drops every other
/// character. Output alphabet: [a-z0-9 ], no leading/trailing/double spaces.
std::string normalize_text(std::string_view text);

/// Splits on whitespace runs.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordList& list);

/// Rule-based suffix stripping with an irregular-form table. Idempotent.
std::string lemmatize(std::string_view token);

/// Irregular forms known to the lemmatizer, (inflected, lemma).
std::span<const std::pair<std::string_view, std::string_view>> lemma_exceptions();

/// normalize -> tokenize -> remove_stopwords -> lemmatize.
TokenizedReview preprocess_review(const Review& review, const StopwordList& list);

/// Preprocesses a whole corpus, optionally on several threads. Output order
/// matches input order.
std::vector<TokenizedReview> preprocess_corpus(std::span<const Review> reviews, const StopwordList& list,
                                               unsigned workers = 1);

/// (token, count), count descending then token ascending.
using FrequencyTable = std::vector<std::pair<std::string, std::int64_t>>;

enum class FrequencyStage { Raw, Cleaned };
FrequencyStage parse_frequency_stage(std::string_view s);

/// Counts tokens of already tokenized reviews.
FrequencyTable frequency_table(std::span<const TokenizedReview> corpus);
/// Counts token lists directly.
FrequencyTable frequency_table(std::span<const std::vector<std::string>> corpus);
/// Raw stage counts normalized tokens before stopword removal; cleaned stage
/// counts the full pipeline output.
FrequencyTable frequency_table(std::span<const Review> reviews, FrequencyStage stage,
                               const StopwordList& list);

/// JSON array of [token, count] pairs, at most top_n entries (0 = all).
std::string frequency_json(const FrequencyTable& table, std::size_t top_n = 0);

}  // namespace reviewjudge
