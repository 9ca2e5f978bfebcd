// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reviewjudge {

/// CG (computer generated, "fake") is the positive class 1; OG (original,
/// "real") is class 0.
enum class Label : std::uint8_t { OG = 0, CG = 1 };

inline int class_index(Label l) { return l == Label::CG ? 1 : 0; }
inline Label label_from_class(int c) { return c != 0 ? Label::CG : Label::OG; }
std::string_view label_name(Label l);
/// Case-insensitive "CG" / "OG". Throws ArgumentError otherwise.
Label parse_label(std::string_view s);

struct Review {
  std::int64_t id = 0;
  std::string category;
  double rating = 0.0;
  std::string text;
  Label label = Label::OG;
};

struct LoadOptions {
  /// Skip malformed rows (recorded as warnings) instead of throwing.
  bool skip_bad_records = false;
};

struct LoadResult {
  std::vector<Review> reviews;
  std::vector<std::string> warnings;
};

/// Reads the labelled review CSV. Columns are matched by name
/// (category, rating, label, text; "text_" is accepted for text). Review ids
/// are the 0-based data row index, so skipped rows leave gaps.
LoadResult load_reviews(const std::filesystem::path& path, const LoadOptions& options = {});
LoadResult load_reviews(std::istream& in, const LoadOptions& options = {});

enum class LengthUnit { Chars, Tokens };
LengthUnit parse_length_unit(std::string_view s);

struct CategoryStats {
  std::int64_t fake_count = 0;
  double fake_avg_len = 0.0;
  std::int64_t real_count = 0;
  double real_avg_len = 0.0;
};

struct CorpusStats {
  std::map<std::string, CategoryStats> categories;
  std::int64_t fake_total = 0;
  std::int64_t real_total = 0;
  LengthUnit unit = LengthUnit::Chars;

  std::int64_t total() const { return fake_total + real_total; }
};

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

/// Per-category counts and mean lengths by label.
CorpusStats corpus_stats(std::span<const Review> reviews, LengthUnit unit = LengthUnit::Chars);

/// Fixed-width text table: per-category fake and real counts with rounded average lengths.
std::string format_stats_table(const CorpusStats& stats);

struct Split {
  std::vector<Review> train;
  std::vector<Review> validation;
  double fraction = 0.3;
  std::uint64_t seed = 0;
};

/// Stratified shuffle-and-cut. The validation part holds round(fraction * N)
/// reviews (clamped so neither part is empty), apportioned across labels by
/// largest remainder.
Split split_train_validation(std::span<const Review> reviews, double fraction, std::uint64_t seed);

}  // namespace reviewjudge
