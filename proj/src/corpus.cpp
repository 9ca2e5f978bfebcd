// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "reviewjudge/csv.hpp"
#include "reviewjudge/error.hpp"
#include "reviewjudge/preprocess.hpp"
#include "reviewjudge/rng.hpp"

namespace reviewjudge {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Header column names accepted for each field, checked in order.
struct ColumnSpec {
  const char* field;
  std::array<const char*, 2> names;
};
constexpr std::array<ColumnSpec, 4> kColumns{{
    {"category", {"category", nullptr}},
    {"rating", {"rating", nullptr}},
    {"label", {"label", nullptr}},
    {"text", {"text", "text_"}},
}};

}  // namespace

std::string_view label_name(Label l) { return l == Label::CG ? "CG" : "OG"; }

Label parse_label(std::string_view s) {
  const std::string v = lower_ascii(trim(s));
  if (v == "cg") return Label::CG;
  if (v == "og" || v == "or") return Label::OG;
  throw ArgumentError("unknown label '" + std::string(s) + "' (expected CG, OG or OR)");
}

LengthUnit parse_length_unit(std::string_view s) {
  const std::string v = lower_ascii(trim(s));
  if (v == "chars" || v == "characters") return LengthUnit::Chars;
  if (v == "tokens") return LengthUnit::Tokens;
  throw ArgumentError("unknown length unit '" + std::string(s) + "' (expected chars or tokens)");
}

LoadResult load_reviews(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset not found: " + path.string());
  return load_reviews(in, options);
}

LoadResult load_reviews(std::istream& in, const LoadOptions& options) {
  CsvReader reader(in);
  auto header = reader.next();
  if (!header) throw SchemaError("missing header row");

  std::array<std::size_t, kColumns.size()> index{};
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    bool found = false;
    for (const char* name : kColumns[k].names) {
      if (name == nullptr) continue;
      for (std::size_t c = 0; c < header->size(); ++c) {
        std::string h = lower_ascii(trim((*header)[c]));
        // A UTF-8 byte order mark may precede the first column name.
        if (c == 0 && h.rfind("\xEF\xBB\xBF", 0) == 0) h.erase(0, 3);
        if (h == name) {
          index[k] = c;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw SchemaError(std::string("missing column '") + kColumns[k].field + "'");
  }
  const std::size_t needed = *std::max_element(index.begin(), index.end()) + 1;

  LoadResult result;
  std::int64_t row = -1;
  while (auto fields = reader.next()) {
    ++row;
    const std::size_t data_row = static_cast<std::size_t>(row) + 1;
    try {
      if (fields->size() < needed) {
        throw RecordError(data_row, "expected at least " + std::to_string(needed) + " fields, got " +
                                        std::to_string(fields->size()));
      }
      Review r;
      r.id = row;
      r.category = std::string(trim((*fields)[index[0]]));
      {
        const std::string_view rs = trim((*fields)[index[1]]);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(rs.data(), rs.data() + rs.size(), value);
        if (ec != std::errc() || ptr != rs.data() + rs.size()) {
          throw RecordError(data_row, "unparseable rating '" + std::string(rs) + "'");
        }
        if (value < 1.0 || value > 5.0) {
          throw RecordError(data_row, "rating " + std::string(rs) + " outside [1,5]");
        }
        r.rating = value;
      }
      try {
        r.label = parse_label((*fields)[index[2]]);
      } catch (const ArgumentError& e) {
        throw RecordError(data_row, e.what());
      }
      r.text = std::move((*fields)[index[3]]);
      if (trim(r.text).empty()) throw RecordError(data_row, "empty review text");
      result.reviews.push_back(std::move(r));
    } catch (const RecordError& e) {
      if (!options.skip_bad_records) throw;
      result.warnings.emplace_back(std::string("skipped ") + e.what());
    }
  }
  return result;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (const char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

CorpusStats corpus_stats(std::span<const Review> reviews, LengthUnit unit) {
  struct Acc {
    std::int64_t fake = 0, real = 0;
    double fake_len = 0.0, real_len = 0.0;
  };
  std::map<std::string, Acc> acc;
  for (const Review& r : reviews) {
    const double len = unit == LengthUnit::Chars
                           ? static_cast<double>(utf8_length(r.text))
                           : static_cast<double>(tokenize(normalize_text(r.text)).size());
    Acc& a = acc[r.category];
    if (r.label == Label::CG) {
      ++a.fake;
      a.fake_len += len;
    } else {
      ++a.real;
      a.real_len += len;
    }
  }
  CorpusStats stats;
  stats.unit = unit;
  for (const auto& [category, a] : acc) {
    CategoryStats& c = stats.categories[category];
    c.fake_count = a.fake;
    c.real_count = a.real;
    c.fake_avg_len = a.fake > 0 ? a.fake_len / static_cast<double>(a.fake) : 0.0;
    c.real_avg_len = a.real > 0 ? a.real_len / static_cast<double>(a.real) : 0.0;
    stats.fake_total += a.fake;
    stats.real_total += a.real;
  }
  return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
  std::size_t width = std::string_view("Total Reviews").size();
  for (const auto& [category, c] : stats.categories) width = std::max(width, category.size());

  const char* unit = stats.unit == LengthUnit::Chars ? "chars" : "tokens";
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s | %14s %14s | %14s %14s\n", static_cast<int>(width), "Category",
                "Fake", "", "Real", "");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-*s | %14s %14s | %14s %14s\n", static_cast<int>(width), "",
                "No. of corpora", "Average Length", "No. of corpora", "Average Length");
  out << buf;
  const std::string rule(width + 65, '-');
  out << rule << '\n';
  for (const auto& [category, c] : stats.categories) {
    std::snprintf(buf, sizeof buf, "%-*s | %14lld %14lld | %14lld %14lld\n", static_cast<int>(width),
                  category.c_str(), static_cast<long long>(c.fake_count),
                  static_cast<long long>(std::llround(c.fake_avg_len)),
                  static_cast<long long>(c.real_count),
                  static_cast<long long>(std::llround(c.real_avg_len)));
    out << buf;
  }
  out << rule << '\n';
  std::snprintf(buf, sizeof buf, "%-*s | %14lld %14s | %14lld %14s\n", static_cast<int>(width),
                "Total Reviews", static_cast<long long>(stats.fake_total), "",
                static_cast<long long>(stats.real_total), "");
  out << buf;
  out << "(average length unit: " << unit << ")\n";
  return out.str();
}

Split split_train_validation(std::span<const Review> reviews, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("validation fraction must be in (0,1), got " + std::to_string(fraction));
  }
  if (reviews.size() < 2) throw ArgumentError("need at least 2 reviews to split");

  const std::size_t n = reviews.size();
  auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  target = std::clamp<std::size_t>(target, 1, n - 1);

  // Index lists per class, CG first.
  std::array<std::vector<std::size_t>, 2> groups;
  for (std::size_t i = 0; i < n; ++i) {
    groups[reviews[i].label == Label::CG ? 0 : 1].push_back(i);
  }

  Rng rng(seed);
  for (auto& g : groups) rng.shuffle(std::span<std::size_t>(g));

  // Largest-remainder apportionment of the validation quota.
  std::array<std::size_t, 2> quota{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double exact = static_cast<double>(target) * static_cast<double>(groups[k].size()) /
                         static_cast<double>(n);
    quota[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(quota[k]);
    assigned += quota[k];
  }
  while (assigned < target) {
    const std::size_t k = remainder[0] >= remainder[1] ? 0 : 1;
    if (quota[k] < groups[k].size()) {
      ++quota[k];
      ++assigned;
    }
    remainder[k] = -1.0;
    if (remainder[0] < 0 && remainder[1] < 0) remainder = {0.0, 0.0};
  }

  std::vector<std::size_t> val_idx;
  std::vector<std::size_t> train_idx;
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < groups[k].size(); ++j) {
      (j < quota[k] ? val_idx : train_idx).push_back(groups[k][j]);
    }
  }
  // Interleave classes so downstream consumers do not see label blocks.
  rng.shuffle(std::span<std::size_t>(val_idx));
  rng.shuffle(std::span<std::size_t>(train_idx));

  Split split;
  split.fraction = fraction;
  split.seed = seed;
  split.train.reserve(train_idx.size());
  split.validation.reserve(val_idx.size());
  for (std::size_t i : train_idx) split.train.push_back(reviews[i]);
  for (std::size_t i : val_idx) split.validation.push_back(reviews[i]);
  return split;
}

}  // namespace reviewjudge
