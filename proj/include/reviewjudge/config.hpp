// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reviewjudge/corpus.hpp"
#include "reviewjudge/siamese.hpp"
#include "reviewjudge/training.hpp"
#include "reviewjudge/word2vec.hpp"

namespace reviewjudge {

/// Flat "section.key" -> value view of a sectioned key/value file:
///
///   # comment
///   [section]
///   key = value        ; quotes around value are optional
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::size_t line_of(const std::string& key) const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> lines_;
};

struct PipelineConfig {
  std::filesystem::path dataset_path;
  std::optional<std::filesystem::path> stopwords_path;
  LengthUnit length_unit = LengthUnit::Chars;
  bool skip_bad_records = false;

  W2VConfig w2v;
  /// Reuse these embeddings instead of training.
  std::optional<std::filesystem::path> w2v_path;

  /// Precomputed contextual store; the fallback provider is used when unset.
  std::optional<std::filesystem::path> context_store;

  SiameseConfig model;
  TrainConfig train;
  double validation_fraction = 0.3;

  std::optional<std::filesystem::path> fuzzy_config_path;
  /// Fuzzy decisions at or above this confidence count as confident.
  double confidence_cutoff = 0.5;

  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "reviewjudge-out";
  unsigned workers = 1;

  /// Applies one "section.key" = value setting. Throws ConfigError naming
  /// the key on an unknown key or a bad value. Relative paths resolve
  /// against base_dir.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir = {});
  void apply(const KeyValueFile& file, const std::filesystem::path& base_dir = {});

  /// Copies the run seed into every stochastic component.
  void propagate_seed();
  /// Checks value ranges and that referenced input files exist.
  void validate(bool need_dataset = true) const;

  /// Every recognised "section.key".
  static const std::vector<std::string>& keys();
};

/// Environment fallback for the run seed.
inline constexpr const char* kSeedEnvVar = "REVIEWJUDGE_SEED";
std::optional<std::uint64_t> seed_from_env();

struct ConfigSources {
  std::optional<std::filesystem::path> file;
  /// "section.key", value pairs applied after the file, in order.
  std::vector<std::pair<std::string, std::string>> overrides;
  std::optional<std::uint64_t> seed_flag;
};

/// Seed precedence: seed_flag, then run.seed from file or overrides, then
/// the environment, then 42.
PipelineConfig build_config(const ConfigSources& sources);

}  // namespace reviewjudge
