// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>

#include "reviewjudge/error.hpp"

namespace reviewjudge {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    return std::string(v.substr(1, v.size() - 2));
  }
  // Strip a trailing comment from unquoted values.
  if (auto hash = v.find(" #"); hash != std::string_view::npos) v = trim(v.substr(0, hash));
  return std::string(v);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid value for " + key + ": '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid value for " + key + ": '" + value + "' (expected true or false)");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

using Setter = std::function<void(PipelineConfig&, const std::string& key, const std::string& value,
                                  const std::filesystem::path& base)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data.dataset", [](auto& c, auto&, auto& v, auto& b) { c.dataset_path = resolve(b, v); }},
      {"data.stopwords", [](auto& c, auto&, auto& v, auto& b) {
         if (v.empty() || v == "builtin") {
           c.stopwords_path.reset();
         } else {
           c.stopwords_path = resolve(b, v);
         }
       }},
      {"data.length_unit", [](auto& c, auto& k, auto& v, auto&) {
         try {
           c.length_unit = parse_length_unit(v);
         } catch (const ArgumentError&) {
           throw ConfigError("invalid value for " + k + ": '" + v + "' (expected chars or tokens)");
         }
       }},
      {"data.skip_bad_records", [](auto& c, auto& k, auto& v, auto&) { c.skip_bad_records = parse_bool(k, v); }},
      {"w2v.dim", [](auto& c, auto& k, auto& v, auto&) { c.w2v.dim = parse_number<std::size_t>(k, v); }},
      {"w2v.window", [](auto& c, auto& k, auto& v, auto&) { c.w2v.window = parse_number<int>(k, v); }},
      {"w2v.min_count", [](auto& c, auto& k, auto& v, auto&) { c.w2v.min_count = parse_number<std::int64_t>(k, v); }},
      {"w2v.workers", [](auto& c, auto& k, auto& v, auto&) { c.w2v.workers = parse_number<unsigned>(k, v); }},
      {"w2v.negatives", [](auto& c, auto& k, auto& v, auto&) { c.w2v.negatives = parse_number<int>(k, v); }},
      {"w2v.epochs", [](auto& c, auto& k, auto& v, auto&) { c.w2v.epochs = parse_number<int>(k, v); }},
      {"w2v.learning_rate", [](auto& c, auto& k, auto& v, auto&) { c.w2v.learning_rate = parse_number<double>(k, v); }},
      {"w2v.fixed_window", [](auto& c, auto& k, auto& v, auto&) { c.w2v.fixed_window = parse_bool(k, v); }},
      {"w2v.load", [](auto& c, auto&, auto& v, auto& b) {
         if (v.empty()) {
           c.w2v_path.reset();
         } else {
           c.w2v_path = resolve(b, v);
         }
       }},
      {"context.store", [](auto& c, auto&, auto& v, auto& b) {
         if (v.empty() || v == "fallback") {
           c.context_store.reset();
         } else {
           c.context_store = resolve(b, v);
         }
       }},
      {"model.hidden", [](auto& c, auto& k, auto& v, auto&) { c.model.hidden_dim = parse_number<Eigen::Index>(k, v); }},
      {"model.head", [](auto& c, auto& k, auto& v, auto&) {
         c.model.head_hidden.clear();
         std::string_view rest = v;
         while (!rest.empty()) {
           const auto comma = rest.find(',');
           const std::string item(trim(rest.substr(0, comma)));
           if (!item.empty()) c.model.head_hidden.push_back(parse_number<Eigen::Index>(k, item));
           if (comma == std::string_view::npos) break;
           rest.remove_prefix(comma + 1);
         }
       }},
      {"model.dropout", [](auto& c, auto& k, auto& v, auto&) { c.model.dropout = parse_number<double>(k, v); }},
      {"model.shared_weights", [](auto& c, auto& k, auto& v, auto&) { c.model.shared_weights = parse_bool(k, v); }},
      {"model.max_seq_len", [](auto& c, auto& k, auto& v, auto&) { c.model.max_seq_len = parse_number<Eigen::Index>(k, v); }},
      {"model.learning_rate", [](auto& c, auto& k, auto& v, auto&) { c.train.learning_rate = parse_number<double>(k, v); }},
      {"model.batch_size", [](auto& c, auto& k, auto& v, auto&) { c.train.batch_size = parse_number<std::size_t>(k, v); }},
      {"model.max_epochs", [](auto& c, auto& k, auto& v, auto&) { c.train.max_epochs = parse_number<int>(k, v); }},
      {"model.patience", [](auto& c, auto& k, auto& v, auto&) { c.train.patience = parse_number<int>(k, v); }},
      {"model.validation_fraction", [](auto& c, auto& k, auto& v, auto&) { c.validation_fraction = parse_number<double>(k, v); }},
      {"fuzzy.config", [](auto& c, auto&, auto& v, auto& b) {
         if (v.empty() || v == "default") {
           c.fuzzy_config_path.reset();
         } else {
           c.fuzzy_config_path = resolve(b, v);
         }
       }},
      {"fuzzy.confidence_cutoff", [](auto& c, auto& k, auto& v, auto&) { c.confidence_cutoff = parse_number<double>(k, v); }},
      {"run.seed", [](auto& c, auto& k, auto& v, auto&) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"run.output_dir", [](auto& c, auto&, auto& v, auto& b) { c.output_dir = resolve(b, v); }},
      {"run.workers", [](auto& c, auto& k, auto& v, auto&) { c.workers = parse_number<unsigned>(k, v); }},
  };
  return table;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++lineno;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    file.entries_[full] = unquote(trim(line.substr(eq + 1)));
    file.lines_[full] = lineno;
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

std::size_t KeyValueFile::line_of(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void PipelineConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config field: " + key);
  it->second(*this, key, value, base_dir);
}

void PipelineConfig::apply(const KeyValueFile& file, const std::filesystem::path& base_dir) {
  for (const auto& [key, value] : file.entries()) {
    try {
      set(key, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " + std::to_string(file.line_of(key)) + ")");
    }
  }
}

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> k;
    for (const auto& [key, setter] : setters()) k.push_back(key);
    return k;
  }();
  return out;
}

void PipelineConfig::propagate_seed() {
  w2v.seed = seed;
  train.seed = seed;
}

void PipelineConfig::validate(bool need_dataset) const {
  if (need_dataset) {
    if (dataset_path.empty()) throw ConfigError("data.dataset is not set");
    if (!std::filesystem::exists(dataset_path)) throw ConfigError("dataset not found: " + dataset_path.string());
  }
  if (stopwords_path && !std::filesystem::exists(*stopwords_path)) {
    throw ConfigError("data.stopwords: file not found: " + stopwords_path->string());
  }
  if (w2v_path && !std::filesystem::exists(*w2v_path)) {
    throw ConfigError("w2v.load: file not found: " + w2v_path->string());
  }
  if (context_store && !std::filesystem::exists(*context_store)) {
    throw ConfigError("context.store: file not found: " + context_store->string());
  }
  if (fuzzy_config_path && !std::filesystem::exists(*fuzzy_config_path)) {
    throw ConfigError("fuzzy.config: file not found: " + fuzzy_config_path->string());
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("model.validation_fraction must be in (0,1)");
  }
  if (!(confidence_cutoff >= 0.0 && confidence_cutoff <= 1.0)) {
    throw ConfigError("fuzzy.confidence_cutoff must be in [0,1]");
  }
  w2v.validate();
  model.validate();
  train.validate();
}

PipelineConfig build_config(const ConfigSources& sources) {
  PipelineConfig config;
  bool seed_set = false;
  if (sources.file) {
    const KeyValueFile file = KeyValueFile::load(*sources.file);
    config.apply(file, sources.file->parent_path());
    seed_set = file.entries().count("run.seed") > 0;
  }
  for (const auto& [key, value] : sources.overrides) {
    config.set(key, value);
    if (key == "run.seed") seed_set = true;
  }
  if (sources.seed_flag) {
    config.seed = *sources.seed_flag;
  } else if (!seed_set) {
    config.seed = seed_from_env().value_or(42);
  }
  config.propagate_seed();
  return config;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv(kSeedEnvVar);
  if (v == nullptr || *v == '\0') return std::nullopt;
  std::uint64_t out = 0;
  const std::string_view s(v);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + v + "'");
  }
  return out;
}

}  // namespace reviewjudge
