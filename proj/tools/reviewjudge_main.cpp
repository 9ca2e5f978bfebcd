// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reviewjudge/config.hpp"
#include "reviewjudge/error.hpp"
#include "reviewjudge/pipeline.hpp"

namespace rj = reviewjudge;

int main(int argc, char** argv) {
  CLI::App app{"reviewjudge: fake product review detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> length_unit;
  std::optional<std::string> dataset;
  std::optional<std::string> output_dir;
  std::vector<std::string> settings;
  bool fixed_window = false;
  bool shared_weights = false;
  bool json_only = false;

  app.add_option("--config", config_file, "Config file ([section] key = value)");
  app.add_option("--seed", seed, "Run seed (falls back to REVIEWJUDGE_SEED, then 42)");
  app.add_option("--workers", workers, "Worker threads for word2vec and batch evaluation");
  app.add_option("--length-unit", length_unit, "Average length unit for stats: chars or tokens");
  app.add_option("--dataset", dataset, "Dataset CSV");
  app.add_option("--output-dir", output_dir, "Directory for outputs");
  app.add_option("--set", settings, "Override a config field, e.g. --set model.max_epochs=5")->allow_extra_args(false);
  app.add_flag("--fixed-window", fixed_window, "Use the full skip-gram window for every center");
  app.add_flag("--shared-weights", shared_weights, "Share LSTM weights between the two branches");
  app.add_flag("--json-only", json_only, "stats: print JSON instead of the table");

  auto* stats = app.add_subcommand("stats", "Category-wise review counts and average lengths");

  auto* preprocess = app.add_subcommand("preprocess", "Token frequency table");
  std::string stage = "cleaned";
  std::size_t top_n = 50;
  preprocess->add_option("--stage", stage, "raw or cleaned")->capture_default_str();
  preprocess->add_option("--top", top_n, "Number of tokens to report (0 = all)")->capture_default_str();

  auto* train_w2v = app.add_subcommand("train-w2v", "Train skip-gram embeddings");
  rj::TrainW2VOptions w2v_opts;
  train_w2v->add_flag("--text", w2v_opts.write_text, "Also write the plain-text vector file");
  train_w2v->add_option("--neighbors", w2v_opts.neighbors_of, "Report nearest neighbours of this token (repeatable)")
      ->allow_extra_args(false);
  train_w2v->add_option("-k", w2v_opts.k, "Neighbours per token")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train embeddings and the siamese model");

  auto* evaluate = app.add_subcommand("evaluate", "Sigmoid and fuzzy metrics for a checkpoint");
  std::optional<std::string> eval_ckpt;
  evaluate->add_option("--checkpoint", eval_ckpt, "Model checkpoint (default: <output-dir>/model.siam)");

  auto* classify = app.add_subcommand("classify", "Classify one review");
  std::optional<std::string> cls_ckpt;
  std::string text;
  classify->add_option("--checkpoint", cls_ckpt, "Model checkpoint (default: <output-dir>/model.siam)");
  classify->add_option("text", text, "Review text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rj::kExitUsage;
  }

  rj::PipelineConfig config;
  try {
    rj::ConfigSources sources;
    if (config_file) sources.file = *config_file;
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw rj::ConfigError("--set expects key=value, got '" + s + "'");
      sources.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (dataset) sources.overrides.emplace_back("data.dataset", *dataset);
    if (output_dir) sources.overrides.emplace_back("run.output_dir", *output_dir);
    if (length_unit) sources.overrides.emplace_back("data.length_unit", *length_unit);
    if (fixed_window) sources.overrides.emplace_back("w2v.fixed_window", "true");
    if (shared_weights) sources.overrides.emplace_back("model.shared_weights", "true");
    if (workers) {
      sources.overrides.emplace_back("run.workers", std::to_string(*workers));
      sources.overrides.emplace_back("w2v.workers", std::to_string(*workers));
    }
    sources.seed_flag = seed;
    config = rj::build_config(sources);
  } catch (const rj::Error& e) {
    std::cerr << "reviewjudge: " << e.what() << '\n';
    return rj::kExitUsage;
  }

  if (stats->parsed()) {
    return rj::cmd_stats(config, rj::StatsOptions{json_only}, std::cout, std::cerr);
  }
  if (preprocess->parsed()) {
    rj::PreprocessOptions opts;
    try {
      opts.stage = rj::parse_frequency_stage(stage);
    } catch (const rj::Error& e) {
      std::cerr << "reviewjudge preprocess: " << e.what() << '\n';
      return rj::kExitUsage;
    }
    opts.top_n = top_n;
    return rj::cmd_preprocess(config, opts, std::cout, std::cerr);
  }
  if (train_w2v->parsed()) return rj::cmd_train_w2v(config, w2v_opts, std::cout, std::cerr);
  if (train->parsed()) return rj::cmd_train(config, std::cout, std::cerr);
  if (evaluate->parsed()) {
    std::optional<std::filesystem::path> ckpt;
    if (eval_ckpt) ckpt = *eval_ckpt;
    return rj::cmd_evaluate(config, ckpt, std::cout, std::cerr);
  }
  if (classify->parsed()) {
    std::optional<std::filesystem::path> ckpt;
    if (cls_ckpt) ckpt = *cls_ckpt;
    return rj::cmd_classify(config, ckpt, text, std::cout, std::cerr);
  }
  return rj::kExitUsage;
}
