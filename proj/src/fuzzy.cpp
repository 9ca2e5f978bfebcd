// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "reviewjudge/error.hpp"

namespace reviewjudge {

MembershipFunction::MembershipFunction(std::string name, std::vector<Breakpoint> points)
    : name_(std::move(name)), points_(std::move(points)) {
  if (points_.size() < 2) throw ArgumentError("membership '" + name_ + "' needs at least two breakpoints");
  if (points_.front().first != 0.0 || points_.back().first != 1.0) {
    throw ArgumentError("membership '" + name_ + "' must start at x=0 and end at x=1");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto [x, mu] = points_[i];
    if (!(mu >= 0.0 && mu <= 1.0)) throw ArgumentError("membership '" + name_ + "' has mu outside [0,1]");
    if (i > 0 && !(x > points_[i - 1].first)) {
      throw ArgumentError("membership '" + name_ + "' breakpoints must be strictly ascending in x");
    }
  }
}

double MembershipFunction::operator()(double x) const {
  if (points_.empty()) return 0.0;
  if (x <= points_.front().first) return points_.front().second;
  if (x >= points_.back().first) return points_.back().second;
  const auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const Breakpoint& p) { return v < p.first; });
  const auto lo = hi - 1;
  const double t = (x - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

FuzzySetPair FuzzySetPair::defaults() {
  return {MembershipFunction("fake", {{0.0, 1.0}, {0.35, 1.0}, {0.65, 0.0}, {1.0, 0.0}}),
          MembershipFunction("real", {{0.0, 0.0}, {0.35, 0.0}, {0.65, 1.0}, {1.0, 1.0}})};
}

void FuzzySetPair::check_coverage() const {
  // Between consecutive breakpoints both functions are linear and
  // non-negative, so a zero of their max inside an interval forces a zero at
  // its ends. Checking the breakpoints is enough.
  std::vector<double> xs;
  for (const auto& p : fake.points()) xs.push_back(p.first);
  for (const auto& p : real.points()) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    if (std::max(fake(x), real(x)) <= 0.0) {
      throw ArgumentError("fuzzy sets leave x=" + std::to_string(x) + " uncovered");
    }
  }
}

namespace {

MembershipFunction parse_membership(const std::string& name, const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("fuzzy set '" + name + "' must be an array of [x, mu] pairs");
  std::vector<MembershipFunction::Breakpoint> points;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError("fuzzy set '" + name + "' entries must be [x, mu] number pairs");
    }
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  try {
    return MembershipFunction(name, std::move(points));
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

FuzzyConfig parse_fuzzy_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("fuzzy config is not valid JSON: ") + e.what());
  }
  FuzzyConfig cfg;
  if (j.contains("sets")) {
    const auto& sets = j.at("sets");
    if (!sets.contains("fake") || !sets.contains("real")) throw ConfigError("fuzzy config needs sets.fake and sets.real");
    cfg.sets.fake = parse_membership("fake", sets.at("fake"));
    cfg.sets.real = parse_membership("real", sets.at("real"));
    try {
      cfg.sets.check_coverage();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("threshold")) {
    if (!j.at("threshold").is_number()) throw ConfigError("fuzzy threshold must be a number");
    cfg.threshold = j.at("threshold").get<double>();
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw ConfigError("fuzzy threshold must be in (0,1)");
  }
  return cfg;
}

FuzzyConfig load_fuzzy_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("fuzzy config not found: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_fuzzy_config(text);
}

Memberships fuzzify(double score, const FuzzySetPair& sets) {
  if (!(score >= 0.0 && score <= 1.0)) throw ArgumentError("fuzzify: score outside [0,1]");
  return {sets.fake(score), sets.real(score)};
}

double defuzzify(double score, const FuzzySetPair& sets) {
  const Memberships mu = fuzzify(score, sets);
  constexpr int n = kDefuzzGridPoints;
  double area = 0.0;
  double moment = 0.0;
  for (int k = 0; k < n; ++k) {
    const double y = static_cast<double>(k) / (n - 1);
    const double level = std::max(std::min(sets.fake(y), mu.fake), std::min(sets.real(y), mu.real));
    const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
    area += w * level;
    moment += w * level * y;
  }
  if (area <= 0.0) return score;
  return std::clamp(moment / area, 0.0, 1.0);
}

Decision decide(double crisp, double threshold) {
  const Label label = crisp >= threshold ? Label::OG : Label::CG;
  return {label, std::abs(crisp - threshold) / std::max(threshold, 1.0 - threshold)};
}

FuzzyDecision classify(double score, const FuzzySetPair& sets, double threshold) {
  FuzzyDecision d;
  d.score_in = score;
  const Memberships mu = fuzzify(score, sets);
  d.mu_fake = mu.fake;
  d.mu_real = mu.real;
  d.aggregate = aggregate(mu.fake, mu.real);
  d.crisp = defuzzify(score, sets);
  const Decision dec = decide(d.crisp, threshold);
  d.label = dec.label;
  d.confidence = dec.confidence;
  d.threshold = threshold;
  return d;
}

BatchDecision classify_batch(std::span<const double> scores, const FuzzySetPair& sets, double threshold) {
  BatchDecision out;
  if (scores.empty()) return out;
  out.histogram.assign(kHistogramBins, 0);
  out.decisions.reserve(scores.size());
  for (double s : scores) {
    out.decisions.push_back(classify(s, sets, threshold));
    const auto bin = std::min<std::size_t>(kHistogramBins - 1,
                                           static_cast<std::size_t>(out.decisions.back().crisp * kHistogramBins));
    ++out.histogram[bin];
  }
  return out;
}

std::string decision_json(const FuzzyDecision& d) {
  nlohmann::ordered_json j = {{"score_in", d.score_in},     {"mu_fake", d.mu_fake},
                              {"mu_real", d.mu_real},       {"aggregate", d.aggregate},
                              {"crisp", d.crisp},           {"label", label_name(d.label)},
                              {"confidence", d.confidence}, {"threshold", d.threshold}};
  return j.dump();
}

std::string decisions_jsonl(std::span<const FuzzyDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    out += decision_json(d);
    out += '\n';
  }
  return out;
}

std::string histogram_json(std::span<const std::size_t> histogram) {
  return nlohmann::json(std::vector<std::size_t>(histogram.begin(), histogram.end())).dump();
}

}  // namespace reviewjudge
