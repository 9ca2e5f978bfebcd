// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reviewjudge/corpus.hpp"

namespace reviewjudge {

/// Piecewise-linear membership over [0, 1].
class MembershipFunction {
 public:
  using Breakpoint = std::pair<double, double>;  // (x, mu)

  MembershipFunction() = default;
  /// Throws ArgumentError unless x is strictly ascending from 0 to 1 and
  /// every mu lies in [0, 1].
  MembershipFunction(std::string name, std::vector<Breakpoint> points);

  double operator()(double x) const;
  const std::string& name() const { return name_; }
  const std::vector<Breakpoint>& points() const { return points_; }

 private:
  std::string name_;
  std::vector<Breakpoint> points_;
};

struct FuzzySetPair {
  MembershipFunction fake;
  MembershipFunction real;

  /// Mirror-symmetric trapezoids: fake is 1 on [0, 0.35] falling to 0 at
  /// 0.65; real is its reflection about 0.5.
  static FuzzySetPair defaults();
  /// Throws ArgumentError if some x in [0, 1] has zero membership in both.
  void check_coverage() const;
};

struct FuzzyConfig {
  FuzzySetPair sets = FuzzySetPair::defaults();
  double threshold = 0.5;
};

/// {"sets": {"fake": [[x, mu], ...], "real": [...]}, "threshold": t}
FuzzyConfig load_fuzzy_config(const std::filesystem::path& path);
FuzzyConfig parse_fuzzy_config(const std::string& json_text);

struct Memberships {
  double fake = 0.0;
  double real = 0.0;
};

/// Degrees of the score in each input set. Score must lie in [0, 1].
Memberships fuzzify(double score, const FuzzySetPair& sets);

/// Max aggregation.
inline double aggregate(double mu_fake, double mu_real) { return mu_fake > mu_real ? mu_fake : mu_real; }

inline constexpr int kDefuzzGridPoints = 1001;

/// Mamdani inference with the identity rule base: each output set is
/// clipped at its input membership, the clipped sets are combined with max,
/// and the centroid is taken by trapezoidal integration on a 1001-point
/// grid over [0, 1]. An all-zero region returns `score` unchanged.
double defuzzify(double score, const FuzzySetPair& sets);

struct Decision {
  Label label;
  double confidence;
};

/// crisp >= threshold is Real (OG); otherwise Fake (CG). Confidence is
/// |crisp - threshold| / max(threshold, 1 - threshold).
Decision decide(double crisp, double threshold);

struct FuzzyDecision {
  double score_in = 0.0;
  double mu_fake = 0.0;
  double mu_real = 0.0;
  double aggregate = 0.0;
  double crisp = 0.0;
  Label label = Label::OG;
  double confidence = 0.0;
  double threshold = 0.5;
};

FuzzyDecision classify(double score, const FuzzySetPair& sets, double threshold);

inline constexpr int kHistogramBins = 50;

struct BatchDecision {
  std::vector<FuzzyDecision> decisions;
  /// Counts of crisp values in 50 equal bins over [0, 1]; empty for an
  /// empty batch.
  std::vector<std::size_t> histogram;
};

BatchDecision classify_batch(std::span<const double> scores, const FuzzySetPair& sets, double threshold);

/// One JSON object per line.
std::string decision_json(const FuzzyDecision& d);
std::string decisions_jsonl(std::span<const FuzzyDecision> decisions);
std::string histogram_json(std::span<const std::size_t> histogram);

}  // namespace reviewjudge
