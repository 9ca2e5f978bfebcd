// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "reviewjudge/preprocess.hpp"
#include "reviewjudge/word2vec.hpp"

namespace reviewjudge {

inline constexpr std::size_t kContextDim = 384;

using Digest = std::array<std::uint8_t, 16>;

/// MD5 of a file's bytes; identifies the corpus a store was built from.
Digest file_digest(const std::filesystem::path& path);
Digest bytes_digest(std::span<const std::uint8_t> bytes);
std::string digest_hex(const Digest& d);

/// Review-level contextual vectors keyed by review id.
struct EmbeddingStore {
  std::uint32_t dim = kContextDim;
  std::map<std::int64_t, std::vector<float>> vectors;
  Digest source_digest{};

  /// Throws DimensionError / FormatError on a bad vector.
  void validate() const;
  bool operator==(const EmbeddingStore&) const = default;
};

/// CTX1: "CTX1", u32 dim, u64 count, 16-byte digest, then count x (u64 id,
/// dim f32). Little-endian. Records are written in ascending id order.
void save_store(const EmbeddingStore& store, const std::filesystem::path& path);
void save_store(const EmbeddingStore& store, std::ostream& out);
/// Rejects a file whose dim differs from expected_dim (0 accepts any).
EmbeddingStore load_store(const std::filesystem::path& path, std::uint32_t expected_dim = kContextDim);
EmbeddingStore load_store(std::istream& in, std::uint32_t expected_dim = kContextDim);

/// L2-normalized mean of the review's in-vocabulary token vectors; zero
/// vector when none are known.
Eigen::VectorXd fallback_embed(const TokenizedReview& review, const EmbeddingMatrix& matrix, const Vocabulary& vocab);

/// Source of the per-review contextual vector.
class ContextProvider {
 public:
  enum class Kind { Store, Fallback };
  virtual ~ContextProvider() = default;
  virtual Kind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual Eigen::VectorXd get(const TokenizedReview& review) const = 0;
};

class StoreProvider final : public ContextProvider {
 public:
  /// Checks that every review in `corpus` has a vector.
  StoreProvider(EmbeddingStore store, std::span<const TokenizedReview> corpus);
  Kind kind() const override { return Kind::Store; }
  std::size_t dim() const override { return store_.dim; }
  Eigen::VectorXd get(const TokenizedReview& review) const override;

 private:
  EmbeddingStore store_;
};

class FallbackProvider final : public ContextProvider {
 public:
  FallbackProvider(const EmbeddingMatrix& matrix, const Vocabulary& vocab) : matrix_(matrix), vocab_(vocab) {}
  Kind kind() const override { return Kind::Fallback; }
  std::size_t dim() const override { return matrix_.dim; }
  Eigen::VectorXd get(const TokenizedReview& review) const override {
    return fallback_embed(review, matrix_, vocab_);
  }

 private:
  const EmbeddingMatrix& matrix_;
  const Vocabulary& vocab_;
};

}  // namespace reviewjudge
