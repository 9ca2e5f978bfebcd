// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/context_embed.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>

#include "reviewjudge/binary_io.hpp"
#include "reviewjudge/error.hpp"

namespace reviewjudge {

namespace {

class Md5 {
 public:
  Md5() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_md5(), nullptr) != 1) throw Error("MD5 init failed");
  }
  ~Md5() { EVP_MD_CTX_free(ctx_); }
  Md5(const Md5&) = delete;
  Md5& operator=(const Md5&) = delete;

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw Error("MD5 update failed");
  }
  Digest finish() {
    Digest d{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, d.data(), &len) != 1 || len != d.size()) throw Error("MD5 final failed");
    return d;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

Digest bytes_digest(std::span<const std::uint8_t> bytes) {
  Md5 md5;
  md5.update(bytes.data(), bytes.size());
  return md5.finish();
}

Digest file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  Md5 md5;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    md5.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return md5.finish();
}

std::string digest_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  for (std::uint8_t b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0xF]);
  }
  return s;
}

void EmbeddingStore::validate() const {
  for (const auto& [id, v] : vectors) {
    if (v.size() != dim) {
      throw DimensionError("review " + std::to_string(id) + ": vector has " + std::to_string(v.size()) +
                           " entries, store dim is " + std::to_string(dim));
    }
    for (float x : v) {
      if (!std::isfinite(x)) throw FormatError("review " + std::to_string(id) + ": non-finite vector entry");
    }
  }
}

void save_store(const EmbeddingStore& store, std::ostream& out) {
  store.validate();
  binary::Writer w(out);
  w.magic("CTX1");
  w.u32(store.dim);
  w.u64(store.vectors.size());
  w.bytes(store.source_digest.data(), store.source_digest.size());
  for (const auto& [id, v] : store.vectors) {
    w.u64(static_cast<std::uint64_t>(id));
    for (float x : v) w.f32(x);
  }
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_store(store, out);
}

EmbeddingStore load_store(std::istream& in, std::uint32_t expected_dim) {
  binary::Reader r(in);
  if (r.fixed(4, "magic") != "CTX1") throw FormatError("not a CTX1 store (bad magic)");
  EmbeddingStore store;
  store.dim = r.u32("dimension");
  if (expected_dim != 0 && store.dim != expected_dim) {
    throw DimensionError("store dimension " + std::to_string(store.dim) + " does not match expected " +
                         std::to_string(expected_dim));
  }
  const std::uint64_t count = r.u64("record count");
  r.bytes(store.source_digest.data(), store.source_digest.size(), "corpus digest");
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t record_offset = r.offset();
    const auto id = static_cast<std::int64_t>(r.u64("review id"));
    std::vector<float> v(store.dim);
    for (float& x : v) x = r.f32("vector");
    if (!store.vectors.emplace(id, std::move(v)).second) {
      throw CorruptionError(record_offset, "duplicate review id " + std::to_string(id));
    }
  }
  if (!r.at_end()) throw CorruptionError(r.offset(), "trailing bytes after last record");
  store.validate();
  return store;
}

EmbeddingStore load_store(const std::filesystem::path& path, std::uint32_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return load_store(in, expected_dim);
}

Eigen::VectorXd fallback_embed(const TokenizedReview& review, const EmbeddingMatrix& matrix, const Vocabulary& vocab) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(matrix.dim));
  std::size_t n = 0;
  for (const auto& t : review.tokens) {
    const auto idx = vocab.index_of(t);
    if (!idx) continue;
    const auto row = matrix.vector(static_cast<std::size_t>(*idx));
    for (std::size_t d = 0; d < matrix.dim; ++d) mean[static_cast<Eigen::Index>(d)] += row[d];
    ++n;
  }
  if (n == 0) return mean;
  mean /= static_cast<double>(n);
  const double norm = mean.norm();
  if (norm == 0.0) return mean;
  return mean / norm;
}

StoreProvider::StoreProvider(EmbeddingStore store, std::span<const TokenizedReview> corpus)
    : store_(std::move(store)) {
  for (const auto& r : corpus) {
    if (store_.vectors.find(r.review_id) == store_.vectors.end()) {
      throw LookupError("context store has no vector for review " + std::to_string(r.review_id));
    }
  }
}

Eigen::VectorXd StoreProvider::get(const TokenizedReview& review) const {
  auto it = store_.vectors.find(review.review_id);
  if (it == store_.vectors.end()) {
    throw LookupError("context store has no vector for review " + std::to_string(review.review_id));
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(store_.dim));
  for (std::size_t d = 0; d < it->second.size(); ++d) v[static_cast<Eigen::Index>(d)] = it->second[d];
  return v;
}

}  // namespace reviewjudge
