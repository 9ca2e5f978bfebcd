// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include "reviewjudge/binary_io.hpp"
#include "reviewjudge/error.hpp"

namespace reviewjudge {

namespace {


void write_matrix(binary::Writer& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.f32(static_cast<float>(m(i, j)));
  }
}

void read_matrix(binary::Reader& r, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const float x = r.f32("parameter tensor");
      if (!std::isfinite(x)) throw CorruptionError(r.offset() - 4, "non-finite parameter");
      m(i, j) = x;
    }
  }
}

void write_lstm(binary::Writer& w, const LstmParams& p) {
  write_matrix(w, p.W);
  write_matrix(w, p.U);
  write_matrix(w, p.b);
}

void read_lstm(binary::Reader& r, LstmParams& p) {
  read_matrix(r, p.W);
  read_matrix(r, p.U);
  Eigen::MatrixXd b(p.b.size(), 1);
  read_matrix(r, b);
  p.b = b.col(0);
}

std::uint32_t checked_u32(Eigen::Index v, const char* what) {
  if (v < 0 || v > static_cast<Eigen::Index>(UINT32_MAX)) throw FormatError(std::string(what) + " out of range");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void save_model(const SiameseModel& model, std::ostream& out) {
  const SiameseConfig& c = model.config;
  binary::Writer w(out);
  w.magic("SIAM");
  w.u32(kCheckpointVersion);
  w.u32(checked_u32(c.input_dim, "input_dim"));
  w.u32(checked_u32(c.hidden_dim, "hidden_dim"));
  w.u32(c.shared_weights ? 1 : 0);
  w.u32(checked_u32(c.max_seq_len, "max_seq_len"));
  w.f32(static_cast<float>(c.dropout));
  w.u32(static_cast<std::uint32_t>(model.params.head.size()));
  for (const auto& layer : model.params.head) {
    w.u32(checked_u32(layer.W.cols(), "layer input"));
    w.u32(checked_u32(layer.W.rows(), "layer output"));
    w.u32(static_cast<std::uint32_t>(layer.activation));
  }
  write_lstm(w, model.params.branch_a);
  if (!c.shared_weights) write_lstm(w, model.params.branch_b);
  for (const auto& layer : model.params.head) {
    write_matrix(w, layer.W);
    write_matrix(w, layer.b);
  }
}

void save_model(const SiameseModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_model(model, out);
}

SiameseModel load_model(std::istream& in) {
  binary::Reader r(in);
  if (r.fixed(4, "magic") != "SIAM") throw FormatError("not a SIAM checkpoint (bad magic)");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  SiameseModel model;
  SiameseConfig& c = model.config;
  c.input_dim = r.u32("input_dim");
  c.hidden_dim = r.u32("hidden_dim");
  const std::uint32_t shared = r.u32("shared_weights");
  if (shared > 1) throw FormatError("bad shared_weights flag");
  c.shared_weights = shared == 1;
  c.max_seq_len = r.u32("max_seq_len");
  c.dropout = r.f32("dropout");
  const std::uint32_t layers = r.u32("head layer count");
  if (layers == 0 || layers > 64) throw FormatError("implausible head layer count " + std::to_string(layers));

  c.head_hidden.clear();
  Eigen::Index expected_in = c.feature_dim();
  for (std::uint32_t l = 0; l < layers; ++l) {
    const std::uint32_t in_dim = r.u32("layer input");
    const std::uint32_t out_dim = r.u32("layer output");
    const std::uint32_t act = r.u32("layer activation");
    if (act > 1) throw FormatError("unknown activation code " + std::to_string(act));
    if (in_dim != expected_in) {
      throw DimensionError("head layer " + std::to_string(l) + " takes " + std::to_string(in_dim) +
                           " inputs, expected " + std::to_string(expected_in));
    }
    if (l + 1 < layers) c.head_hidden.push_back(out_dim);
    model.params.head.push_back({Eigen::MatrixXd(out_dim, in_dim), Eigen::VectorXd(out_dim),
                                 static_cast<Activation>(act)});
    expected_in = out_dim;
  }
  if (expected_in != 1) throw DimensionError("final head layer must have one output unit");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad hyperparameters in checkpoint: ") + e.what());
  }

  model.params.branch_a = LstmParams::zeros(c.input_dim, c.hidden_dim);
  read_lstm(r, model.params.branch_a);
  if (!c.shared_weights) {
    model.params.branch_b = LstmParams::zeros(c.input_dim, c.hidden_dim);
    read_lstm(r, model.params.branch_b);
  }
  for (auto& layer : model.params.head) {
    read_matrix(r, layer.W);
    Eigen::MatrixXd b(layer.b.size(), 1);
    read_matrix(r, b);
    layer.b = b.col(0);
  }
  if (!r.at_end()) throw CorruptionError(r.offset(), "trailing bytes after last tensor");
  return model;
}

SiameseModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint not found: " + path.string());
  return load_model(in);
}

}  // namespace reviewjudge
