// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <filesystem>
#include <iosfwd>

#include "reviewjudge/siamese.hpp"

namespace reviewjudge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// SIAM checkpoint layout (little-endian):
//   "SIAM", u32 version,
//   u32 input_dim, u32 hidden_dim, u32 shared_weights, u32 max_seq_len,
//   f32 dropout, u32 head layer count, per layer (u32 in, u32 out, u32 activation),
//   then tensors in SiameseParams::tensors() order as row-major f32.
void save_model(const SiameseModel& model, std::ostream& out);
void save_model(const SiameseModel& model, const std::filesystem::path& path);
SiameseModel load_model(std::istream& in);
SiameseModel load_model(const std::filesystem::path& path);

}  // namespace reviewjudge
