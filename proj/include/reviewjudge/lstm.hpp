// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#pragma once

#include <Eigen/Dense>

#include "reviewjudge/rng.hpp"

namespace reviewjudge {

/// Gate blocks are stacked in the order input, forget, output, candidate:
/// rows [g*H, (g+1)*H) of W, U and b belong to gate g.
enum class Gate : int { Input = 0, Forget = 1, Output = 2, Candidate = 3 };

struct LstmParams {
  Eigen::MatrixXd W;  // 4H x D
  Eigen::MatrixXd U;  // 4H x H
  Eigen::VectorXd b;  // 4H

  static LstmParams zeros(Eigen::Index input_dim, Eigen::Index hidden_dim);
  /// Glorot-uniform W and U, zero bias except a forget-gate bias of 1.
  static LstmParams random(Eigen::Index input_dim, Eigen::Index hidden_dim, Rng& rng);

  Eigen::Index input_dim() const { return W.cols(); }
  Eigen::Index hidden_dim() const { return U.cols(); }
  bool empty() const { return W.size() == 0 && U.size() == 0 && b.size() == 0; }
  /// Throws DimensionError when the blocks disagree.
  void check_shapes() const;
  bool all_finite() const { return W.allFinite() && U.allFinite() && b.allFinite(); }

  auto gate_rows(Gate g) { return b.segment(static_cast<int>(g) * hidden_dim(), hidden_dim()); }
  auto gate_rows(Gate g) const { return b.segment(static_cast<int>(g) * hidden_dim(), hidden_dim()); }
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static LstmState zero(Eigen::Index hidden_dim) {
    return {Eigen::VectorXd::Zero(hidden_dim), Eigen::VectorXd::Zero(hidden_dim)};
  }
};

/// i = s(W_i x + U_i h + b_i), f, o likewise, g = tanh(W_c x + U_c h + b_c);
/// c' = f*c + i*g; h' = o*tanh(c').
LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& state, const LstmParams& p);

/// Intermediates of a full sequence pass, kept for BPTT.
struct LstmTrace {
  Eigen::MatrixXd x;       // D x T inputs
  Eigen::MatrixXd gates;   // 4H x T activated gates
  Eigen::MatrixXd c;       // H x (T+1), column 0 is the initial zero state
  Eigen::MatrixXd h;       // H x (T+1)
  Eigen::MatrixXd tanh_c;  // H x T

  Eigen::Index steps() const { return x.cols(); }
};

/// Runs the sequence (one column per step) from the zero state and returns
/// the final hidden state; an empty sequence yields the zero vector.
Eigen::VectorXd branch_forward(const Eigen::MatrixXd& sequence, const LstmParams& p, LstmTrace* trace = nullptr);

/// Backpropagates d(loss)/d(final h) through time, adding parameter
/// gradients into `grad` (same shapes as `p`).
void branch_backward(const LstmTrace& trace, const LstmParams& p, const Eigen::VectorXd& d_final_h,
                     LstmParams& grad);

}  // namespace reviewjudge
