// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ReviewJudge Contributors

#include "reviewjudge/lstm.hpp"

#include <cmath>
#include <string>

#include "reviewjudge/error.hpp"

namespace reviewjudge {

namespace {

Eigen::VectorXd logistic(const Eigen::VectorXd& z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double x = z[k];
    if (x >= 0) {
      out[k] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      out[k] = e / (1.0 + e);
    }
  }
  return out;
}

// Applies sigmoid to the i, f, o blocks and tanh to the candidate block.
void activate_gates(Eigen::Ref<Eigen::VectorXd> z, Eigen::Index H) {
  z.head(3 * H) = logistic(z.head(3 * H));
  z.tail(H) = z.tail(H).array().tanh();
}

void fill_uniform(Eigen::MatrixXd& m, double limit, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
}

}  // namespace

LstmParams LstmParams::zeros(Eigen::Index input_dim, Eigen::Index hidden_dim) {
  return {Eigen::MatrixXd::Zero(4 * hidden_dim, input_dim), Eigen::MatrixXd::Zero(4 * hidden_dim, hidden_dim),
          Eigen::VectorXd::Zero(4 * hidden_dim)};
}

LstmParams LstmParams::random(Eigen::Index input_dim, Eigen::Index hidden_dim, Rng& rng) {
  LstmParams p = zeros(input_dim, hidden_dim);
  fill_uniform(p.W, std::sqrt(6.0 / static_cast<double>(input_dim + 4 * hidden_dim)), rng);
  fill_uniform(p.U, std::sqrt(6.0 / static_cast<double>(hidden_dim + 4 * hidden_dim)), rng);
  p.gate_rows(Gate::Forget).setOnes();
  return p;
}

void LstmParams::check_shapes() const {
  const Eigen::Index H = U.cols();
  if (U.rows() != 4 * H || W.rows() != 4 * H || b.size() != 4 * H) {
    throw DimensionError("LSTM parameter blocks disagree: W " + std::to_string(W.rows()) + "x" +
                         std::to_string(W.cols()) + ", U " + std::to_string(U.rows()) + "x" +
                         std::to_string(U.cols()) + ", b " + std::to_string(b.size()));
  }
}

LstmState lstm_step(const Eigen::VectorXd& x, const LstmState& state, const LstmParams& p) {
  const Eigen::Index H = p.hidden_dim();
  if (x.size() != p.input_dim()) {
    throw DimensionError("LSTM input has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(p.input_dim()));
  }
  if (state.h.size() != H || state.c.size() != H) {
    throw DimensionError("LSTM state size does not match hidden dim " + std::to_string(H));
  }
  Eigen::VectorXd z = p.W * x + p.U * state.h + p.b;
  activate_gates(z, H);
  LstmState next;
  next.c = z.segment(H, H).cwiseProduct(state.c) + z.head(H).cwiseProduct(z.tail(H));
  next.h = z.segment(2 * H, H).cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

Eigen::VectorXd branch_forward(const Eigen::MatrixXd& sequence, const LstmParams& p, LstmTrace* trace) {
  const Eigen::Index H = p.hidden_dim();
  const Eigen::Index T = sequence.cols();
  if (T > 0 && sequence.rows() != p.input_dim()) {
    throw DimensionError("sequence has " + std::to_string(sequence.rows()) + " features per step, expected " +
                         std::to_string(p.input_dim()));
  }

  // Input projections for all steps in one product.
  Eigen::MatrixXd z = (T > 0) ? Eigen::MatrixXd(p.W * sequence) : Eigen::MatrixXd(4 * H, 0);
  Eigen::MatrixXd c(H, T + 1), h(H, T + 1), tanh_c(H, T);
  c.col(0).setZero();
  h.col(0).setZero();
  for (Eigen::Index t = 0; t < T; ++t) {
    z.col(t).noalias() += p.U * h.col(t);
    z.col(t) += p.b;
    activate_gates(z.col(t), H);
    c.col(t + 1) = z.col(t).segment(H, H).cwiseProduct(c.col(t)) + z.col(t).head(H).cwiseProduct(z.col(t).tail(H));
    tanh_c.col(t) = c.col(t + 1).array().tanh();
    h.col(t + 1) = z.col(t).segment(2 * H, H).cwiseProduct(tanh_c.col(t));
  }
  Eigen::VectorXd out = h.col(T);
  if (trace != nullptr) {
    trace->x = sequence;
    trace->gates = std::move(z);
    trace->c = std::move(c);
    trace->h = std::move(h);
    trace->tanh_c = std::move(tanh_c);
  }
  return out;
}

void branch_backward(const LstmTrace& trace, const LstmParams& p, const Eigen::VectorXd& d_final_h,
                     LstmParams& grad) {
  const Eigen::Index H = p.hidden_dim();
  const Eigen::Index T = trace.steps();
  if (T == 0) return;

  Eigen::MatrixXd d_pre(4 * H, T);
  Eigen::VectorXd dh = d_final_h;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const auto gi = trace.gates.col(t).head(H).array();
    const auto gf = trace.gates.col(t).segment(H, H).array();
    const auto go = trace.gates.col(t).segment(2 * H, H).array();
    const auto gg = trace.gates.col(t).tail(H).array();
    const auto tc = trace.tanh_c.col(t).array();

    dc.array() += dh.array() * go * (1.0 - tc.square());
    d_pre.col(t).head(H) = (dc.array() * gg * gi * (1.0 - gi)).matrix();
    d_pre.col(t).segment(H, H) = (dc.array() * trace.c.col(t).array() * gf * (1.0 - gf)).matrix();
    d_pre.col(t).segment(2 * H, H) = (dh.array() * tc * go * (1.0 - go)).matrix();
    d_pre.col(t).tail(H) = (dc.array() * gi * (1.0 - gg.square())).matrix();

    dc.array() *= gf;
    dh.noalias() = p.U.transpose() * d_pre.col(t);
  }
  grad.W.noalias() += d_pre * trace.x.transpose();
  grad.U.noalias() += d_pre * trace.h.leftCols(T).transpose();
  grad.b += d_pre.rowwise().sum();
}

}  // namespace reviewjudge
