#pragma once

// Synergized-LSTM cell: an LSTM with a second input stream g_t (the
// graph-encoded representation), a fourth gate m_t and a second candidate
// state s~_t:
//
//   f_t = sigmoid(W_f x + U_f h + Q_f g + b_f)
//   o_t = sigmoid(W_o x + U_o h + Q_o g + b_o)
//   i_t = sigmoid(W_i x + U_i h + b_i)
//   m_t = sigmoid(W_m g + U_m h + b_m)
//   c~_t = tanh(W_u x + U_u h + b_u)
//   s~_t = tanh(W_n g + U_n h + b_n)
//   c_t = f_t * c_{t-1} + i_t * c~_t + m_t * s~_t
//   h_t = o_t * tanh(c_t)

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "synlstm/lstm.hpp"

namespace synlstm {

struct SynLstmParams {
  ad::Tensor W_f, W_o, W_i, W_u;            // [H x Dx]
  ad::Tensor W_m, W_n;                      // [H x Dg]
  ad::Tensor U_f, U_o, U_i, U_m, U_u, U_n;  // [H x H]
  ad::Tensor Q_f, Q_o;                      // [H x Dg]
  ad::Tensor b_f, b_o, b_i, b_m, b_u, b_n;  // [H]

  std::size_t input_dim() const { return W_f.cols(); }
  std::size_t graph_dim() const { return W_m.cols(); }
  std::size_t hidden() const { return W_f.rows(); }
};

SynLstmParams make_syn_lstm_params(ParamStore& store, const std::string& prefix,
                                   std::size_t input_dim, std::size_t graph_dim,
                                   std::size_t hidden, std::mt19937_64& rng);

// Per-step activations, each [rows x H].
struct SynLstmActivations {
  ad::Tensor f, i, m, o, c_tilde, s_tilde;
};

CellState syn_lstm_step(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                        const CellState& prev, const SynLstmParams& p,
                        SynLstmActivations* activations = nullptr);

enum class Direction { forward = 0, backward = 1 };

// Recorded gate values of one sentence.
struct GateTrace {
  struct Step {
    std::size_t position = 0;
    Direction direction = Direction::forward;
    std::vector<double> f, i, m, o;
  };
  std::size_t hidden = 0;
  std::vector<Step> steps;

  // Rows `position,gate,mean_value` (mean over the H components, one row per
  // direction and gate).
  std::string to_csv() const;
};

// Bidirectional Syn-LSTM over time-major x [steps*batch x Dx] and
// g [steps*batch x Dg]. Returns [steps*batch x 2H] where row t*batch+b is
// [forward h_t ; backward h_t]. When `traces` is given it receives one
// GateTrace per sequence in the batch.
ad::Tensor run_bidirectional(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                             const SequenceLayout& layout, const SynLstmParams& fwd,
                             const SynLstmParams& bwd, std::vector<GateTrace>* traces = nullptr);

// Single-sentence convenience: x [n x Dx], g [n x Dg] -> [n x 2H].
ad::Tensor run_bidirectional(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                             const SynLstmParams& fwd, const SynLstmParams& bwd,
                             GateTrace* trace = nullptr);

// Closed-form cell state of a forward pass started from zero state:
//   c_t = sum_j a_j^t * c~_j + sum_j q_j^t * s~_j,
//   a_j^t = i_j * prod_{k=j+1..t} f_k,  q_j^t = m_j * prod_{k=j+1..t} f_k.
// The gates and candidates come from running the cell; the cell state itself
// is assembled only from the weighted sum.
struct CellExpansion {
  std::vector<double> c;  // [H]
  std::vector<double> a;  // [(t+1) x H], row j = a_j^t
  std::vector<double> q;  // [(t+1) x H], row j = q_j^t
};
CellExpansion expand_cell_state(const ad::Tensor& x_seq, const ad::Tensor& g_seq,
                                const SynLstmParams& p, std::size_t t);

}  // namespace synlstm
