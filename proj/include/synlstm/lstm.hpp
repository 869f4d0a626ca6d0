#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>

#include "synlstm/ops.hpp"
#include "synlstm/params.hpp"

namespace synlstm {

// Recurrent state for a batch: h and c are [rows x H].
struct CellState {
  ad::Tensor h;
  ad::Tensor c;
};

CellState zero_state(std::size_t rows, std::size_t hidden);

// Standard LSTM gates f, i, o and candidate u over (x, h).
struct LstmParams {
  ad::Tensor W_f, W_i, W_o, W_u;  // [H x D]
  ad::Tensor U_f, U_i, U_o, U_u;  // [H x H]
  ad::Tensor b_f, b_i, b_o, b_u;  // [H]

  std::size_t input_dim() const { return W_f.cols(); }
  std::size_t hidden() const { return W_f.rows(); }
};

LstmParams make_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                            std::size_t hidden, std::mt19937_64& rng);

// c_t = f*c_{t-1} + i*tanh(W_u x + U_u h + b_u), h_t = o*tanh(c_t); x is [rows x D].
CellState plain_lstm_step(ad::Tape& tape, const ad::Tensor& x, const CellState& prev,
                          const LstmParams& p);

// Time-major layout shared by the recurrent runners: row t*batch + b holds
// position t of sequence b. Positions t >= lengths[b] are padding.
struct SequenceLayout {
  std::size_t steps = 0;
  std::size_t batch = 0;
  std::vector<std::size_t> lengths;

  std::size_t rows() const { return steps * batch; }
  std::size_t row(std::size_t t, std::size_t b) const { return t * batch + b; }
  bool active(std::size_t t, std::size_t b) const { return t < lengths[b]; }
};

struct BiOutputs {
  ad::Tensor per_step;     // [steps*batch x 2H], row t*batch+b = [fwd_h ; bwd_h]
  ad::Tensor final_state;  // [batch x 2H] = [fwd h after last token ; bwd h after first token]
};

// Plain bidirectional LSTM over x [steps*batch x D]. Padded positions carry the
// previous state unchanged, so each sequence sees only its own tokens.
BiOutputs run_plain_bilstm(ad::Tape& tape, const ad::Tensor& x, const SequenceLayout& layout,
                           const LstmParams& fwd, const LstmParams& bwd);

namespace detail {
using StepFn = std::function<CellState(std::size_t t, const CellState& prev)>;
// Runs `step` over every position in forward or reverse order, freezing the
// state of sequences whose position t is padding. Returns the per-step h
// stacked time-major; the last state's h is written to *final_h when given.
ad::Tensor run_direction(ad::Tape& tape, const SequenceLayout& layout, std::size_t hidden,
                         bool reverse, const StepFn& step, ad::Tensor* final_h);
}  // namespace detail

}  // namespace synlstm
