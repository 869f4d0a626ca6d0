#include "synlstm/lstm.hpp"

#include <array>

#include "synlstm/error.hpp"

namespace synlstm {

CellState zero_state(std::size_t rows, std::size_t hidden) {
  return {ad::Tensor(ad::Shape{rows, hidden}), ad::Tensor(ad::Shape{rows, hidden})};
}

LstmParams make_lstm_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                            std::size_t hidden, std::mt19937_64& rng) {
  LstmParams p;
  p.W_f = store.add_glorot(prefix + ".W_f", hidden, input_dim, rng);
  p.W_i = store.add_glorot(prefix + ".W_i", hidden, input_dim, rng);
  p.W_o = store.add_glorot(prefix + ".W_o", hidden, input_dim, rng);
  p.W_u = store.add_glorot(prefix + ".W_u", hidden, input_dim, rng);
  p.U_f = store.add_glorot(prefix + ".U_f", hidden, hidden, rng);
  p.U_i = store.add_glorot(prefix + ".U_i", hidden, hidden, rng);
  p.U_o = store.add_glorot(prefix + ".U_o", hidden, hidden, rng);
  p.U_u = store.add_glorot(prefix + ".U_u", hidden, hidden, rng);
  p.b_f = store.add(prefix + ".b_f", {hidden});
  p.b_i = store.add(prefix + ".b_i", {hidden});
  p.b_o = store.add(prefix + ".b_o", {hidden});
  p.b_u = store.add(prefix + ".b_u", {hidden});
  return p;
}

CellState plain_lstm_step(ad::Tape& tape, const ad::Tensor& x, const CellState& prev,
                          const LstmParams& p) {
  using ad::LinearTerm;
  auto affine = [&](const ad::Tensor& W, const ad::Tensor& U, const ad::Tensor& b) {
    const std::array<LinearTerm, 2> terms{LinearTerm{x, W}, LinearTerm{prev.h, U}};
    return ad::linear(tape, terms, b);
  };
  const ad::Tensor f = ad::sigmoid(tape, affine(p.W_f, p.U_f, p.b_f));
  const ad::Tensor i = ad::sigmoid(tape, affine(p.W_i, p.U_i, p.b_i));
  const ad::Tensor o = ad::sigmoid(tape, affine(p.W_o, p.U_o, p.b_o));
  const ad::Tensor u = ad::tanh(tape, affine(p.W_u, p.U_u, p.b_u));
  const ad::Tensor c = ad::add(tape, ad::mul(tape, f, prev.c), ad::mul(tape, i, u));
  const ad::Tensor h = ad::mul(tape, o, ad::tanh(tape, c));
  return {h, c};
}

namespace detail {

ad::Tensor run_direction(ad::Tape& tape, const SequenceLayout& layout, std::size_t hidden,
                         bool reverse, const StepFn& step, ad::Tensor* final_h) {
  CellState state = zero_state(layout.batch, hidden);
  std::vector<ad::Tensor> outs(layout.steps);
  std::vector<unsigned char> mask(layout.batch);
  for (std::size_t k = 0; k < layout.steps; ++k) {
    const std::size_t t = reverse ? layout.steps - 1 - k : k;
    bool all = true;
    for (std::size_t b = 0; b < layout.batch; ++b) {
      mask[b] = layout.active(t, b) ? 1 : 0;
      all = all && mask[b];
    }
    CellState next = step(t, state);
    if (!all) {
      next.h = ad::blend_rows(tape, mask, next.h, state.h);
      next.c = ad::blend_rows(tape, mask, next.c, state.c);
    }
    state = next;
    outs[t] = state.h;
  }
  if (final_h) *final_h = state.h;
  return ad::concat(tape, outs, 0);
}

}  // namespace detail

BiOutputs run_plain_bilstm(ad::Tape& tape, const ad::Tensor& x, const SequenceLayout& layout,
                           const LstmParams& fwd, const LstmParams& bwd) {
  if (layout.steps == 0 || layout.batch == 0) throw ContractError("run_plain_bilstm: empty batch");
  if (x.rows() != layout.rows() || x.cols() != fwd.input_dim()) {
    throw DimensionError("run_plain_bilstm: input " + ad::shape_string(x.shape()) +
                         " does not match layout/params");
  }
  auto stepper = [&](const LstmParams& p) {
    return [&tape, &x, &layout, &p](std::size_t t, const CellState& s) {
      const ad::Tensor xt = ad::slice_rows(tape, x, t * layout.batch, layout.batch);
      return plain_lstm_step(tape, xt, s, p);
    };
  };
  ad::Tensor fwd_final, bwd_final;
  const ad::Tensor f =
      detail::run_direction(tape, layout, fwd.hidden(), false, stepper(fwd), &fwd_final);
  const ad::Tensor b =
      detail::run_direction(tape, layout, bwd.hidden(), true, stepper(bwd), &bwd_final);
  const std::array<ad::Tensor, 2> steps{f, b};
  const std::array<ad::Tensor, 2> finals{fwd_final, bwd_final};
  return {ad::concat(tape, steps, 1), ad::concat(tape, finals, 1)};
}

}  // namespace synlstm
