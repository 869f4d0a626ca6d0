#include "synlstm/syn_lstm.hpp"

#include <array>
#include <sstream>

#include "synlstm/error.hpp"

namespace synlstm {

SynLstmParams make_syn_lstm_params(ParamStore& store, const std::string& prefix,
                                   std::size_t input_dim, std::size_t graph_dim,
                                   std::size_t hidden, std::mt19937_64& rng) {
  SynLstmParams p;
  auto w = [&](const char* name, std::size_t cols) {
    return store.add_glorot(prefix + "." + name, hidden, cols, rng);
  };
  p.W_f = w("W_f", input_dim);
  p.W_o = w("W_o", input_dim);
  p.W_i = w("W_i", input_dim);
  p.W_u = w("W_u", input_dim);
  p.W_m = w("W_m", graph_dim);
  p.W_n = w("W_n", graph_dim);
  p.U_f = w("U_f", hidden);
  p.U_o = w("U_o", hidden);
  p.U_i = w("U_i", hidden);
  p.U_m = w("U_m", hidden);
  p.U_u = w("U_u", hidden);
  p.U_n = w("U_n", hidden);
  p.Q_f = w("Q_f", graph_dim);
  p.Q_o = w("Q_o", graph_dim);
  p.b_f = store.add(prefix + ".b_f", {hidden});
  p.b_o = store.add(prefix + ".b_o", {hidden});
  p.b_i = store.add(prefix + ".b_i", {hidden});
  p.b_m = store.add(prefix + ".b_m", {hidden});
  p.b_u = store.add(prefix + ".b_u", {hidden});
  p.b_n = store.add(prefix + ".b_n", {hidden});
  return p;
}

CellState syn_lstm_step(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                        const CellState& prev, const SynLstmParams& p,
                        SynLstmActivations* activations) {
  using ad::LinearTerm;
  if (x.cols() != p.input_dim() || g.cols() != p.graph_dim() || x.rows() != g.rows() ||
      prev.h.cols() != p.hidden() || prev.h.rows() != x.rows()) {
    throw DimensionError("syn_lstm_step: x " + ad::shape_string(x.shape()) + ", g " +
                         ad::shape_string(g.shape()) + ", h " + ad::shape_string(prev.h.shape()) +
                         " do not match parameters");
  }
  const ad::Tensor& h = prev.h;
  auto lin3 = [&](const ad::Tensor& W, const ad::Tensor& U, const ad::Tensor& Q,
                  const ad::Tensor& b) {
    const std::array<LinearTerm, 3> terms{LinearTerm{x, W}, LinearTerm{h, U}, LinearTerm{g, Q}};
    return ad::linear(tape, terms, b);
  };
  auto lin2 = [&](const ad::Tensor& in, const ad::Tensor& W, const ad::Tensor& U,
                  const ad::Tensor& b) {
    const std::array<LinearTerm, 2> terms{LinearTerm{in, W}, LinearTerm{h, U}};
    return ad::linear(tape, terms, b);
  };
  const ad::Tensor f = ad::sigmoid(tape, lin3(p.W_f, p.U_f, p.Q_f, p.b_f));
  const ad::Tensor o = ad::sigmoid(tape, lin3(p.W_o, p.U_o, p.Q_o, p.b_o));
  const ad::Tensor i = ad::sigmoid(tape, lin2(x, p.W_i, p.U_i, p.b_i));
  const ad::Tensor m = ad::sigmoid(tape, lin2(g, p.W_m, p.U_m, p.b_m));
  const ad::Tensor c_tilde = ad::tanh(tape, lin2(x, p.W_u, p.U_u, p.b_u));
  const ad::Tensor s_tilde = ad::tanh(tape, lin2(g, p.W_n, p.U_n, p.b_n));
  const ad::Tensor c = ad::add(
      tape, ad::add(tape, ad::mul(tape, f, prev.c), ad::mul(tape, i, c_tilde)),
      ad::mul(tape, m, s_tilde));
  const ad::Tensor h_next = ad::mul(tape, o, ad::tanh(tape, c));
  if (activations) *activations = {f, i, m, o, c_tilde, s_tilde};
  return {h_next, c};
}

std::string GateTrace::to_csv() const {
  std::ostringstream os;
  os << "position,gate,mean_value\n";
  os.precision(17);
  for (const Step& s : steps) {
    const std::array<std::pair<const char*, const std::vector<double>*>, 4> gates{
        {{"f", &s.f}, {"i", &s.i}, {"m", &s.m}, {"o", &s.o}}};
    for (const auto& [name, vals] : gates) {
      double mean = 0.0;
      for (double v : *vals) mean += v;
      if (!vals->empty()) mean /= static_cast<double>(vals->size());
      os << s.position << ',' << (s.direction == Direction::forward ? "" : "bwd_") << name << ','
         << mean << '\n';
    }
  }
  return os.str();
}

namespace {

std::vector<double> row_of(const ad::Tensor& t, std::size_t r) {
  const std::size_t c = t.cols();
  return {t.data().begin() + r * c, t.data().begin() + (r + 1) * c};
}

}  // namespace

ad::Tensor run_bidirectional(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                             const SequenceLayout& layout, const SynLstmParams& fwd,
                             const SynLstmParams& bwd, std::vector<GateTrace>* traces) {
  if (layout.steps == 0 || layout.batch == 0) throw ContractError("run_bidirectional: empty batch");
  if (x.rows() != layout.rows() || g.rows() != layout.rows()) {
    throw DimensionError("run_bidirectional: x " + ad::shape_string(x.shape()) + " / g " +
                         ad::shape_string(g.shape()) + " do not match " +
                         std::to_string(layout.steps) + " steps x " +
                         std::to_string(layout.batch) + " sequences");
  }
  if (traces) {
    traces->assign(layout.batch, GateTrace{});
    for (GateTrace& tr : *traces) tr.hidden = fwd.hidden();
  }
  auto stepper = [&](const SynLstmParams& p, Direction dir) {
    return [&tape, &x, &g, &layout, &p, dir, traces](std::size_t t, const CellState& s) {
      const ad::Tensor xt = ad::slice_rows(tape, x, t * layout.batch, layout.batch);
      const ad::Tensor gt = ad::slice_rows(tape, g, t * layout.batch, layout.batch);
      SynLstmActivations act;
      CellState next = syn_lstm_step(tape, xt, gt, s, p, traces ? &act : nullptr);
      if (traces) {
        for (std::size_t b = 0; b < layout.batch; ++b) {
          if (!layout.active(t, b)) continue;
          (*traces)[b].steps.push_back(
              {t, dir, row_of(act.f, b), row_of(act.i, b), row_of(act.m, b), row_of(act.o, b)});
        }
      }
      return next;
    };
  };
  const ad::Tensor f = detail::run_direction(tape, layout, fwd.hidden(), false,
                                             stepper(fwd, Direction::forward), nullptr);
  const ad::Tensor b = detail::run_direction(tape, layout, bwd.hidden(), true,
                                             stepper(bwd, Direction::backward), nullptr);
  const std::array<ad::Tensor, 2> parts{f, b};
  return ad::concat(tape, parts, 1);
}

ad::Tensor run_bidirectional(ad::Tape& tape, const ad::Tensor& x, const ad::Tensor& g,
                             const SynLstmParams& fwd, const SynLstmParams& bwd, GateTrace* trace) {
  SequenceLayout layout{x.rows(), 1, {x.rows()}};
  std::vector<GateTrace> traces;
  ad::Tensor out = run_bidirectional(tape, x, g, layout, fwd, bwd, trace ? &traces : nullptr);
  if (trace) *trace = std::move(traces[0]);
  return out;
}

CellExpansion expand_cell_state(const ad::Tensor& x_seq, const ad::Tensor& g_seq,
                                const SynLstmParams& p, std::size_t t) {
  const std::size_t n = x_seq.rows();
  if (t >= n) throw ContractError("expand_cell_state: t outside sequence");
  if (g_seq.rows() != n) throw DimensionError("expand_cell_state: x and g lengths differ");
  const std::size_t H = p.hidden();

  ad::Tape tape;
  std::vector<SynLstmActivations> acts(t + 1);
  CellState state = zero_state(1, H);
  for (std::size_t j = 0; j <= t; ++j) {
    const ad::Tensor xj = ad::slice_rows(tape, x_seq, j, 1);
    const ad::Tensor gj = ad::slice_rows(tape, g_seq, j, 1);
    state = syn_lstm_step(tape, xj, gj, state, p, &acts[j]);
  }

  CellExpansion out;
  out.c.assign(H, 0.0);
  out.a.assign((t + 1) * H, 0.0);
  out.q.assign((t + 1) * H, 0.0);
  for (std::size_t j = 0; j <= t; ++j) {
    for (std::size_t d = 0; d < H; ++d) {
      double decay = 1.0;
      for (std::size_t k = j + 1; k <= t; ++k) decay *= acts[k].f[d];
      const double a = acts[j].i[d] * decay;
      const double q = acts[j].m[d] * decay;
      out.a[j * H + d] = a;
      out.q[j * H + d] = q;
      out.c[d] += a * acts[j].c_tilde[d] + q * acts[j].s_tilde[d];
    }
  }
  return out;
}

}  // namespace synlstm
