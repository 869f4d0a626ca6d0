#include "synlstm/ops.hpp"

#include <cmath>

#include "synlstm/error.hpp"
#include "synlstm/kernels.hpp"

namespace synlstm::ad {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename F, typename D>
Tensor unary(Tape& tape, const Tensor& a, F f, D local_grad) {
  Tensor out(a.shape());
  auto od = out.data_mut();
  auto ad = a.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = f(ad[i]);
  return tape.record(out, {a}, [a, out, local_grad]() mutable {
    if (!a.requires_grad()) return;
    auto ga = a.grad_mut();
    auto go = out.grad();
    auto xs = a.data();
    auto ys = out.data();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += go[i] * local_grad(xs[i], ys[i]);
  });
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) + " by " +
                         shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(Shape{m, n});
  kernels::gemm_nn(m, n, k, a.data().data(), b.data().data(), out.data_mut().data(), false);
  return tape.record(out, {a, b}, [a, b, out, m, k, n]() mutable {
    const double* dc = out.grad().data();
    if (a.requires_grad()) kernels::gemm_nt(m, k, n, dc, b.data().data(), a.grad_mut().data(), true);
    if (b.requires_grad()) kernels::gemm_tn_acc(k, n, m, a.data().data(), dc, b.grad_mut().data());
  });
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out(a.shape());
  kernels::active().add(a.data().data(), b.data().data(), out.data_mut().data(), out.size());
  return tape.record(out, {a, b}, [a, b, out]() mutable {
    const auto& kt = kernels::active();
    auto go = out.grad();
    if (a.requires_grad()) kt.axpy(1.0, go.data(), a.grad_mut().data(), go.size());
    if (b.requires_grad()) kt.axpy(1.0, go.data(), b.grad_mut().data(), go.size());
  });
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  kernels::active().mul(a.data().data(), b.data().data(), out.data_mut().data(), out.size());
  return tape.record(out, {a, b}, [a, b, out]() mutable {
    const auto& kt = kernels::active();
    auto go = out.grad();
    if (a.requires_grad()) kt.mul_acc(go.data(), b.data().data(), a.grad_mut().data(), go.size());
    if (b.requires_grad()) kt.mul_acc(go.data(), a.data().data(), b.grad_mut().data(), go.size());
  });
}

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  return unary(
      tape, a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor sigmoid(Tape& tape, const Tensor& a) {
  return unary(tape, a, sigmoid_scalar, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(Tape& tape, const Tensor& a) {
  return unary(
      tape, a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(Tape& tape, const Tensor& a) {
  return unary(
      tape, a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor elementwise(Tape& tape, Elementwise op, std::span<const Tensor> operands) {
  const bool binary = op == Elementwise::add || op == Elementwise::mul;
  const std::size_t want = binary ? 2 : 1;
  if (operands.size() != want) {
    throw ContractError("elementwise: expected " + std::to_string(want) + " operands, got " +
                        std::to_string(operands.size()));
  }
  switch (op) {
    case Elementwise::add: return add(tape, operands[0], operands[1]);
    case Elementwise::mul: return mul(tape, operands[0], operands[1]);
    case Elementwise::sigmoid: return sigmoid(tape, operands[0]);
    case Elementwise::tanh: return tanh(tape, operands[0]);
    case Elementwise::relu: return relu(tape, operands[0]);
  }
  throw ContractError("elementwise: unknown op");
}

Tensor sum(Tape& tape, const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  Tensor out = Tensor::scalar(s);
  return tape.record(out, {a}, [a, out]() mutable {
    if (!a.requires_grad()) return;
    const double g = out.grad()[0];
    for (double& v : a.grad_mut()) v += g;
  });
}

Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  const std::size_t rank = parts[0].rank();
  if (rank == 0 || rank > 2 || axis >= rank) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_string(parts[0].shape()));
  }
  for (const Tensor& p : parts) {
    if (p.rank() != rank) {
      throw DimensionError("concat: rank mismatch " + shape_string(parts[0].shape()) + " vs " +
                           shape_string(p.shape()));
    }
    if (rank == 2) {
      const std::size_t keep = axis == 0 ? 1 : 0;
      if (p.shape()[keep] != parts[0].shape()[keep]) {
        throw DimensionError("concat: incompatible shapes " + shape_string(parts[0].shape()) +
                             " and " + shape_string(p.shape()) + " along axis " +
                             std::to_string(axis));
      }
    }
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  if (rank == 1 || axis == 0) {
    std::size_t total = 0;
    for (const Tensor& p : parts) total += rank == 1 ? p.size() : p.rows();
    Shape shape = rank == 1 ? Shape{total} : Shape{total, parts[0].cols()};
    Tensor out(shape);
    auto od = out.data_mut();
    std::size_t off = 0;
    for (const Tensor& p : parts) {
      std::copy(p.data().begin(), p.data().end(), od.begin() + off);
      off += p.size();
    }
    return tape.record(out, std::move(inputs), [inputs, out]() mutable {
      auto go = out.grad();
      std::size_t off = 0;
      for (Tensor& p : inputs) {
        if (p.requires_grad()) {
          auto gp = p.grad_mut();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += go[off + i];
        }
        off += p.size();
      }
    });
  }
  const std::size_t rows = parts[0].rows();
  std::size_t total = 0;
  for (const Tensor& p : parts) total += p.cols();
  Tensor out(Shape{rows, total});
  auto od = out.data_mut();
  std::size_t coff = 0;
  for (const Tensor& p : parts) {
    const std::size_t c = p.cols();
    auto pd = p.data();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(pd.begin() + r * c, pd.begin() + (r + 1) * c, od.begin() + r * total + coff);
    }
    coff += c;
  }
  return tape.record(out, std::move(inputs), [inputs, out, rows, total]() mutable {
    auto go = out.grad();
    std::size_t coff = 0;
    for (Tensor& p : inputs) {
      const std::size_t c = p.cols();
      if (p.requires_grad()) {
        auto gp = p.grad_mut();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < c; ++j) gp[r * c + j] += go[r * total + coff + j];
        }
      }
      coff += c;
    }
  });
}

Tensor linear(Tape& tape, std::span<const LinearTerm> terms, const Tensor& bias) {
  if (terms.empty()) throw ContractError("linear: no terms");
  const std::size_t rows = terms[0].input.rows();
  const std::size_t out_dim = terms[0].weight.rows();
  for (const LinearTerm& t : terms) {
    if (t.weight.rank() != 2 || t.input.rows() != rows || t.weight.rows() != out_dim ||
        t.weight.cols() != t.input.cols()) {
      throw DimensionError("linear: input " + shape_string(t.input.shape()) +
                           " incompatible with weight " + shape_string(t.weight.shape()));
    }
  }
  if (bias.defined() && bias.size() != out_dim) {
    throw DimensionError("linear: bias " + shape_string(bias.shape()) + " for output width " +
                         std::to_string(out_dim));
  }
  Tensor out(Shape{rows, out_dim});
  double* od = out.data_mut().data();
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const LinearTerm& t = terms[k];
    kernels::gemm_nt(rows, out_dim, t.input.cols(), t.input.data().data(), t.weight.data().data(),
                     od, k > 0);
  }
  if (bias.defined()) {
    const double* bd = bias.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < out_dim; ++j) od[r * out_dim + j] += bd[j];
    }
  }
  std::vector<Tensor> inputs;
  for (const LinearTerm& t : terms) {
    inputs.push_back(t.input);
    inputs.push_back(t.weight);
  }
  if (bias.defined()) inputs.push_back(bias);
  std::vector<LinearTerm> held(terms.begin(), terms.end());
  return tape.record(out, std::move(inputs), [held, bias, out, rows, out_dim]() mutable {
    const double* go = out.grad().data();
    for (LinearTerm& t : held) {
      const std::size_t in = t.input.cols();
      if (t.input.requires_grad()) {
        kernels::gemm_nn(rows, in, out_dim, go, t.weight.data().data(),
                         t.input.grad_mut().data(), true);
      }
      if (t.weight.requires_grad()) {
        kernels::gemm_tn_acc(out_dim, in, rows, go, t.input.data().data(),
                             t.weight.grad_mut().data());
      }
    }
    if (bias.defined() && bias.requires_grad()) {
      auto gb = bias.grad_mut();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < out_dim; ++j) gb[j] += go[r * out_dim + j];
      }
    }
  });
}

Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> ids,
                   std::size_t pad_id) {
  if (table.rank() != 2) throw DimensionError("gather_rows: table must be a matrix");
  const std::size_t dim = table.cols();
  Tensor out(Shape{ids.size(), dim});
  auto od = out.data_mut();
  auto td = table.data();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table.rows()) {
      throw ContractError("gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                          std::to_string(table.rows()) + " rows");
    }
    if (ids[i] == pad_id) continue;
    std::copy(td.begin() + ids[i] * dim, td.begin() + (ids[i] + 1) * dim, od.begin() + i * dim);
  }
  std::vector<std::size_t> held(ids.begin(), ids.end());
  return tape.record(out, {table}, [table, out, held, dim, pad_id]() mutable {
    if (!table.requires_grad()) return;
    auto gt = table.grad_mut();
    auto go = out.grad();
    for (std::size_t i = 0; i < held.size(); ++i) {
      if (held[i] == pad_id) continue;
      for (std::size_t j = 0; j < dim; ++j) gt[held[i] * dim + j] += go[i * dim + j];
    }
  });
}

Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t start, std::size_t count) {
  if (x.rank() != 2 || start + count > x.rows()) {
    throw DimensionError("slice_rows: rows [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") outside " + shape_string(x.shape()));
  }
  const std::size_t c = x.cols();
  Tensor out(Shape{count, c});
  std::copy(x.data().begin() + start * c, x.data().begin() + (start + count) * c,
            out.data_mut().begin());
  return tape.record(out, {x}, [x, out, start, c]() mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_mut();
    auto go = out.grad();
    for (std::size_t i = 0; i < go.size(); ++i) gx[start * c + i] += go[i];
  });
}

Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t start, std::size_t count) {
  if (x.rank() != 2 || start + count > x.cols()) {
    throw DimensionError("slice_cols: cols [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") outside " + shape_string(x.shape()));
  }
  const std::size_t rows = x.rows(), c = x.cols();
  Tensor out(Shape{rows, count});
  auto od = out.data_mut();
  auto xd = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < count; ++j) od[r * count + j] = xd[r * c + start + j];
  }
  return tape.record(out, {x}, [x, out, start, count, rows, c]() mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_mut();
    auto go = out.grad();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < count; ++j) gx[r * c + start + j] += go[r * count + j];
    }
  });
}

Tensor select_rows(Tape& tape, const Tensor& x, std::span<const std::size_t> indices) {
  if (x.rank() != 2) throw DimensionError("select_rows: input must be a matrix");
  const std::size_t c = x.cols();
  Tensor out(Shape{indices.size(), c});
  auto od = out.data_mut();
  auto xd = x.data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= x.rows()) {
      throw DimensionError("select_rows: row " + std::to_string(indices[i]) + " outside " +
                           shape_string(x.shape()));
    }
    std::copy(xd.begin() + indices[i] * c, xd.begin() + (indices[i] + 1) * c, od.begin() + i * c);
  }
  std::vector<std::size_t> held(indices.begin(), indices.end());
  return tape.record(out, {x}, [x, out, held, c]() mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_mut();
    auto go = out.grad();
    for (std::size_t i = 0; i < held.size(); ++i) {
      for (std::size_t j = 0; j < c; ++j) gx[held[i] * c + j] += go[i * c + j];
    }
  });
}

Tensor blend_rows(Tape& tape, std::span<const unsigned char> take_fresh, const Tensor& fresh,
                  const Tensor& stale) {
  require_same_shape(fresh, stale, "blend_rows");
  if (take_fresh.size() != fresh.rows()) {
    throw DimensionError("blend_rows: mask of " + std::to_string(take_fresh.size()) +
                         " rows for " + shape_string(fresh.shape()));
  }
  const std::size_t c = fresh.cols();
  Tensor out(fresh.shape());
  auto od = out.data_mut();
  for (std::size_t r = 0; r < take_fresh.size(); ++r) {
    auto src = take_fresh[r] ? fresh.data() : stale.data();
    std::copy(src.begin() + r * c, src.begin() + (r + 1) * c, od.begin() + r * c);
  }
  std::vector<unsigned char> mask(take_fresh.begin(), take_fresh.end());
  return tape.record(out, {fresh, stale}, [fresh, stale, out, mask, c]() mutable {
    auto go = out.grad();
    for (std::size_t r = 0; r < mask.size(); ++r) {
      const Tensor& dst = mask[r] ? fresh : stale;
      if (!dst.requires_grad()) continue;
      auto gd = dst.grad_mut();
      for (std::size_t j = 0; j < c; ++j) gd[r * c + j] += go[r * c + j];
    }
  });
}

Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  if (rate >= 1.0) throw ContractError("dropout: rate must be < 1");
  std::bernoulli_distribution keep(1.0 - rate);
  const double inv = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = keep(rng) ? inv : 0.0;
  Tensor out(x.shape());
  auto od = out.data_mut();
  auto xd = x.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = xd[i] * mask[i];
  return tape.record(out, {x}, [x, out, mask]() mutable {
    if (!x.requires_grad()) return;
    auto gx = x.grad_mut();
    auto go = out.grad();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go[i] * mask[i];
  });
}

Tensor aggregate_rows(Tape& tape, const Tensor& x, const SparseRows& weights) {
  if (x.rank() != 2) throw DimensionError("aggregate_rows: input must be a matrix");
  const std::size_t c = x.cols();
  const std::size_t rows = weights.rows.size();
  for (const auto& row : weights.rows) {
    for (const auto& [col, w] : row) {
      if (col >= x.rows()) {
        throw DimensionError("aggregate_rows: neighbour " + std::to_string(col) + " outside " +
                             shape_string(x.shape()));
      }
    }
  }
  Tensor out(Shape{rows, c});
  const auto& kt = kernels::active();
  double* od = out.data_mut().data();
  const double* xd = x.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& [col, w] : weights.rows[r]) kt.axpy(w, xd + col * c, od + r * c, c);
  }
  return tape.record(out, {x}, [x, out, weights, c]() mutable {
    if (!x.requires_grad()) return;
    const auto& kt = kernels::active();
    double* gx = x.grad_mut().data();
    const double* go = out.grad().data();
    for (std::size_t r = 0; r < weights.rows.size(); ++r) {
      for (const auto& [col, w] : weights.rows[r]) kt.axpy(w, go + r * c, gx + col * c, c);
    }
  });
}

}  // namespace synlstm::ad

namespace synlstm::ad {

Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias) {
  if (bias.size() != x.cols()) {
    throw DimensionError("add_bias: bias " + shape_string(bias.shape()) + " for " +
                         shape_string(x.shape()));
  }
  const std::size_t rows = x.rows(), c = x.cols();
  Tensor out(x.shape());
  auto od = out.data_mut();
  auto xd = x.data();
  auto bd = bias.data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < c; ++j) od[r * c + j] = xd[r * c + j] + bd[j];
  }
  return tape.record(out, {x, bias}, [x, bias, out, rows, c]() mutable {
    auto go = out.grad();
    if (x.requires_grad()) {
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go[i];
    }
    if (bias.requires_grad()) {
      auto gb = bias.grad_mut();
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < c; ++j) gb[j] += go[r * c + j];
      }
    }
  });
}

}  // namespace synlstm::ad
