#pragma once

// Differentiable primitives. Every function computes its result eagerly and
// records a backward closure on the tape when any input requires a gradient.

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "synlstm/tape.hpp"
#include "synlstm/tensor.hpp"

namespace synlstm::ad {

using Rng = std::mt19937_64;

// a[m x k] * b[k x n]
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
Tensor sigmoid(Tape& tape, const Tensor& a);
Tensor tanh(Tape& tape, const Tensor& a);
// relu'(0) = 0
Tensor relu(Tape& tape, const Tensor& a);

enum class Elementwise { add, mul, sigmoid, tanh, relu };
Tensor elementwise(Tape& tape, Elementwise op, std::span<const Tensor> operands);

// Sum of all entries, as a scalar.
Tensor sum(Tape& tape, const Tensor& a);

// Concatenation along axis 0 (rows) or axis 1 (columns). Rank-1 inputs only
// support axis 0. Zero inputs are rejected.
Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis);

struct LinearTerm {
  Tensor input;   // [rows x in]
  Tensor weight;  // [out x in]
};
// sum_k input_k * weight_k^T + bias, result [rows x out]. `bias` may be undefined.
Tensor linear(Tape& tape, std::span<const LinearTerm> terms, const Tensor& bias);

// Row lookup into table[V x D]. Rows whose id equals pad_id are zero and do
// not receive gradient.
Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const std::size_t> ids,
                   std::size_t pad_id);

Tensor slice_rows(Tape& tape, const Tensor& x, std::size_t start, std::size_t count);
Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t start, std::size_t count);
Tensor select_rows(Tape& tape, const Tensor& x, std::span<const std::size_t> indices);

// Row r of the result is fresh[r] when take_fresh[r] != 0, else stale[r].
Tensor blend_rows(Tape& tape, std::span<const unsigned char> take_fresh, const Tensor& fresh,
                  const Tensor& stale);

// Inverted dropout with drop probability `rate`; identity when rate == 0.
Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng);

// Sparse row-normalized aggregation: out[r] = sum_{(c, w) in rows[r]} w * x[c].
struct SparseRows {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
};
Tensor aggregate_rows(Tape& tape, const Tensor& x, const SparseRows& weights);

}  // namespace synlstm::ad

namespace synlstm::ad {
// x[R x C] + bias[C] broadcast over rows.
Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias);
}  // namespace synlstm::ad
