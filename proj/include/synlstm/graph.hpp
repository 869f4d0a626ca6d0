#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "synlstm/ops.hpp"
#include "synlstm/params.hpp"

namespace synlstm {

// Undirected dependency graph with self-loops; degrees include the self-loop.
struct AdjacencyMatrix {
  std::size_t n = 0;
  std::vector<unsigned char> a;  // n x n, entries 0/1
  std::vector<std::size_t> degrees;

  unsigned char at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// heads are 1-based with 0 for the root (assumed valid).
AdjacencyMatrix build_adjacency(std::span<const int> heads);

// How the feature term inside the degree-normalised sum is indexed.
//   neighbors: g_t = ReLU(sum_j A[t][j] W g_j / d_t + b)
//   self_only: g_t = ReLU(sum_j A[t][j] W g_t / d_t + b)  (reduces to ReLU(W g_t + b))
enum class GcnAggregation { neighbors, self_only };

// Row weights for aggregate_rows. `row_of(t)` maps token t of this sentence to
// its row in the batch matrix.
void append_gcn_weights(const AdjacencyMatrix& adj, GcnAggregation mode,
                        const std::vector<std::size_t>& row_of, ad::SparseRows& out);
ad::SparseRows gcn_weights(const AdjacencyMatrix& adj, GcnAggregation mode);

struct GcnLayerParams {
  ad::Tensor W;  // [out x in]
  ad::Tensor b;  // [out]
};

struct GcnParams {
  std::vector<GcnLayerParams> layers;
  std::size_t output_dim() const { return layers.back().W.rows(); }
};

GcnParams make_gcn_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                          std::size_t hidden, std::size_t layers, std::mt19937_64& rng);

ad::Tensor gcn_layer(ad::Tape& tape, const ad::Tensor& g_prev, const ad::SparseRows& weights,
                     const GcnLayerParams& layer);

// Applies every layer in order.
ad::Tensor gcn_encode(ad::Tape& tape, const ad::Tensor& g0, const ad::SparseRows& weights,
                      const GcnParams& params);

}  // namespace synlstm
