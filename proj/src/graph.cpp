#include "synlstm/graph.hpp"

#include <array>
#include <numeric>

#include "synlstm/error.hpp"

namespace synlstm {

AdjacencyMatrix build_adjacency(std::span<const int> heads) {
  AdjacencyMatrix adj;
  adj.n = heads.size();
  adj.a.assign(adj.n * adj.n, 0);
  for (std::size_t i = 0; i < adj.n; ++i) {
    adj.a[i * adj.n + i] = 1;
    const int h = heads[i];
    if (h <= 0) continue;
    const auto j = static_cast<std::size_t>(h - 1);
    adj.a[i * adj.n + j] = 1;
    adj.a[j * adj.n + i] = 1;
  }
  adj.degrees.assign(adj.n, 0);
  for (std::size_t i = 0; i < adj.n; ++i) {
    for (std::size_t j = 0; j < adj.n; ++j) adj.degrees[i] += adj.a[i * adj.n + j];
  }
  return adj;
}

void append_gcn_weights(const AdjacencyMatrix& adj, GcnAggregation mode,
                        const std::vector<std::size_t>& row_of, ad::SparseRows& out) {
  if (row_of.size() != adj.n) throw ContractError("append_gcn_weights: row map size mismatch");
  std::size_t max_row = 0;
  for (std::size_t r : row_of) max_row = std::max(max_row, r);
  if (out.rows.size() <= max_row) out.rows.resize(max_row + 1);
  for (std::size_t t = 0; t < adj.n; ++t) {
    auto& row = out.rows[row_of[t]];
    row.clear();
    const double d = static_cast<double>(adj.degrees[t]);
    if (mode == GcnAggregation::self_only) {
      double total = 0.0;
      for (std::size_t j = 0; j < adj.n; ++j) total += adj.at(t, j) / d;
      row.emplace_back(row_of[t], total);
      continue;
    }
    for (std::size_t j = 0; j < adj.n; ++j) {
      if (adj.at(t, j)) row.emplace_back(row_of[j], 1.0 / d);
    }
  }
}

ad::SparseRows gcn_weights(const AdjacencyMatrix& adj, GcnAggregation mode) {
  std::vector<std::size_t> rows(adj.n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  ad::SparseRows out;
  out.rows.resize(adj.n);
  append_gcn_weights(adj, mode, rows, out);
  return out;
}

GcnParams make_gcn_params(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                          std::size_t hidden, std::size_t layers, std::mt19937_64& rng) {
  if (layers == 0) throw ContractError("GCN needs at least one layer");
  GcnParams p;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string name = prefix + "." + std::to_string(l);
    GcnLayerParams layer;
    layer.W = store.add_glorot(name + ".W", hidden, l == 0 ? input_dim : hidden, rng);
    layer.b = store.add(name + ".b", {hidden});
    p.layers.push_back(layer);
  }
  return p;
}

ad::Tensor gcn_layer(ad::Tape& tape, const ad::Tensor& g_prev, const ad::SparseRows& weights,
                     const GcnLayerParams& layer) {
  if (g_prev.cols() != layer.W.cols()) {
    throw DimensionError("gcn_layer: input " + ad::shape_string(g_prev.shape()) +
                         " does not match weight " + ad::shape_string(layer.W.shape()));
  }
  const std::array<ad::LinearTerm, 1> term{ad::LinearTerm{g_prev, layer.W}};
  const ad::Tensor projected = ad::linear(tape, term, ad::Tensor());
  const ad::Tensor mixed = ad::aggregate_rows(tape, projected, weights);
  return ad::relu(tape, ad::add_bias(tape, mixed, layer.b));
}

ad::Tensor gcn_encode(ad::Tape& tape, const ad::Tensor& g0, const ad::SparseRows& weights,
                      const GcnParams& params) {
  ad::Tensor g = g0;
  for (const GcnLayerParams& layer : params.layers) g = gcn_layer(tape, g, weights, layer);
  return g;
}

}  // namespace synlstm
