#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "synlstm/batch.hpp"
#include "synlstm/config.hpp"
#include "synlstm/crf.hpp"
#include "synlstm/embed.hpp"
#include "synlstm/graph.hpp"
#include "synlstm/lstm.hpp"
#include "synlstm/params.hpp"
#include "synlstm/syn_lstm.hpp"
#include "synlstm/vocab.hpp"

namespace synlstm {

// Full tagger: embeddings, optional GCN, recurrent encoder, emission layer
// and CRF transitions. Owns its parameters; not copyable.
class Model {
 public:
  // Initialises every parameter from `rng`. When `pretrained` is given its
  // rows replace the word table.
  Model(ModelConfig config, Vocabulary vocab, std::mt19937_64& rng,
        const EmbeddingMatrix* pretrained = nullptr);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  std::size_t num_labels() const { return vocab_.labels.size(); }

  struct Output {
    ad::Tensor emissions;  // [rows x L], time-major like the batch
    ad::Tensor graph;      // g^L, undefined for the plain BiLSTM variant
  };

  // `dropout_rng` enables dropout (training mode); pass nullptr to evaluate.
  Output forward(ad::Tape& tape, const Batch& batch, std::mt19937_64* dropout_rng = nullptr,
                 std::vector<GateTrace>* traces = nullptr) const;

  // Mean negative log-likelihood of the gold paths over the batch.
  ad::Tensor loss(ad::Tape& tape, const Batch& batch, const Output& out) const;

  // Emission lattice of sentence b.
  crf::TagLattice lattice(const Batch& batch, const Output& out, std::size_t b) const;
  // Transitions with structural -inf entries (and the BIOES mask if enabled).
  crf::Transitions transitions() const;
  const std::vector<unsigned char>& transition_mask() const { return mask_; }

  // Viterbi label ids per sentence.
  std::vector<std::vector<std::size_t>> decode(const Batch& batch) const;
  std::vector<std::string> label_strings(const std::vector<std::size_t>& ids) const;

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  ParamStore params_;
  EmbeddingTables embed_;
  GcnParams gcn_;
  SynLstmParams syn_fwd_, syn_bwd_;
  LstmParams lstm_fwd_, lstm_bwd_;
  ad::Tensor W_e_, b_e_, T_;
  std::vector<unsigned char> mask_;

  std::size_t x_dim() const;
  std::size_t g0_dim() const;
  std::size_t graph_dim() const;
};

}  // namespace synlstm
