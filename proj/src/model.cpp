#include "synlstm/model.hpp"

#include <array>

#include "synlstm/error.hpp"

namespace synlstm {

namespace {

ad::Tensor uniform_table(ParamStore& store, const std::string& name, std::size_t rows,
                         std::size_t dim, std::mt19937_64& rng) {
  ad::Tensor& t = store.add(name, {rows, dim});
  const double scale = embedding_init_scale(dim);
  std::uniform_real_distribution<double> dist(-scale, scale);
  auto d = t.data_mut();
  for (std::size_t i = dim; i < d.size(); ++i) d[i] = dist(rng);  // row 0 is PAD
  return t;
}

ad::Tensor maybe_dropout(ad::Tape& tape, const ad::Tensor& x, double rate,
                         std::mt19937_64* rng) {
  if (!rng || rate <= 0.0) return x;
  return ad::dropout(tape, x, rate, *rng);
}

}  // namespace

Model::Model(ModelConfig config, Vocabulary vocab, std::mt19937_64& rng,
             const EmbeddingMatrix* pretrained)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  const ModelConfig& c = config_;
  if (vocab_.labels.size() == 0) throw ContractError("model: empty label set");
  if (c.hidden == 0 || c.word_dim == 0) throw ContractError("model: zero-sized layer");

  embed_.words = uniform_table(params_, "embed.words", vocab_.words.size(), c.word_dim, rng);
  if (pretrained) {
    if (pretrained->rows != vocab_.words.size() || pretrained->dim != c.word_dim) {
      throw DimensionError("model: pretrained embeddings are " + std::to_string(pretrained->rows) +
                           " x " + std::to_string(pretrained->dim) + ", expected " +
                           std::to_string(vocab_.words.size()) + " x " +
                           std::to_string(c.word_dim));
    }
    auto d = embed_.words.data_mut();
    std::copy(pretrained->values.begin(), pretrained->values.end(), d.begin());
  }
  embed_.words.set_requires_grad(c.fine_tune_words);
  embed_.chars = make_char_encoder(params_, "embed.chars", vocab_.chars.size(), c.char_dim,
                                   c.char_hidden, rng);
  if (c.use_deprel) {
    embed_.deprels = uniform_table(params_, "embed.deprels", vocab_.deprels.size(), c.deprel_dim, rng);
  }
  if (c.use_pos) {
    embed_.pos = uniform_table(params_, "embed.pos", vocab_.pos.size(), c.pos_dim, rng);
  }

  if (c.variant != Variant::bilstm_crf && c.graph_input == GraphInput::gcn) {
    gcn_ = make_gcn_params(params_, "gcn", g0_dim(), c.gcn_hidden, c.gcn_layers, rng);
  }

  if (c.variant == Variant::syn_lstm_crf) {
    syn_fwd_ = make_syn_lstm_params(params_, "syn.fwd", x_dim(), graph_dim(), c.hidden, rng);
    syn_bwd_ = make_syn_lstm_params(params_, "syn.bwd", x_dim(), graph_dim(), c.hidden, rng);
  } else {
    const std::size_t in =
        x_dim() + (c.variant == Variant::gcn_concat_bilstm_crf ? graph_dim() : 0);
    lstm_fwd_ = make_lstm_params(params_, "lstm.fwd", in, c.hidden, rng);
    lstm_bwd_ = make_lstm_params(params_, "lstm.bwd", in, c.hidden, rng);
  }

  const std::size_t L = vocab_.labels.size();
  W_e_ = params_.add_glorot("emit.W", L, 2 * c.hidden, rng);
  b_e_ = params_.add("emit.b", {L});
  T_ = params_.add("crf.transitions", {L + 2, L + 2});
  if (c.crf_constraints) mask_ = crf::bioes_transition_mask(vocab_.labels.items());
}

std::size_t Model::x_dim() const {
  return config_.word_dim + 2 * config_.char_hidden + (config_.use_deprel ? config_.deprel_dim : 0) +
         (config_.use_pos ? config_.pos_dim : 0);
}

std::size_t Model::g0_dim() const {
  return config_.word_dim + 2 * config_.char_hidden + (config_.use_deprel ? config_.deprel_dim : 0);
}

std::size_t Model::graph_dim() const { return config_.gcn_hidden; }

Model::Output Model::forward(ad::Tape& tape, const Batch& batch, std::mt19937_64* dropout_rng,
                             std::vector<GateTrace>* traces) const {
  const ModelConfig& c = config_;
  const TokenPieces pieces = embed_tokens(tape, embed_, batch.ids);
  const ad::Tensor x = maybe_dropout(tape, assemble_x(tape, pieces), c.dropout, dropout_rng);

  Output out;
  if (c.variant != Variant::bilstm_crf) {
    if (c.graph_input == GraphInput::gcn) {
      const ad::Tensor g0 = maybe_dropout(tape, assemble_g0(tape, pieces), c.dropout, dropout_rng);
      out.graph = gcn_encode(tape, g0, batch.gcn, gcn_);
    } else {
      out.graph = ad::Tensor({batch.layout.rows(), graph_dim()});
    }
  }

  ad::Tensor h;
  if (c.variant == Variant::syn_lstm_crf) {
    h = run_bidirectional(tape, x, out.graph, batch.layout, syn_fwd_, syn_bwd_, traces);
  } else {
    ad::Tensor in = x;
    if (c.variant == Variant::gcn_concat_bilstm_crf) {
      const std::array<ad::Tensor, 2> parts{x, out.graph};
      in = ad::concat(tape, parts, 1);
    }
    h = run_plain_bilstm(tape, in, batch.layout, lstm_fwd_, lstm_bwd_).per_step;
  }
  h = maybe_dropout(tape, h, c.dropout, dropout_rng);
  const std::array<ad::LinearTerm, 1> terms{ad::LinearTerm{h, W_e_}};
  out.emissions = ad::linear(tape, terms, b_e_);
  return out;
}

ad::Tensor Model::loss(ad::Tape& tape, const Batch& batch, const Output& out) const {
  ad::Tensor total;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch.gold[b].empty()) {
      throw ContractError("loss: sentence " + std::to_string(b) +
                          " has a label outside the model's label set");
    }
    const auto rows = batch.rows_of(b);
    const ad::Tensor em = ad::select_rows(tape, out.emissions, rows);
    const ad::Tensor nll = crf::nll_loss(tape, em, T_, batch.gold[b], mask_);
    total = total.defined() ? ad::add(tape, total, nll) : nll;
  }
  return ad::scale(tape, total, 1.0 / static_cast<double>(batch.size()));
}

crf::TagLattice Model::lattice(const Batch& batch, const Output& out, std::size_t b) const {
  const std::size_t L = num_labels();
  crf::TagLattice lat;
  lat.n = batch.layout.lengths.at(b);
  lat.labels = L;
  lat.emissions.resize(lat.n * L);
  const auto em = out.emissions.data();
  for (std::size_t t = 0; t < lat.n; ++t) {
    const std::size_t r = batch.layout.row(t, b);
    std::copy(em.begin() + r * L, em.begin() + (r + 1) * L, lat.emissions.begin() + t * L);
  }
  return lat;
}

crf::Transitions Model::transitions() const {
  return crf::make_transitions(num_labels(), T_.data(), mask_);
}

std::vector<std::vector<std::size_t>> Model::decode(const Batch& batch) const {
  ad::Tape tape;
  const Output out = forward(tape, batch);
  const crf::Transitions T = transitions();
  std::vector<std::vector<std::size_t>> paths;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    paths.push_back(crf::viterbi(lattice(batch, out, b), T).path);
  }
  return paths;
}

std::vector<std::string> Model::label_strings(const std::vector<std::size_t>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back(vocab_.labels.at(id));
  return out;
}

}  // namespace synlstm
