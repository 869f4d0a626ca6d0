#include "synlstm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "synlstm/error.hpp"

namespace synlstm {

double epoch_lr(std::size_t epoch, double lr, double decay) {
  if (epoch < 1) throw ContractError("epoch_lr: epochs count from 1");
  return lr / (1.0 + decay * static_cast<double>(epoch - 1));
}

void sgd_step(ParamStore& params, double rate, double l2) {
  for (auto& [name, p] : params.entries()) {
    if (!p.requires_grad()) continue;
    if (!p.has_grad()) throw ContractError("sgd_step: no gradient for '" + name + "'");
  }
  for (auto& [name, p] : params.entries()) {
    if (!p.requires_grad()) continue;
    auto w = p.data_mut();
    auto g = p.grad();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * (g[i] + l2 * w[i]);
    p.clear_grad();
  }
}

double grad_norm(const ParamStore& params) {
  double sq = 0.0;
  for (const auto& [name, p] : params.entries()) {
    if (!p.requires_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_gradients(ParamStore& params, double max_norm) {
  const double norm = grad_norm(params);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& [name, p] : params.entries()) {
      if (!p.requires_grad() || !p.has_grad()) continue;
      for (double& g : p.grad_mut()) g *= factor;
    }
  }
  return norm;
}

Scheme corpus_scheme(const Corpus& corpus, LabelSchemeSetting setting) {
  switch (setting) {
    case LabelSchemeSetting::bio: return Scheme::bio;
    case LabelSchemeSetting::bioes: return Scheme::bioes;
    case LabelSchemeSetting::automatic: break;
  }
  return detect_scheme(corpus);
}

Corpus to_bioes(const Corpus& corpus, LabelSchemeSetting setting) {
  const Scheme from = corpus_scheme(corpus, setting);
  if (from == Scheme::bioes) return corpus;
  return convert_corpus_scheme(corpus, from, Scheme::bioes);
}

namespace {

std::vector<const Sentence*> pointers(const Corpus& corpus, std::size_t from, std::size_t to) {
  std::vector<const Sentence*> out;
  for (std::size_t i = from; i < to; ++i) out.push_back(&corpus[i]);
  return out;
}

std::size_t eval_batch_size(const Model& model, std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, model.config().batch_size);
}

}  // namespace

LabelRows predict_labels(const Model& model, const Corpus& corpus, std::size_t batch_size) {
  const std::size_t bs = eval_batch_size(model, batch_size);
  LabelRows out;
  out.reserve(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); k += bs) {
    const Batch batch = make_batch(pointers(corpus, k, std::min(corpus.size(), k + bs)),
                                   model.vocab(), model.config().gcn_aggregation);
    for (const auto& path : model.decode(batch)) out.push_back(model.label_strings(path));
  }
  return out;
}

Corpus predict_corpus(const Model& model, const Corpus& corpus, Scheme scheme) {
  const LabelRows labels = predict_labels(model, corpus);
  Corpus out = corpus;
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Malformed fragments (possible without constrained decoding) are dropped,
    // matching how evaluation reads them.
    out[i].labels = encode_spans(decode_spans(labels[i], Scheme::bioes), labels[i].size(), scheme);
  }
  return out;
}

EvalReport evaluate(const Model& model, const Corpus& gold) {
  const Corpus g = to_bioes(gold, model.config().label_scheme);
  return entity_f1(label_rows(g), predict_labels(model, g), Scheme::bioes);
}

std::vector<GateTrace> collect_traces(const Model& model, const Corpus& corpus) {
  std::vector<GateTrace> traces;
  if (model.config().variant != Variant::syn_lstm_crf) return traces;
  const std::size_t bs = eval_batch_size(model, 0);
  for (std::size_t k = 0; k < corpus.size(); k += bs) {
    const Batch batch = make_batch(pointers(corpus, k, std::min(corpus.size(), k + bs)),
                                   model.vocab(), model.config().gcn_aggregation);
    ad::Tape tape;
    std::vector<GateTrace> part;
    model.forward(tape, batch, nullptr, &part);
    for (auto& t : part) traces.push_back(std::move(t));
  }
  return traces;
}

TrainResult train(const ModelConfig& config, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const TrainOptions& options) {
  if (train_corpus.empty()) throw ContractError("train: empty training corpus");
  if (config.batch_size == 0) throw ContractError("train: batch_size must be positive");
  const Corpus train_set = to_bioes(train_corpus, config.label_scheme);
  const Corpus dev_set = to_bioes(dev_corpus, config.label_scheme);
  for (std::size_t i = 0; i < train_set.size(); ++i) validate_sentence(train_set[i], i);

  const Vocabulary vocab = build_vocab(train_set, config.min_count);
  std::mt19937_64 init_rng(config.seed);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5eed5eed5eed5eedULL);
  std::mt19937_64 dropout_rng(config.seed ^ 0xd50d50d50d50d50dULL);

  EmbeddingMatrix pretrained;
  if (!config.embeddings.empty()) {
    std::mt19937_64 emb_rng(config.seed ^ 0xe3be3be3be3be3bULL);
    pretrained = load_embeddings(std::filesystem::path(config.embeddings), vocab.words, emb_rng);
    if (pretrained.dim != config.word_dim) {
      throw DimensionError("embeddings have dimension " + std::to_string(pretrained.dim) +
                           ", config word_dim is " + std::to_string(config.word_dim));
    }
  }
  Model model(config, vocab, init_rng, config.embeddings.empty() ? nullptr : &pretrained);

  auto dev_f1 = [&]() { return dev_set.empty() ? 0.0 : evaluate(model, dev_set).f1(); };

  TrainResult result;
  TrainingSummary summary;
  summary.best_dev_f1 = dev_f1();
  summary.best_epoch = 0;
  summary.dev_f1_curve.push_back(summary.best_dev_f1);
  result.best = snapshot(model, summary);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double rate = epoch_lr(epoch, config.lr, config.decay);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (const auto& group : partition(train_set, order, config.batch_size)) {
      const Batch batch = make_batch(group, vocab, config.gcn_aggregation);
      ad::Tape tape;
      const Model::Output out = model.forward(tape, batch, &dropout_rng);
      const ad::Tensor loss = model.loss(tape, batch, out);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite loss " << value << " at epoch " << epoch << ", batch " << batch_index;
        throw NumericalError(msg.str());
      }
      tape.backward(loss);
      clip_gradients(model.params(), config.clip_norm);
      sgd_step(model.params(), rate, config.l2);
      result.batch_losses.push_back(value);
      loss_sum += value * static_cast<double>(batch.size());
      ++batch_index;
    }
    const double epoch_loss = loss_sum / static_cast<double>(train_set.size());
    const double f1 = dev_f1();
    summary.loss_curve.push_back(epoch_loss);
    summary.dev_f1_curve.push_back(f1);
    if (f1 > summary.best_dev_f1) {
      summary.best_dev_f1 = f1;
      summary.best_epoch = epoch;
      result.best = snapshot(model, summary);
    }
    if (options.on_epoch) options.on_epoch({epoch, rate, epoch_loss, f1});
  }
  result.best.summary.loss_curve = summary.loss_curve;
  result.best.summary.dev_f1_curve = summary.dev_f1_curve;
  return result;
}

}  // namespace synlstm
