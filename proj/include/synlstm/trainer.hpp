#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "synlstm/checkpoint.hpp"
#include "synlstm/config.hpp"
#include "synlstm/corpus.hpp"
#include "synlstm/metrics.hpp"
#include "synlstm/model.hpp"

namespace synlstm {

// lr / (1 + decay * (epoch - 1)); epochs count from 1.
double epoch_lr(std::size_t epoch, double lr, double decay);

// p <- p - rate * (grad + l2 * p) for every trainable tensor, then clears the
// gradients. A trainable tensor without a gradient is a contract error.
void sgd_step(ParamStore& params, double rate, double l2);

double grad_norm(const ParamStore& params);
// Rescales all gradients so their global L2 norm is at most max_norm. Returns
// the norm before clipping.
double clip_gradients(ParamStore& params, double max_norm);

// Scheme of a corpus under the configured setting (auto = detect).
Scheme corpus_scheme(const Corpus& corpus, LabelSchemeSetting setting);
Corpus to_bioes(const Corpus& corpus, LabelSchemeSetting setting);

struct EpochLog {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss = 0.0;  // mean sentence NLL over the epoch
  double dev_f1 = 0.0;
};

struct TrainOptions {
  std::function<void(const EpochLog&)> on_epoch;
};

struct TrainResult {
  Checkpoint best;                  // argmax-dev epoch (earliest on ties)
  std::vector<double> batch_losses;  // every batch of every epoch, in order
};

// Trains on `train_corpus` (trees used as given) and selects on `dev_corpus`.
TrainResult train(const ModelConfig& config, const Corpus& train_corpus, const Corpus& dev_corpus,
                  const TrainOptions& options = {});

// Viterbi labels (BIOES strings) for every sentence.
LabelRows predict_labels(const Model& model, const Corpus& corpus, std::size_t batch_size = 0);
// Copy of `corpus` with predicted labels in the given scheme.
Corpus predict_corpus(const Model& model, const Corpus& corpus, Scheme scheme);
EvalReport evaluate(const Model& model, const Corpus& gold);
// Gate traces of every sentence (evaluation mode); empty for variants
// without a Syn-LSTM.
std::vector<GateTrace> collect_traces(const Model& model, const Corpus& corpus);

}  // namespace synlstm
