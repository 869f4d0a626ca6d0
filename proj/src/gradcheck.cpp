#include "synlstm/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "synlstm/batch.hpp"
#include "synlstm/model.hpp"
#include "synlstm/trees.hpp"
#include "synlstm/vocab.hpp"

namespace synlstm {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

Corpus random_corpus(std::size_t sentences, std::size_t tokens, std::uint64_t seed) {
  static const std::vector<std::string> words = {"alpha", "Beta", "gamma", "delta", "Eps", "zeta"};
  static const std::vector<std::string> tags = {"NN", "VB", "JJ"};
  static const std::vector<std::string> rels = {"nsubj", "obj", "amod", "root"};
  static const std::vector<std::string> types = {"PER", "LOC"};
  std::mt19937_64 rng(seed);
  auto pick = [&rng](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  Corpus corpus;
  for (std::size_t k = 0; k < sentences; ++k) {
    Sentence s;
    s.heads = random_tree_heads(tokens, rng);
    // Random spans: walk left to right, opening entities of random length.
    std::vector<EntitySpan> spans;
    for (std::size_t t = 0; t < tokens;) {
      if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
        ++t;
        continue;
      }
      const std::size_t len = std::uniform_int_distribution<std::size_t>(1, tokens - t)(rng);
      spans.push_back({t, t + len - 1, pick(types)});
      t += len;
    }
    s.labels = encode_spans(spans, tokens, Scheme::bioes);
    for (std::size_t t = 0; t < tokens; ++t) {
      s.tokens.push_back(pick(words));
      s.pos_tags.push_back(pick(tags));
      s.deprels.push_back(pick(rels));
    }
    corpus.push_back(std::move(s));
  }
  return corpus;
}

ModelConfig gradcheck_config(const ModelConfig& base, Variant variant) {
  ModelConfig c = base;
  c.variant = variant;
  c.hidden = 8;
  c.gcn_hidden = 8;
  c.word_dim = 6;
  c.char_dim = 4;
  c.char_hidden = 3;
  c.deprel_dim = 3;
  c.pos_dim = 3;
  c.dropout = 0.0;
  c.embeddings.clear();
  return c;
}

GradCheckResult gradcheck_variant(const ModelConfig& base, Variant variant,
                                  const GradCheckOptions& options) {
  const ModelConfig cfg = gradcheck_config(base, variant);
  const Corpus corpus = random_corpus(options.sentences, options.tokens, options.seed);
  Vocabulary vocab = build_vocab(corpus);
  // Make sure every label of the closed set exists even if unsampled.
  vocab.labels = Index(bioes_label_set({"LOC", "PER"}));
  std::mt19937_64 rng(cfg.seed);
  Model model(cfg, vocab, rng);
  // Non-zero biases and transitions so that every gradient path is exercised.
  std::normal_distribution<double> noise(0.0, 0.1);
  for (auto& [name, t] : model.params().entries()) {
    const std::string leaf = name.substr(name.rfind('.') + 1);
    if (name == "crf.transitions" || leaf == "b" || leaf.rfind("b_", 0) == 0) {
      for (double& v : t.data_mut()) v += noise(rng);
    }
  }

  std::vector<const Sentence*> ptrs;
  for (const auto& s : corpus) ptrs.push_back(&s);
  const Batch batch = make_batch(ptrs, vocab, cfg.gcn_aggregation);

  auto loss_value = [&]() {
    ad::Tape tape;
    return model.loss(tape, batch, model.forward(tape, batch)).item();
  };

  model.params().clear_grads();
  {
    ad::Tape tape;
    const ad::Tensor loss = model.loss(tape, batch, model.forward(tape, batch));
    tape.backward(loss);
  }

  GradCheckResult result;
  result.variant = variant;
  for (auto& [name, t] : model.params().entries()) {
    if (!t.requires_grad()) continue;
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    auto w = t.data_mut();
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double saved = w[k];
      w[k] = saved + options.step;
      const double up = loss_value();
      w[k] = saved - options.step;
      const double down = loss_value();
      w[k] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = relative_error(analytic[k], numeric);
      ++result.checked;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = k;
      }
    }
  }
  model.params().clear_grads();
  return result;
}

std::vector<GradCheckResult> gradcheck_all(const ModelConfig& base, const GradCheckOptions& options) {
  std::vector<GradCheckResult> out;
  for (Variant v : {Variant::syn_lstm_crf, Variant::bilstm_crf, Variant::gcn_concat_bilstm_crf}) {
    out.push_back(gradcheck_variant(base, v, options));
  }
  return out;
}

}  // namespace synlstm
