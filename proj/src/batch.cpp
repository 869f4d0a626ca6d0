#include "synlstm/batch.hpp"

#include <algorithm>

#include "synlstm/error.hpp"

namespace synlstm {

std::vector<std::size_t> Batch::rows_of(std::size_t b) const {
  std::vector<std::size_t> rows(layout.lengths.at(b));
  for (std::size_t t = 0; t < rows.size(); ++t) rows[t] = layout.row(t, b);
  return rows;
}

Batch make_batch(const std::vector<const Sentence*>& sentences, const Vocabulary& vocab,
                 GcnAggregation aggregation) {
  if (sentences.empty()) throw ContractError("make_batch: no sentences");
  Batch batch;
  batch.sentences = sentences;
  batch.layout.batch = sentences.size();
  for (const Sentence* s : sentences) {
    if (s->size() == 0) throw ContractError("make_batch: empty sentence");
    batch.layout.lengths.push_back(s->size());
    batch.layout.steps = std::max(batch.layout.steps, s->size());
  }
  batch.ids = token_ids(sentences, vocab, batch.layout);
  batch.gcn.rows.resize(batch.layout.rows());
  for (std::size_t b = 0; b < sentences.size(); ++b) {
    const Sentence& s = *sentences[b];
    append_gcn_weights(build_adjacency(s.heads), aggregation, batch.rows_of(b), batch.gcn);
    std::vector<std::size_t> gold;
    for (const auto& label : s.labels) {
      const auto id = vocab.label_id(label);
      if (!id) {
        gold.clear();
        break;
      }
      gold.push_back(*id);
    }
    batch.gold.push_back(std::move(gold));
  }
  return batch;
}

std::vector<std::vector<const Sentence*>> partition(const Corpus& corpus,
                                                    const std::vector<std::size_t>& order,
                                                    std::size_t batch_size) {
  if (batch_size == 0) throw ContractError("partition: batch_size must be positive");
  std::vector<std::vector<const Sentence*>> groups;
  for (std::size_t k = 0; k < order.size(); k += batch_size) {
    std::vector<const Sentence*> group;
    for (std::size_t j = k; j < std::min(order.size(), k + batch_size); ++j) {
      group.push_back(&corpus.at(order[j]));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace synlstm
