#pragma once

#include <cstddef>
#include <vector>

#include "synlstm/corpus.hpp"
#include "synlstm/embed.hpp"
#include "synlstm/graph.hpp"
#include "synlstm/vocab.hpp"

namespace synlstm {

// A padded, time-major group of sentences ready for the model.
struct Batch {
  std::vector<const Sentence*> sentences;
  SequenceLayout layout;
  TokenIds ids;
  ad::SparseRows gcn;  // row-normalised dependency weights over the batch rows
  // Gold label ids per sentence; empty when the sentence carries a label
  // outside the vocabulary.
  std::vector<std::vector<std::size_t>> gold;

  std::size_t size() const { return sentences.size(); }
  // Batch rows of sentence b, in token order.
  std::vector<std::size_t> rows_of(std::size_t b) const;
};

// Sentences must be non-empty, with valid trees and BIOES labels.
Batch make_batch(const std::vector<const Sentence*>& sentences, const Vocabulary& vocab,
                 GcnAggregation aggregation);

// Consecutive groups of at most `batch_size` sentences following `order`.
std::vector<std::vector<const Sentence*>> partition(const Corpus& corpus,
                                                    const std::vector<std::size_t>& order,
                                                    std::size_t batch_size);

}  // namespace synlstm
