#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "synlstm/corpus.hpp"
#include "synlstm/embeddings.hpp"
#include "synlstm/lstm.hpp"
#include "synlstm/vocab.hpp"

namespace synlstm {

// Character-level BiLSTM: e_t = [forward h after the last char ; backward h
// after the first char].
struct CharEncoder {
  ad::Tensor table;  // [chars x char_dim], PAD row zero
  LstmParams fwd, bwd;
  std::size_t output_dim() const { return 2 * fwd.hidden(); }
};

CharEncoder make_char_encoder(ParamStore& store, const std::string& prefix,
                              std::size_t vocab_size, std::size_t char_dim, std::size_t hidden,
                              std::mt19937_64& rng);

// Char ids of a set of tokens, char-time-major: ids[k * tokens + w] is char k
// of token w (PAD past the end).
struct CharBatch {
  SequenceLayout layout;
  std::vector<std::size_t> ids;
};

CharBatch make_char_batch(const std::vector<std::vector<std::size_t>>& token_chars);

// [tokens x 2*hidden]; tokens with no characters (batch padding) get zero rows.
ad::Tensor encode_chars(ad::Tape& tape, const CharEncoder& enc, const CharBatch& batch);

// e_t of a single token as a [1 x 2*hidden] row; an empty token is a
// contract error.
ad::Tensor char_encode(ad::Tape& tape, const CharEncoder& enc, std::span<const std::size_t> chars);

struct EmbeddingTables {
  ad::Tensor words;    // [V x word_dim]
  ad::Tensor deprels;  // [R x deprel_dim], undefined when unused
  ad::Tensor pos;      // [P x pos_dim], undefined when unused
  CharEncoder chars;
};

// Token ids for a batch laid out time-major (row t*batch + b).
struct TokenIds {
  std::vector<std::size_t> words, deprels, pos;
  CharBatch chars;
  std::size_t rows() const { return words.size(); }
};

TokenIds token_ids(const std::vector<const Sentence*>& sentences, const Vocabulary& vocab,
                   const SequenceLayout& layout);

// Per-token pieces: v (word), e (chars), r (relation to head), p (POS).
struct TokenPieces {
  ad::Tensor v, e, r, p;
};

TokenPieces embed_tokens(ad::Tape& tape, const EmbeddingTables& tables, const TokenIds& ids);

// x_t = [v; e; r; p] and g0_t = [v; e; r], skipping undefined pieces.
ad::Tensor assemble_x(ad::Tape& tape, const TokenPieces& pieces);
ad::Tensor assemble_g0(ad::Tape& tape, const TokenPieces& pieces);

}  // namespace synlstm
