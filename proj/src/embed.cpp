#include "synlstm/embed.hpp"

#include <algorithm>
#include <cmath>

#include "synlstm/error.hpp"

namespace synlstm {

CharEncoder make_char_encoder(ParamStore& store, const std::string& prefix,
                              std::size_t vocab_size, std::size_t char_dim, std::size_t hidden,
                              std::mt19937_64& rng) {
  CharEncoder enc;
  enc.table = store.add(prefix + ".table", {vocab_size, char_dim});
  const double scale = embedding_init_scale(char_dim);
  std::uniform_real_distribution<double> dist(-scale, scale);
  auto d = enc.table.data_mut();
  for (std::size_t i = char_dim; i < d.size(); ++i) d[i] = dist(rng);
  enc.fwd = make_lstm_params(store, prefix + ".fwd", char_dim, hidden, rng);
  enc.bwd = make_lstm_params(store, prefix + ".bwd", char_dim, hidden, rng);
  return enc;
}

CharBatch make_char_batch(const std::vector<std::vector<std::size_t>>& token_chars) {
  CharBatch cb;
  cb.layout.batch = token_chars.size();
  for (const auto& cs : token_chars) {
    cb.layout.lengths.push_back(cs.size());
    cb.layout.steps = std::max(cb.layout.steps, cs.size());
  }
  cb.ids.assign(cb.layout.rows(), kPadId);
  for (std::size_t w = 0; w < token_chars.size(); ++w) {
    for (std::size_t k = 0; k < token_chars[w].size(); ++k) {
      cb.ids[cb.layout.row(k, w)] = token_chars[w][k];
    }
  }
  return cb;
}

ad::Tensor encode_chars(ad::Tape& tape, const CharEncoder& enc, const CharBatch& batch) {
  const std::size_t tokens = batch.layout.batch;
  if (batch.layout.steps == 0) return ad::Tensor({tokens, enc.output_dim()});
  ad::Tensor x = ad::gather_rows(tape, enc.table, batch.ids, kPadId);
  // Tokens with no characters never leave the zero state.
  return run_plain_bilstm(tape, x, batch.layout, enc.fwd, enc.bwd).final_state;
}

ad::Tensor char_encode(ad::Tape& tape, const CharEncoder& enc, std::span<const std::size_t> chars) {
  if (chars.empty()) throw ContractError("char_encode: token has no characters");
  return encode_chars(tape, enc, make_char_batch({{chars.begin(), chars.end()}}));
}

TokenIds token_ids(const std::vector<const Sentence*>& sentences, const Vocabulary& vocab,
                   const SequenceLayout& layout) {
  TokenIds ids;
  const std::size_t rows = layout.rows();
  ids.words.assign(rows, kPadId);
  ids.deprels.assign(rows, kPadId);
  ids.pos.assign(rows, kPadId);
  std::vector<std::vector<std::size_t>> chars(rows);
  for (std::size_t b = 0; b < sentences.size(); ++b) {
    const Sentence& s = *sentences[b];
    for (std::size_t t = 0; t < s.size(); ++t) {
      const std::size_t r = layout.row(t, b);
      ids.words[r] = vocab.word_id(s.tokens[t]);
      ids.deprels[r] = vocab.deprel_id(s.deprels[t]);
      ids.pos[r] = vocab.pos_id(s.pos_tags[t]);
      for (const auto& ch : utf8_chars(s.tokens[t])) chars[r].push_back(vocab.char_id(ch));
    }
  }
  ids.chars = make_char_batch(chars);
  return ids;
}

TokenPieces embed_tokens(ad::Tape& tape, const EmbeddingTables& tables, const TokenIds& ids) {
  TokenPieces p;
  p.v = ad::gather_rows(tape, tables.words, ids.words, kPadId);
  p.e = encode_chars(tape, tables.chars, ids.chars);
  if (tables.deprels.defined()) p.r = ad::gather_rows(tape, tables.deprels, ids.deprels, kPadId);
  if (tables.pos.defined()) p.p = ad::gather_rows(tape, tables.pos, ids.pos, kPadId);
  return p;
}

namespace {
ad::Tensor concat_defined(ad::Tape& tape, std::initializer_list<ad::Tensor> parts) {
  std::vector<ad::Tensor> kept;
  for (const auto& t : parts) {
    if (t.defined()) kept.push_back(t);
  }
  if (kept.size() == 1) return kept.front();
  return ad::concat(tape, kept, 1);
}
}  // namespace

ad::Tensor assemble_x(ad::Tape& tape, const TokenPieces& pieces) {
  return concat_defined(tape, {pieces.v, pieces.e, pieces.r, pieces.p});
}

ad::Tensor assemble_g0(ad::Tape& tape, const TokenPieces& pieces) {
  return concat_defined(tape, {pieces.v, pieces.e, pieces.r});
}

}  // namespace synlstm
