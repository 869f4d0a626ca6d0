#pragma once

#include <cstddef>
#include <cstdint>

#include "synlstm/corpus.hpp"

namespace synlstm {

// Graph-dependent toy corpus. Each sentence (8 to 20 tokens) holds two anchor
// entities of different types and one ambiguous token whose type is that of
// the anchor two dependency hops away (ambiguous -> link word -> anchor). The
// other anchor is at least three hops from the ambiguous token and word order
// is random, so the type cannot be read off the surface sequence. Labels are
// BIOES; POS and relation columns carry no information about the answer.
Corpus make_synthetic_corpus(std::size_t sentences, std::uint64_t seed);

}  // namespace synlstm
