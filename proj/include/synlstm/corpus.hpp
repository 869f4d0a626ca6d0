#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "synlstm/labels.hpp"

namespace synlstm {

// One dependency-annotated sentence. heads are 1-based with 0 marking the root.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> pos_tags;
  std::vector<int> heads;
  std::vector<std::string> deprels;
  std::vector<std::string> labels;

  std::size_t size() const noexcept { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

using Corpus = std::vector<Sentence>;

// Throws TreeError unless heads describe a single rooted tree over n tokens:
// each head in [0, n], no self-heads, exactly one root, no cycles.
void validate_tree(const std::vector<int>& heads, std::size_t sentence_index);
bool is_tree(const std::vector<int>& heads);

// Checks every Sentence invariant (equal column lengths, n >= 1, tree, label
// encoding valid under BIO or BIOES). Throws TreeError / SchemeError.
void validate_sentence(const Sentence& s, std::size_t sentence_index);

// Tab-separated corpus: `index form pos head deprel ner`, blank line between
// sentences, `#` lines are comments.
Corpus parse_corpus(std::istream& in);
Corpus parse_corpus(const std::filesystem::path& path);
void serialize_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

// BIOES if any E-/S- tag appears, otherwise BIO.
Scheme detect_scheme(const Corpus& corpus);

// Relabels every sentence; throws SchemeError on invalid input.
Corpus convert_corpus_scheme(const Corpus& corpus, Scheme from, Scheme to);

}  // namespace synlstm
