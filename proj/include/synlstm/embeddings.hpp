#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "synlstm/vocab.hpp"

namespace synlstm {

// Pretrained vectors read from `token v1 ... vD` lines. An optional first
// line `count D` is recognised and skipped.
struct EmbeddingFile {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

EmbeddingFile read_embedding_file(std::istream& in);
EmbeddingFile read_embedding_file(const std::filesystem::path& path);

// Default initialisation for rows without a pretrained vector:
// uniform in [-sqrt(3/D), sqrt(3/D)].
double embedding_init_scale(std::size_t dim);

struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // rows x dim, row-major
  std::size_t pretrained_rows = 0;
};

// Row i holds the vector for words.at(i): the exact token if present in the
// file, otherwise its lowercase form, otherwise a draw from the init policy.
// The PAD row is zero.
EmbeddingMatrix load_embeddings(const EmbeddingFile& file, const Index& words, std::mt19937_64& rng);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Index& words,
                                std::mt19937_64& rng);

}  // namespace synlstm
