#include "synlstm/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "synlstm/error.hpp"

namespace synlstm {
namespace {

std::vector<std::string> split_spaces(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string f;
  while (is >> f) out.push_back(f);
  return out;
}

bool to_double(const std::string& s, double& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool to_size(const std::string& s, std::size_t& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

EmbeddingFile read_embedding_file(std::istream& in) {
  EmbeddingFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      std::size_t count = 0, dim = 0;
      if (to_size(fields[0], count) && to_size(fields[1], dim)) continue;
    }
    if (fields.size() < 2) throw FormatError("embedding line " + std::to_string(line_no) + ": no values");
    const std::size_t dim = fields.size() - 1;
    if (out.dim == 0) out.dim = dim;
    if (dim != out.dim) {
      throw FormatError("embedding line " + std::to_string(line_no) + ": expected " +
                        std::to_string(out.dim) + " values, found " + std::to_string(dim));
    }
    std::vector<double> vec(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!to_double(fields[i + 1], vec[i])) {
        throw FormatError("embedding line " + std::to_string(line_no) + ": bad number '" +
                          fields[i + 1] + "'");
      }
    }
    out.vectors.emplace(fields[0], std::move(vec));
  }
  return out;
}

EmbeddingFile read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open embedding file " + path.string());
  return read_embedding_file(in);
}

double embedding_init_scale(std::size_t dim) { return std::sqrt(3.0 / static_cast<double>(dim)); }

EmbeddingMatrix load_embeddings(const EmbeddingFile& file, const Index& words, std::mt19937_64& rng) {
  if (file.dim == 0) throw FormatError("embedding file has no vectors");
  EmbeddingMatrix m;
  m.rows = words.size();
  m.dim = file.dim;
  m.values.assign(m.rows * m.dim, 0.0);
  const double scale = embedding_init_scale(m.dim);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (std::size_t r = 0; r < m.rows; ++r) {
    double* row = m.values.data() + r * m.dim;
    if (r == kPadId) continue;
    auto it = file.vectors.find(words.at(r));
    if (it == file.vectors.end()) it = file.vectors.find(ascii_lower(words.at(r)));
    if (it != file.vectors.end()) {
      std::copy(it->second.begin(), it->second.end(), row);
      ++m.pretrained_rows;
    } else {
      for (std::size_t j = 0; j < m.dim; ++j) row[j] = dist(rng);
    }
  }
  return m;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Index& words,
                                std::mt19937_64& rng) {
  return load_embeddings(read_embedding_file(path), words, rng);
}

}  // namespace synlstm
