#include "synlstm/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "synlstm/error.hpp"

namespace synlstm {

void validate_tree(const std::vector<int>& heads, std::size_t sentence_index) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) throw TreeError("empty sentence", sentence_index);
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int h = heads[i];
    if (h < 0 || h > n) {
      throw TreeError("head " + std::to_string(h) + " of token " + std::to_string(i + 1) +
                          " out of range",
                      sentence_index);
    }
    if (h == i + 1) throw TreeError("token " + std::to_string(i + 1) + " heads itself", sentence_index);
    if (h == 0) ++roots;
  }
  if (roots != 1) {
    throw TreeError("expected exactly one root, found " + std::to_string(roots), sentence_index);
  }
  // 0 = unvisited, 1 = on current path, 2 = reaches the root
  std::vector<char> state(n, 0);
  for (int start = 0; start < n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (cur >= 0 && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = heads[cur] - 1;
    }
    if (cur >= 0 && state[cur] == 1) {
      throw TreeError("cycle through token " + std::to_string(cur + 1), sentence_index);
    }
    for (int v : path) state[v] = 2;
  }
}

bool is_tree(const std::vector<int>& heads) {
  try {
    validate_tree(heads, 0);
    return true;
  } catch (const TreeError&) {
    return false;
  }
}

void validate_sentence(const Sentence& s, std::size_t sentence_index) {
  const std::size_t n = s.tokens.size();
  if (n == 0) throw TreeError("empty sentence", sentence_index);
  if (s.pos_tags.size() != n || s.heads.size() != n || s.deprels.size() != n ||
      s.labels.size() != n) {
    throw ContractError("sentence " + std::to_string(sentence_index) + ": column lengths differ");
  }
  validate_tree(s.heads, sentence_index);
  if (!labels_valid(s.labels, Scheme::bioes)) validate_labels(s.labels, Scheme::bio);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_int(const std::string& s, int& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && !s.empty();
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  Sentence cur;
  std::size_t first_line = 0;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (cur.tokens.empty()) return;
    try {
      validate_sentence(cur, corpus.size());
    } catch (const SchemeError& e) {
      throw ParseError(std::string("invalid label sequence: ") + e.what(), first_line + e.index());
    }
    corpus.push_back(std::move(cur));
    cur = Sentence{};
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 6) {
      throw ParseError("expected 6 tab-separated columns, found " + std::to_string(cols.size()),
                       line_no);
    }
    int index = 0;
    int head = 0;
    if (!parse_int(cols[0], index)) throw ParseError("bad token index '" + cols[0] + "'", line_no);
    if (!parse_int(cols[3], head)) throw ParseError("bad head '" + cols[3] + "'", line_no);
    if (index != static_cast<int>(cur.tokens.size()) + 1) {
      throw ParseError("token index " + cols[0] + " out of sequence", line_no);
    }
    for (int c : {1, 2, 4, 5}) {
      if (cols[c].empty()) throw ParseError("empty column " + std::to_string(c + 1), line_no);
    }
    if (cur.tokens.empty()) first_line = line_no;
    cur.tokens.push_back(cols[1]);
    cur.pos_tags.push_back(cols[2]);
    cur.heads.push_back(head);
    cur.deprels.push_back(cols[4]);
    cur.labels.push_back(cols[5]);
  }
  flush();
  return corpus;
}

Corpus parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

void serialize_corpus(std::ostream& out, const Corpus& corpus) {
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const Sentence& sent = corpus[s];
    if (s) out << '\n';
    for (std::size_t i = 0; i < sent.size(); ++i) {
      out << (i + 1) << '\t' << sent.tokens[i] << '\t' << sent.pos_tags[i] << '\t'
          << sent.heads[i] << '\t' << sent.deprels[i] << '\t' << sent.labels[i] << '\n';
    }
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot write corpus file " + path.string());
  serialize_corpus(out, corpus);
}

Scheme detect_scheme(const Corpus& corpus) {
  for (const Sentence& s : corpus) {
    for (const std::string& l : s.labels) {
      if (l.size() >= 2 && (l[0] == 'E' || l[0] == 'S') && l[1] == '-') return Scheme::bioes;
    }
  }
  return Scheme::bio;
}

Corpus convert_corpus_scheme(const Corpus& corpus, Scheme from, Scheme to) {
  Corpus out = corpus;
  for (Sentence& s : out) s.labels = convert_label_scheme(s.labels, from, to);
  return out;
}

}  // namespace synlstm
