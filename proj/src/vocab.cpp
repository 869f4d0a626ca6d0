#include "synlstm/vocab.hpp"

#include <map>

#include "synlstm/error.hpp"

namespace synlstm {

Index::Index(std::vector<std::string> items) {
  for (auto& it : items) add(it);
}

std::size_t Index::add(const std::string& item) {
  auto [pos, inserted] = ids_.try_emplace(item, items_.size());
  if (inserted) items_.push_back(item);
  return pos->second;
}

std::optional<std::size_t> Index::find(std::string_view item) const {
  auto it = ids_.find(std::string(item));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0 && c < 0xF8) len = 4;
    else if (c >= 0xE0) len = c < 0xF0 ? 3 : 1;
    else if (c >= 0xC0) len = 2;
    if (i + len > s.size()) len = 1;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace {
std::size_t lookup_or_unk(const Index& idx, std::string_view key) {
  if (auto id = idx.find(key)) return *id;
  return kUnkId;
}

Index with_specials() {
  Index idx;
  idx.add(std::string(kPadToken));
  idx.add(std::string(kUnkToken));
  return idx;
}
}  // namespace

std::size_t Vocabulary::word_id(std::string_view word) const {
  if (auto id = words.find(word)) return *id;
  if (auto id = words.find(ascii_lower(word))) return *id;
  return kUnkId;
}

std::size_t Vocabulary::char_id(std::string_view ch) const { return lookup_or_unk(chars, ch); }
std::size_t Vocabulary::pos_id(std::string_view tag) const { return lookup_or_unk(pos, tag); }
std::size_t Vocabulary::deprel_id(std::string_view rel) const {
  return lookup_or_unk(deprels, rel);
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_count) {
  if (corpus.empty()) throw ContractError("build_vocab: empty corpus");
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const Sentence& s : corpus) {
    for (const std::string& w : s.tokens) {
      if (counts[w]++ == 0) order.push_back(w);
    }
  }
  Vocabulary v;
  v.words = with_specials();
  v.chars = with_specials();
  v.pos = with_specials();
  v.deprels = with_specials();
  for (const std::string& w : order) {
    if (counts[w] >= min_count) v.words.add(w);
  }
  std::vector<std::vector<std::string>> label_rows;
  for (const Sentence& s : corpus) {
    for (const std::string& w : s.tokens) {
      for (const std::string& ch : utf8_chars(w)) v.chars.add(ch);
    }
    for (const std::string& p : s.pos_tags) v.pos.add(p);
    for (const std::string& r : s.deprels) v.deprels.add(r);
    label_rows.push_back(s.labels);
  }
  v.labels = Index(bioes_label_set(entity_types(label_rows)));
  return v;
}

}  // namespace synlstm
