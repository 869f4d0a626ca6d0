#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synlstm/corpus.hpp"

namespace synlstm {

// Dense string <-> id map; ids are assigned in insertion order.
class Index {
 public:
  Index() = default;
  explicit Index(std::vector<std::string> items);

  std::size_t add(const std::string& item);
  std::optional<std::size_t> find(std::string_view item) const;
  const std::string& at(std::size_t id) const { return items_.at(id); }
  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<std::string>& items() const noexcept { return items_; }

  friend bool operator==(const Index& a, const Index& b) { return a.items_ == b.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> ids_;
};

inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Splits a UTF-8 string into code points (each returned as its byte sequence).
// Invalid lead bytes are returned as single bytes.
std::vector<std::string> utf8_chars(std::string_view s);

// Word, character, POS and relation indices reserve PAD = 0 and UNK = 1.
// Labels form a closed BIOES set without PAD.
struct Vocabulary {
  Index words;
  Index chars;
  Index pos;
  Index deprels;
  Index labels;

  // Case-sensitive, then ASCII-lowercased, then UNK.
  std::size_t word_id(std::string_view word) const;
  std::size_t char_id(std::string_view ch) const;
  std::size_t pos_id(std::string_view tag) const;
  std::size_t deprel_id(std::string_view rel) const;
  std::optional<std::size_t> label_id(std::string_view label) const { return labels.find(label); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

// Words seen fewer than min_count times are left out (they map to UNK).
// Labels are the full BIOES set over the entity types in the corpus, which
// must already be BIOES-encoded.
Vocabulary build_vocab(const Corpus& corpus, std::size_t min_count = 1);

std::string ascii_lower(std::string_view s);

}  // namespace synlstm
