#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace synlstm {

enum class Scheme { bio, bioes };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

struct Tag {
  char prefix = 'O';  // one of O B I E S
  std::string type;   // empty for O
};

// Splits "B-PER" into {'B', "PER"}; "O" into {'O', ""}. Throws SchemeError
// (index 0) for anything else.
Tag parse_tag(std::string_view label);

// Throws SchemeError naming the first offending index.
void validate_labels(const std::vector<std::string>& labels, Scheme scheme);
bool labels_valid(const std::vector<std::string>& labels, Scheme scheme);

std::vector<std::string> convert_label_scheme(const std::vector<std::string>& labels, Scheme from,
                                              Scheme to);

struct EntitySpan {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive
  std::string type;
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

// Maximal well-formed segments. Malformed segments (a B without its closing
// E, an orphan I or E) are dropped.
std::vector<EntitySpan> decode_spans(const std::vector<std::string>& labels,
                                     Scheme scheme = Scheme::bioes);

// Inverse of decode_spans for non-overlapping spans inside [0, n).
std::vector<std::string> encode_spans(const std::vector<EntitySpan>& spans, std::size_t n,
                                      Scheme scheme = Scheme::bioes);

// "O" followed by B-/I-/E-/S- for each type in sorted order: 4 * types + 1 labels.
std::vector<std::string> bioes_label_set(std::vector<std::string> types);

// Entity types mentioned in the labels, sorted and deduplicated.
std::vector<std::string> entity_types(const std::vector<std::vector<std::string>>& label_rows);

}  // namespace synlstm
