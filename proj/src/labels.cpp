#include "synlstm/labels.hpp"

#include <algorithm>
#include <set>

#include "synlstm/error.hpp"

namespace synlstm {

std::string_view scheme_name(Scheme s) { return s == Scheme::bio ? "BIO" : "BIOES"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "BIO" || name == "bio") return Scheme::bio;
  if (name == "BIOES" || name == "bioes") return Scheme::bioes;
  throw ContractError("unknown label scheme '" + std::string(name) + "'");
}

Tag parse_tag(std::string_view label) {
  if (label == "O") return Tag{};
  if (label.size() >= 3 && label[1] == '-') {
    const char p = label[0];
    if (p == 'B' || p == 'I' || p == 'E' || p == 'S') return Tag{p, std::string(label.substr(2))};
  }
  throw SchemeError("malformed tag '" + std::string(label) + "'", 0);
}

namespace {

bool continues(const Tag& prev, const Tag& cur) {
  return (prev.prefix == 'B' || prev.prefix == 'I') && prev.type == cur.type;
}

std::vector<Tag> parse_all(const std::vector<std::string>& labels) {
  std::vector<Tag> tags;
  tags.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    try {
      tags.push_back(parse_tag(labels[i]));
    } catch (const SchemeError&) {
      throw SchemeError("malformed tag '" + labels[i] + "'", i);
    }
  }
  return tags;
}

}  // namespace

void validate_labels(const std::vector<std::string>& labels, Scheme scheme) {
  const std::vector<Tag> tags = parse_all(labels);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (scheme == Scheme::bio && (t.prefix == 'E' || t.prefix == 'S')) {
      throw SchemeError("tag '" + labels[i] + "' not allowed in BIO", i);
    }
    if (t.prefix == 'I' || (scheme == Scheme::bioes && t.prefix == 'E')) {
      if (i == 0 || !continues(tags[i - 1], t)) {
        throw SchemeError("'" + labels[i] + "' without a preceding B/I of the same type", i);
      }
    }
    if (scheme == Scheme::bioes && (t.prefix == 'B' || t.prefix == 'I')) {
      if (i + 1 == tags.size()) throw SchemeError("unterminated segment '" + labels[i] + "'", i);
      const Tag& n = tags[i + 1];
      if (!((n.prefix == 'I' || n.prefix == 'E') && n.type == t.type)) {
        throw SchemeError("'" + labels[i + 1] + "' cannot follow '" + labels[i] + "'", i + 1);
      }
    }
  }
}

bool labels_valid(const std::vector<std::string>& labels, Scheme scheme) {
  try {
    validate_labels(labels, scheme);
    return true;
  } catch (const SchemeError&) {
    return false;
  }
}

std::vector<std::string> convert_label_scheme(const std::vector<std::string>& labels, Scheme from,
                                              Scheme to) {
  validate_labels(labels, from);
  if (from == to) return labels;
  const std::vector<Tag> tags = parse_all(labels);
  std::vector<std::string> out(labels.size());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    char p = t.prefix;
    if (from == Scheme::bio) {
      const bool next_inside =
          i + 1 < tags.size() && tags[i + 1].prefix == 'I' && tags[i + 1].type == t.type;
      if (p == 'B') p = next_inside ? 'B' : 'S';
      else if (p == 'I') p = next_inside ? 'I' : 'E';
    } else {
      if (p == 'S') p = 'B';
      else if (p == 'E') p = 'I';
    }
    out[i] = p == 'O' ? std::string("O") : std::string(1, p) + "-" + t.type;
  }
  return out;
}

std::vector<EntitySpan> decode_spans(const std::vector<std::string>& labels, Scheme scheme) {
  std::vector<EntitySpan> spans;
  std::vector<Tag> tags;
  tags.reserve(labels.size());
  for (const std::string& l : labels) {
    try {
      tags.push_back(parse_tag(l));
    } catch (const SchemeError&) {
      tags.push_back(Tag{'?', ""});
    }
  }
  const std::size_t n = tags.size();
  std::size_t i = 0;
  while (i < n) {
    const Tag& t = tags[i];
    if (scheme == Scheme::bioes && t.prefix == 'S') {
      spans.push_back({i, i, t.type});
      ++i;
      continue;
    }
    if (t.prefix != 'B') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && tags[j].prefix == 'I' && tags[j].type == t.type) ++j;
    if (scheme == Scheme::bio) {
      spans.push_back({i, j - 1, t.type});
      i = j;
      continue;
    }
    if (j < n && tags[j].prefix == 'E' && tags[j].type == t.type) {
      spans.push_back({i, j, t.type});
      i = j + 1;
    } else {
      i = j;
    }
  }
  return spans;
}

std::vector<std::string> encode_spans(const std::vector<EntitySpan>& spans, std::size_t n,
                                      Scheme scheme) {
  std::vector<std::string> out(n, "O");
  for (const EntitySpan& s : spans) {
    if (s.start > s.end || s.end >= n) throw ContractError("span outside sentence");
    for (std::size_t k = s.start; k <= s.end; ++k) {
      if (out[k] != "O") throw ContractError("overlapping spans");
      out[k] = "I-" + s.type;
    }
    if (scheme == Scheme::bioes) {
      if (s.start == s.end) {
        out[s.start] = "S-" + s.type;
      } else {
        out[s.start] = "B-" + s.type;
        out[s.end] = "E-" + s.type;
      }
    } else {
      out[s.start] = "B-" + s.type;
    }
  }
  return out;
}

std::vector<std::string> bioes_label_set(std::vector<std::string> types) {
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  std::vector<std::string> out{"O"};
  for (const std::string& t : types) {
    for (const char* p : {"B-", "I-", "E-", "S-"}) out.push_back(p + t);
  }
  return out;
}

std::vector<std::string> entity_types(const std::vector<std::vector<std::string>>& label_rows) {
  std::set<std::string> types;
  for (const auto& row : label_rows) {
    for (const std::string& l : row) {
      if (l != "O" && l.size() >= 3 && l[1] == '-') types.insert(l.substr(2));
    }
  }
  return {types.begin(), types.end()};
}

}  // namespace synlstm
