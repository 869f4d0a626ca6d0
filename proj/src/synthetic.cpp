#include "synlstm/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <vector>

#include "synlstm/error.hpp"

namespace synlstm {

namespace {

struct TypeLexicon {
  const char* type;
  std::vector<std::string> heads;
  std::vector<std::string> tails;  // second token of two-token mentions
};

const std::array<TypeLexicon, 3>& lexicons() {
  static const std::array<TypeLexicon, 3> lex{{
      {"ORG",
       {"Acme", "Globex", "Initech", "Hooli", "Vandelay", "Soylent", "Cyberdyne", "Tyrell"},
       {"Corp", "Inc", "Holdings"}},
      {"PER",
       {"Alice", "Bob", "Carol", "Dmitri", "Esther", "Farid", "Greta", "Hiro"},
       {"Smith", "Novak", "Okafor"}},
      {"LOC",
       {"Oslo", "Lima", "Cairo", "Hanoi", "Quito", "Perth", "Dakar", "Riga"},
       {"Harbor", "Valley", "Heights"}},
  }};
  return lex;
}

const std::vector<std::string> kAmbiguous = {"Jordan", "Washington", "Georgia", "Phoenix",
                                             "Lincoln", "Chase", "Dallas", "Florence"};
const std::vector<std::string> kLinks = {"of", "with", "for", "near", "from", "at"};
const std::vector<std::string> kFillers = {
    "the", "a", "said", "met", "visited", "report", "today", "new", "officials", "during",
    "after", "then", "many", "some", "big", "small", "yesterday", "people", "and", "was",
    "seen", "again", "quietly", "late"};
const std::vector<std::string> kFillerPos = {"DT", "VB", "NN", "JJ", "RB", "CC"};
const std::vector<std::string> kRelations = {"dep", "nmod", "amod", "nsubj", "obj", "det"};

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

std::size_t uniform(std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(lo, hi);
  return d(rng);
}

// A contiguous group of tokens placed as a unit; node ids index `Draft`.
struct Unit {
  std::vector<std::size_t> nodes;
};

struct Node {
  std::string token, pos, label;
  std::size_t head = 0;  // node id of the head; self for the root
  bool root = false;
};

Sentence make_sentence(std::mt19937_64& rng) {
  const std::size_t length = uniform(8, 20, rng);
  const auto& lex = lexicons();
  const std::size_t type_a = uniform(0, 2, rng);
  const std::size_t type_b = (type_a + uniform(1, 2, rng)) % 3;

  std::vector<Node> nodes;
  std::vector<Unit> units;
  auto add_anchor = [&](std::size_t type) {
    Unit u;
    const bool two = uniform(0, 1, rng) == 1;
    const std::string& t = lex[type].type;
    u.nodes.push_back(nodes.size());
    nodes.push_back({pick(lex[type].heads, rng), "NNP", (two ? "B-" : "S-") + t, 0, false});
    if (two) {
      u.nodes.push_back(nodes.size());
      nodes.push_back({pick(lex[type].tails, rng), "NNP", "E-" + t, u.nodes[0], false});
    }
    units.push_back(u);
    return u.nodes[0];
  };

  // Built with anchor A as a temporary root: link -> A, ambiguous -> link.
  const std::size_t a = add_anchor(type_a);
  nodes[a].root = true;
  nodes[a].head = a;
  const std::size_t link = nodes.size();
  nodes.push_back({pick(kLinks, rng), "IN", "O", a, false});
  units.push_back({{link}});
  const std::size_t amb = nodes.size();
  nodes.push_back({pick(kAmbiguous, rng), "NNP", std::string("S-") + lex[type_a].type, link, false});
  units.push_back({{amb}});

  // The other anchor hangs off a node at distance >= 2 from the ambiguous
  // token (a token of anchor A), so it ends up >= 3 hops away.
  const std::size_t first_a_unit = 0;
  const std::size_t b = add_anchor(type_b);
  nodes[b].head = pick(units[first_a_unit].nodes, rng);

  while (nodes.size() < length) {
    const std::size_t id = nodes.size();
    const std::size_t head = uniform(0, id - 1, rng);
    nodes.push_back({pick(kFillers, rng), pick(kFillerPos, rng), "O", head, false});
    units.push_back({{id}});
  }

  // Re-root at a uniform node so neither the root relation nor the head
  // direction singles out the linked anchor.
  {
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      if (nodes[id].root) continue;
      adj[id].push_back(nodes[id].head);
      adj[nodes[id].head].push_back(id);
    }
    std::vector<bool> seen(nodes.size(), false);
    const std::size_t root = uniform(0, nodes.size() - 1, rng);
    for (auto& node : nodes) node.root = false;
    nodes[root].root = true;
    seen[root] = true;
    std::vector<std::size_t> frontier{root};
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      for (std::size_t w : adj[frontier[k]]) {
        if (seen[w]) continue;
        seen[w] = true;
        nodes[w].head = frontier[k];
        frontier.push_back(w);
      }
    }
  }

  std::shuffle(units.begin(), units.end(), rng);
  std::vector<std::size_t> position(nodes.size());
  std::size_t p = 0;
  for (const Unit& u : units) {
    for (std::size_t id : u.nodes) position[id] = p++;
  }

  Sentence s;
  const std::size_t n = nodes.size();
  s.tokens.resize(n);
  s.pos_tags.resize(n);
  s.heads.resize(n);
  s.deprels.resize(n);
  s.labels.resize(n);
  for (std::size_t id = 0; id < n; ++id) {
    const std::size_t at = position[id];
    s.tokens[at] = nodes[id].token;
    s.pos_tags[at] = nodes[id].pos;
    s.heads[at] = nodes[id].root ? 0 : static_cast<int>(position[nodes[id].head] + 1);
    s.deprels[at] = nodes[id].root ? "root" : pick(kRelations, rng);
    s.labels[at] = nodes[id].label;
  }
  return s;
}

}  // namespace

Corpus make_synthetic_corpus(std::size_t sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus corpus;
  corpus.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) corpus.push_back(make_sentence(rng));
  return corpus;
}

}  // namespace synlstm
