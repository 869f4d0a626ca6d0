#include "synlstm/trees.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "synlstm/error.hpp"

namespace synlstm {

std::vector<int> random_tree_heads(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) return {};
  if (n == 1) return {0};
  std::vector<std::vector<std::size_t>> adj(n);
  if (n == 2) {
    adj[0].push_back(1);
    adj[1].push_back(0);
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> seq(n - 2);
    for (auto& s : seq) s = pick(rng);
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t s : seq) ++degree[s];
    std::set<std::size_t> leaves;
    for (std::size_t v = 0; v < n; ++v) {
      if (degree[v] == 1) leaves.insert(v);
    }
    for (std::size_t s : seq) {
      const std::size_t leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      adj[leaf].push_back(s);
      adj[s].push_back(leaf);
      if (--degree[s] == 1) leaves.insert(s);
    }
    const std::size_t u = *leaves.begin();
    const std::size_t v = *std::next(leaves.begin());
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::uniform_int_distribution<std::size_t> pick_root(0, n - 1);
  const std::size_t root = pick_root(rng);
  std::vector<int> heads(n, -1);
  heads[root] = 0;
  std::queue<std::size_t> frontier;
  frontier.push(root);
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t w : adj[v]) {
      if (heads[w] == -1) {
        heads[w] = static_cast<int>(v + 1);
        frontier.push(w);
      }
    }
  }
  return heads;
}

std::vector<std::string> relation_set(const Corpus& corpus) {
  std::set<std::string> rels;
  for (const auto& s : corpus) rels.insert(s.deprels.begin(), s.deprels.end());
  return {rels.begin(), rels.end()};
}

Corpus randomize_trees(const Corpus& corpus, const std::vector<std::string>& relations,
                       std::uint64_t seed) {
  if (relations.empty()) throw ContractError("randomize_trees: empty relation set");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, relations.size() - 1);
  Corpus out = corpus;
  for (auto& s : out) {
    s.heads = random_tree_heads(s.size(), rng);
    for (auto& r : s.deprels) r = relations[pick(rng)];
  }
  return out;
}

Corpus override_trees(const Corpus& corpus, const Corpus& trees) {
  if (trees.size() != corpus.size()) {
    throw DataIntegrityError("predicted trees cover " + std::to_string(trees.size()) +
                             " sentences, corpus has " + std::to_string(corpus.size()));
  }
  Corpus out = corpus;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (trees[i].tokens != out[i].tokens) {
      throw DataIntegrityError("predicted trees are not aligned with sentence " + std::to_string(i));
    }
    validate_tree(trees[i].heads, i);
    out[i].heads = trees[i].heads;
    out[i].deprels = trees[i].deprels;
  }
  return out;
}

Corpus apply_tree_source(const Corpus& corpus, const ModelConfig& cfg, std::uint64_t salt,
                         const std::string& predicted_path,
                         const std::vector<std::string>& relations) {
  switch (cfg.tree_source) {
    case TreeSource::given:
      return corpus;
    case TreeSource::random: {
      const auto rels = relations.empty() ? relation_set(corpus) : relations;
      return randomize_trees(corpus, rels, cfg.seed * 1000003ULL + salt);
    }
    case TreeSource::predicted_file: {
      if (predicted_path.empty()) throw ContractError("tree source 'predicted-file' needs a path");
      return override_trees(corpus, parse_corpus(std::filesystem::path(predicted_path)));
    }
  }
  return corpus;
}

}  // namespace synlstm
