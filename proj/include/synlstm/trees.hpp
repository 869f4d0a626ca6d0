#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "synlstm/config.hpp"
#include "synlstm/corpus.hpp"

namespace synlstm {

// Uniform random rooted tree over n tokens: a uniform labelled tree from a
// random Pruefer sequence, a uniform root, edges oriented away from the root.
// Returns 1-based heads with 0 for the root.
std::vector<int> random_tree_heads(std::size_t n, std::mt19937_64& rng);

// Relations seen in the corpus, sorted.
std::vector<std::string> relation_set(const Corpus& corpus);

// Replaces every tree with a random one; relations are drawn uniformly from
// `relations` (which must be non-empty).
Corpus randomize_trees(const Corpus& corpus, const std::vector<std::string>& relations,
                       std::uint64_t seed);

// Copies heads and relations from `trees`, which must be token-aligned with
// `corpus`.
Corpus override_trees(const Corpus& corpus, const Corpus& trees);

// Applies cfg.tree_source to a corpus. `salt` decorrelates the random trees of
// different splits; random relations come from `relations` when given,
// otherwise from the corpus itself.
Corpus apply_tree_source(const Corpus& corpus, const ModelConfig& cfg, std::uint64_t salt,
                         const std::string& predicted_path = "",
                         const std::vector<std::string>& relations = {});

}  // namespace synlstm
