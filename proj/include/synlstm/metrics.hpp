#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "synlstm/corpus.hpp"
#include "synlstm/labels.hpp"

namespace synlstm {

using LabelRows = std::vector<std::vector<std::string>>;

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  // 0/0 -> 0 throughout.
  double precision() const;
  double recall() const;
  double f1() const;
  Counts& operator+=(const Counts& o);
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Sentence-length buckets: <=14, 15-29, 30-44, 45-59, >=60.
inline constexpr std::size_t kSentenceBuckets = 5;
// Entity-length buckets: 1, 2, 3, 4, 5, >=6.
inline constexpr std::size_t kEntityBuckets = 6;
std::size_t sentence_bucket(std::size_t n);
std::size_t entity_bucket(std::size_t len);
const std::array<std::string, kSentenceBuckets>& sentence_bucket_names();
const std::array<std::string, kEntityBuckets>& entity_bucket_names();

struct EvalReport {
  Counts overall;
  std::map<std::string, Counts> per_type;
  std::array<Counts, kSentenceBuckets> by_sentence_length{};
  std::array<Counts, kEntityBuckets> by_entity_length{};

  double precision() const { return overall.precision(); }
  double recall() const { return overall.recall(); }
  double f1() const { return overall.f1(); }

  // Rows `metric,bucket,value`.
  std::string to_csv() const;
  // Nested JSON object with the same content.
  std::string to_json() const;
};

// Exact span + type matching for one sentence.
Counts sentence_counts(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                       Scheme scheme = Scheme::bioes);

// Micro-averaged entity scores. Rows must be aligned (same count and lengths).
EvalReport entity_f1(const LabelRows& gold, const LabelRows& pred, Scheme scheme = Scheme::bioes);
// Corpora must be token-aligned. The scheme is BIOES if either side uses E-/S- tags.
EvalReport entity_f1(const Corpus& gold, const Corpus& pred);

LabelRows label_rows(const Corpus& corpus);

}  // namespace synlstm
