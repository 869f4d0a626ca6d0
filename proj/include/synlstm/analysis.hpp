#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "synlstm/checkpoint.hpp"
#include "synlstm/config.hpp"
#include "synlstm/corpus.hpp"
#include "synlstm/metrics.hpp"
#include "synlstm/syn_lstm.hpp"

namespace synlstm {

enum class Gate { f, i, m, o };
Gate parse_gate(const std::string& s);
std::string gate_name(Gate g);

// Buckets [0,.4), [.4,.5), [.5,.6), [.6,.7), [.7,.8), [.8,.9), [.9,1.0].
struct GateHistogram {
  static constexpr std::size_t kBuckets = 7;
  static const std::array<double, kBuckets + 1>& edges();
  static std::size_t bucket_of(double v);  // DataIntegrityError outside [0,1]
  std::array<std::size_t, kBuckets> counts{};
  std::size_t total() const;
  // Header `bucket_low,bucket_high,count`; each count is one gate component
  // of one token in one direction.
  std::string to_csv() const;
};

// Counts every component of the gate for every token and direction.
GateHistogram gate_histogram(const std::vector<GateTrace>& traces, Gate gate);
double mean_gate(const std::vector<GateTrace>& traces, Gate gate);

// Contiguous 4/6 : 1/6 : 1/6 split of a corpus (train, dev, test).
struct Split {
  Corpus train, dev, test;
};
Split split_corpus(const Corpus& corpus);

struct TreeSourceSpec {
  std::string name;            // "given", "random" or "predicted"
  std::string predicted_path;  // for "predicted"
};
// Parses "given,random,predicted=PATH".
std::vector<TreeSourceSpec> parse_tree_sources(const std::string& list);

struct TreeSourceResult {
  std::string source;
  double f1 = 0.0;
  double mean_m = 0.0;
};
struct TreeComparison {
  std::vector<TreeSourceResult> sources;
  // (a, b, f1_a - f1_b) for every ordered pair a before b.
  std::vector<std::tuple<std::string, std::string, double>> deltas;
  std::string to_csv() const;
};

// Evaluates one checkpoint per requested source on `test_by_source` (the test
// corpus carrying that source's trees). A requested source without a
// checkpoint or test corpus is a contract error.
TreeComparison compare_tree_sources(const std::vector<std::string>& sources,
                                    const std::map<std::string, Checkpoint>& checkpoints,
                                    const std::map<std::string, Corpus>& test_by_source);

// Paired bootstrap over sentences. Returns the fraction of resamples whose
// F1(a) - F1(b) does not have the sign of the observed delta; 1.0 when the
// observed delta is zero. Requires resamples >= 100.
double bootstrap_test(const LabelRows& gold, const LabelRows& pred_a, const LabelRows& pred_b,
                      std::size_t resamples, std::uint64_t seed, Scheme scheme = Scheme::bioes);

enum class Ablation { gcn_1_layer, gcn_all, deprel_embedding, pos_embedding, original_dependency };
Ablation parse_ablation(const std::string& s);
std::string ablation_name(Ablation a);
// Reduced configuration. original-dependency switches to random trees.
ModelConfig ablate_config(const ModelConfig& cfg, Ablation drop);

}  // namespace synlstm
