#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "synlstm/graph.hpp"
#include "synlstm/labels.hpp"

namespace synlstm {

enum class Variant { syn_lstm_crf, bilstm_crf, gcn_concat_bilstm_crf };
enum class TreeSource { given, predicted_file, random };
enum class GraphInput { gcn, zeros };
enum class LabelSchemeSetting { automatic, bio, bioes };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);
std::string tree_source_name(TreeSource t);
TreeSource parse_tree_source(const std::string& s);

// Hyperparameters and model switches. Defaults follow the published setup
// where it is stated; the rest are documented choices.
struct ModelConfig {
  Variant variant = Variant::syn_lstm_crf;
  std::size_t hidden = 200;       // Syn-LSTM / BiLSTM hidden size per direction
  std::size_t gcn_hidden = 200;   // GCN layer width
  std::size_t gcn_layers = 2;
  GcnAggregation gcn_aggregation = GcnAggregation::neighbors;
  GraphInput graph_input = GraphInput::gcn;
  std::size_t word_dim = 100;
  std::size_t char_dim = 30;
  std::size_t char_hidden = 50;   // per direction, e_t has 2 * char_hidden entries
  std::size_t deprel_dim = 50;
  std::size_t pos_dim = 50;
  bool use_deprel = true;
  bool use_pos = true;
  bool fine_tune_words = true;
  std::string embeddings;         // optional pretrained word vectors
  std::size_t min_count = 1;

  double dropout = 0.5;
  double lr = 0.2;
  double decay = 0.1;
  double l2 = 1e-8;
  double clip_norm = 5.0;         // <= 0 disables clipping
  std::size_t batch_size = 100;
  std::size_t epochs = 100;
  std::uint64_t seed = 42;

  LabelSchemeSetting label_scheme = LabelSchemeSetting::automatic;
  bool crf_constraints = false;
  TreeSource tree_source = TreeSource::given;
  std::string predicted_trees;    // corpus whose heads/deprels replace the gold trees

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Flat `key = value` text; `#` starts a comment. Unknown keys and malformed
// values raise FormatError.
ModelConfig parse_config(std::istream& in);
ModelConfig load_config(const std::filesystem::path& path);
void apply_config_value(ModelConfig& cfg, const std::string& key, const std::string& value);
std::map<std::string, std::string> config_to_map(const ModelConfig& cfg);
ModelConfig config_from_map(const std::map<std::string, std::string>& values);
std::string config_to_text(const ModelConfig& cfg);

}  // namespace synlstm
