#include "synlstm/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "synlstm/error.hpp"

namespace synlstm {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::syn_lstm_crf: return "syn-lstm-crf";
    case Variant::bilstm_crf: return "bilstm-crf";
    case Variant::gcn_concat_bilstm_crf: return "gcn-concat-bilstm-crf";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "syn-lstm-crf") return Variant::syn_lstm_crf;
  if (s == "bilstm-crf") return Variant::bilstm_crf;
  if (s == "gcn-concat-bilstm-crf") return Variant::gcn_concat_bilstm_crf;
  throw FormatError("unknown variant '" + s + "'");
}

std::string tree_source_name(TreeSource t) {
  switch (t) {
    case TreeSource::given: return "given";
    case TreeSource::predicted_file: return "predicted-file";
    case TreeSource::random: return "random";
  }
  return "?";
}

TreeSource parse_tree_source(const std::string& s) {
  if (s == "given") return TreeSource::given;
  if (s == "predicted-file" || s == "predicted") return TreeSource::predicted_file;
  if (s == "random") return TreeSource::random;
  throw FormatError("unknown tree source '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FormatError("config '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw FormatError("config '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw FormatError("config '" + key + "': expected true/false, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void apply_config_value(ModelConfig& c, const std::string& key, const std::string& v) {
  if (key == "variant") c.variant = parse_variant(v);
  else if (key == "hidden" || key == "H") c.hidden = to_size(key, v);
  else if (key == "gcn_hidden") c.gcn_hidden = to_size(key, v);
  else if (key == "gcn_layers") c.gcn_layers = to_size(key, v);
  else if (key == "gcn_aggregation") {
    if (v == "neighbors") c.gcn_aggregation = GcnAggregation::neighbors;
    else if (v == "self_only") c.gcn_aggregation = GcnAggregation::self_only;
    else throw FormatError("config 'gcn_aggregation': unknown value '" + v + "'");
  } else if (key == "graph_input") {
    if (v == "gcn") c.graph_input = GraphInput::gcn;
    else if (v == "zeros") c.graph_input = GraphInput::zeros;
    else throw FormatError("config 'graph_input': unknown value '" + v + "'");
  } else if (key == "word_dim") c.word_dim = to_size(key, v);
  else if (key == "char_dim") c.char_dim = to_size(key, v);
  else if (key == "char_hidden") c.char_hidden = to_size(key, v);
  else if (key == "deprel_dim" || key == "D_r") c.deprel_dim = to_size(key, v);
  else if (key == "pos_dim" || key == "D_p") c.pos_dim = to_size(key, v);
  else if (key == "use_deprel") c.use_deprel = to_bool(key, v);
  else if (key == "use_pos") c.use_pos = to_bool(key, v);
  else if (key == "fine_tune_words") c.fine_tune_words = to_bool(key, v);
  else if (key == "embeddings") c.embeddings = v;
  else if (key == "min_count") c.min_count = to_size(key, v);
  else if (key == "dropout") c.dropout = to_double(key, v);
  else if (key == "lr") c.lr = to_double(key, v);
  else if (key == "decay") c.decay = to_double(key, v);
  else if (key == "l2") c.l2 = to_double(key, v);
  else if (key == "clip_norm") c.clip_norm = to_double(key, v);
  else if (key == "batch_size") c.batch_size = to_size(key, v);
  else if (key == "epochs") c.epochs = to_size(key, v);
  else if (key == "seed") c.seed = to_size(key, v);
  else if (key == "label_scheme") {
    if (v == "auto") c.label_scheme = LabelSchemeSetting::automatic;
    else if (v == "BIO" || v == "bio") c.label_scheme = LabelSchemeSetting::bio;
    else if (v == "BIOES" || v == "bioes") c.label_scheme = LabelSchemeSetting::bioes;
    else throw FormatError("config 'label_scheme': unknown value '" + v + "'");
  } else if (key == "crf_constraints") c.crf_constraints = to_bool(key, v);
  else if (key == "tree_source") c.tree_source = parse_tree_source(v);
  else if (key == "predicted_trees") c.predicted_trees = v;
  else throw FormatError("unknown config key '" + key + "'");
}

ModelConfig parse_config(std::istream& in) {
  ModelConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open config file " + path.string());
  return parse_config(in);
}

std::map<std::string, std::string> config_to_map(const ModelConfig& c) {
  std::map<std::string, std::string> m;
  m["variant"] = variant_name(c.variant);
  m["hidden"] = std::to_string(c.hidden);
  m["gcn_hidden"] = std::to_string(c.gcn_hidden);
  m["gcn_layers"] = std::to_string(c.gcn_layers);
  m["gcn_aggregation"] = c.gcn_aggregation == GcnAggregation::neighbors ? "neighbors" : "self_only";
  m["graph_input"] = c.graph_input == GraphInput::gcn ? "gcn" : "zeros";
  m["word_dim"] = std::to_string(c.word_dim);
  m["char_dim"] = std::to_string(c.char_dim);
  m["char_hidden"] = std::to_string(c.char_hidden);
  m["deprel_dim"] = std::to_string(c.deprel_dim);
  m["pos_dim"] = std::to_string(c.pos_dim);
  m["use_deprel"] = c.use_deprel ? "true" : "false";
  m["use_pos"] = c.use_pos ? "true" : "false";
  m["fine_tune_words"] = c.fine_tune_words ? "true" : "false";
  m["embeddings"] = c.embeddings;
  m["min_count"] = std::to_string(c.min_count);
  m["dropout"] = fmt(c.dropout);
  m["lr"] = fmt(c.lr);
  m["decay"] = fmt(c.decay);
  m["l2"] = fmt(c.l2);
  m["clip_norm"] = fmt(c.clip_norm);
  m["batch_size"] = std::to_string(c.batch_size);
  m["epochs"] = std::to_string(c.epochs);
  m["seed"] = std::to_string(c.seed);
  m["label_scheme"] = c.label_scheme == LabelSchemeSetting::automatic ? "auto"
                      : c.label_scheme == LabelSchemeSetting::bio     ? "BIO"
                                                                      : "BIOES";
  m["crf_constraints"] = c.crf_constraints ? "true" : "false";
  m["tree_source"] = tree_source_name(c.tree_source);
  m["predicted_trees"] = c.predicted_trees;
  return m;
}

ModelConfig config_from_map(const std::map<std::string, std::string>& values) {
  ModelConfig cfg;
  for (const auto& [k, v] : values) {
    if ((k == "embeddings" || k == "predicted_trees") && v.empty()) continue;
    apply_config_value(cfg, k, v);
  }
  return cfg;
}

std::string config_to_text(const ModelConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : config_to_map(cfg)) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace synlstm
