#include "synlstm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "synlstm/analysis.hpp"
#include "synlstm/checkpoint.hpp"
#include "synlstm/error.hpp"
#include "synlstm/gradcheck.hpp"
#include "synlstm/synthetic.hpp"
#include "synlstm/trainer.hpp"
#include "synlstm/trees.hpp"

namespace synlstm {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kTrainSalt = 1, kDevSalt = 2, kTestSalt = 3;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContractError("cannot write " + path.string());
  out << text;
}

ModelConfig config_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  ModelConfig cfg = path.empty() ? ModelConfig{} : load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

// Relations a random tree may use: those the model knows, without PAD/UNK.
std::vector<std::string> model_relations(const Vocabulary& vocab) {
  const auto& items = vocab.deprels.items();
  if (items.size() <= 2) return {"dep"};
  return {items.begin() + 2, items.end()};
}

// Brings an evaluation corpus onto the tree source the checkpoint was trained with.
Corpus eval_trees(const Corpus& data, const Checkpoint& ck) {
  if (ck.config.tree_source != TreeSource::random) return data;
  return randomize_trees(data, model_relations(ck.vocab), ck.config.seed * 1000003ULL + kTestSalt);
}

std::string f1_line(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << "precision " << r.precision() << " recall "
     << r.recall() << " f1 " << r.f1();
  return os.str();
}

TrainOptions epoch_logger(std::ostream& out) {
  TrainOptions opts;
  opts.on_epoch = [&out](const EpochLog& log) {
    out << "epoch " << log.epoch << " lr " << log.lr << " loss " << log.loss << " dev_f1 "
        << log.dev_f1 << '\n';
  };
  return opts;
}

struct TrainedSplit {
  Checkpoint checkpoint;
  Corpus test;
};

// Trains on the split with the given trees and returns the best checkpoint
// plus the test portion carrying the same kind of trees.
TrainedSplit train_on_split(const ModelConfig& cfg, Split split, std::ostream& log) {
  if (cfg.tree_source == TreeSource::random) {
    const auto rels = relation_set(split.train);
    const std::uint64_t base = cfg.seed * 1000003ULL;
    split.train = randomize_trees(split.train, rels, base + kTrainSalt);
    split.dev = randomize_trees(split.dev, rels, base + kDevSalt);
    split.test = randomize_trees(split.test, rels, base + kTestSalt);
  }
  TrainResult r = train(cfg, split.train, split.dev, epoch_logger(log));
  return {std::move(r.best), std::move(split.test)};
}

int cmd_train(const std::string& config_path, const std::string& train_path,
              const std::string& dev_path, const std::string& out_path,
              std::optional<std::uint64_t> seed, std::ostream& out) {
  const ModelConfig cfg = config_with_seed(config_path, seed);
  Corpus train_set = parse_corpus(fs::path(train_path));
  Corpus dev_set = parse_corpus(fs::path(dev_path));
  if (cfg.tree_source == TreeSource::random) {
    const auto rels = relation_set(train_set);
    train_set = randomize_trees(train_set, rels, cfg.seed * 1000003ULL + kTrainSalt);
    dev_set = randomize_trees(dev_set, rels, cfg.seed * 1000003ULL + kDevSalt);
  } else if (cfg.tree_source == TreeSource::predicted_file) {
    train_set = apply_tree_source(train_set, cfg, kTrainSalt, cfg.predicted_trees);
  }
  const TrainResult r = train(cfg, train_set, dev_set, epoch_logger(out));
  save_checkpoint(out_path, r.best);
  out << "best epoch " << r.best.summary.best_epoch << " dev_f1 " << std::fixed
      << std::setprecision(6) << r.best.summary.best_dev_f1 << '\n';
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& report_path, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(model_path);
  const Model model = restore(ck);
  const Corpus data = eval_trees(parse_corpus(fs::path(data_path)), ck);
  const EvalReport report = evaluate(model, data);
  out << f1_line(report) << '\n';
  if (!report_path.empty()) write_text(report_path, report.to_csv());
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(model_path);
  const Model model = restore(ck);
  const Corpus data = parse_corpus(fs::path(data_path));
  const Scheme scheme = corpus_scheme(data, ck.config.label_scheme);
  Corpus predicted = predict_corpus(model, eval_trees(data, ck), scheme);
  // The written file keeps the input's trees; only the label column changes.
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    predicted[i].heads = data[i].heads;
    predicted[i].deprels = data[i].deprels;
  }
  write_corpus(out_path, predicted);
  out << "wrote " << predicted.size() << " sentences to " << out_path << '\n';
  return 0;
}

int cmd_gradcheck(const std::string& config_path, double tol, std::optional<std::uint64_t> seed,
                  std::ostream& out) {
  const ModelConfig cfg = config_with_seed(config_path, seed);
  GradCheckOptions opts;
  if (seed) opts.seed = *seed;
  double worst = 0.0;
  for (const auto& r : gradcheck_all(cfg, opts)) {
    out << variant_name(r.variant) << ": " << r.checked << " entries, max relative error "
        << std::scientific << std::setprecision(3) << r.max_rel_error << " (" << r.worst_param
        << '[' << r.worst_index << "])\n";
    worst = std::max(worst, r.max_rel_error);
  }
  out << "max relative error " << std::scientific << std::setprecision(3) << worst
      << (worst < tol ? " PASS" : " FAIL") << '\n';
  return worst < tol ? 0 : 3;
}

int cmd_analyze_gates(const std::string& model_path, const std::string& data_path,
                      const std::string& gate, const std::string& out_path, std::ostream& out) {
  const Gate g = parse_gate(gate);
  const Checkpoint ck = load_checkpoint(model_path);
  if (ck.config.variant != Variant::syn_lstm_crf) {
    throw ContractError("analyze-gates needs a syn-lstm-crf checkpoint");
  }
  const Model model = restore(ck);
  const auto traces = collect_traces(model, eval_trees(parse_corpus(fs::path(data_path)), ck));
  const GateHistogram h = gate_histogram(traces, g);
  write_text(out_path, h.to_csv());
  out << "gate " << gate << " mean " << mean_gate(traces, g) << " over " << h.total()
      << " cells\n";
  return 0;
}

int cmd_compare_trees(const std::string& config_path, const std::string& data_path,
                      const std::string& sources, const std::string& out_path,
                      std::optional<std::uint64_t> seed, std::ostream& out) {
  const ModelConfig base = config_with_seed(config_path, seed);
  const auto specs = parse_tree_sources(sources);
  const Corpus data = parse_corpus(fs::path(data_path));
  std::vector<std::string> names;
  std::map<std::string, Checkpoint> checkpoints;
  std::map<std::string, Corpus> tests;
  for (const auto& spec : specs) {
    ModelConfig cfg = base;
    Corpus source_data = data;
    if (spec.name == "random") {
      cfg.tree_source = TreeSource::random;
    } else {
      cfg.tree_source = TreeSource::given;
      if (spec.name == "predicted") {
        source_data = override_trees(data, parse_corpus(fs::path(spec.predicted_path)));
      }
    }
    out << "# training with " << spec.name << " trees\n";
    TrainedSplit t = train_on_split(cfg, split_corpus(source_data), out);
    names.push_back(spec.name);
    checkpoints.emplace(spec.name, std::move(t.checkpoint));
    tests.emplace(spec.name, std::move(t.test));
  }
  const std::string csv = compare_tree_sources(names, checkpoints, tests).to_csv();
  out << csv;
  if (!out_path.empty()) write_text(out_path, csv);
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& data_path,
               const std::string& drop, const std::string& report_path,
               std::optional<std::uint64_t> seed, std::ostream& out) {
  const ModelConfig cfg = ablate_config(config_with_seed(config_path, seed), parse_ablation(drop));
  const TrainedSplit t = train_on_split(cfg, split_corpus(parse_corpus(fs::path(data_path))), out);
  const EvalReport report = evaluate(restore(t.checkpoint), t.test);
  out << "drop " << drop << ' ' << f1_line(report) << '\n';
  if (!report_path.empty()) write_text(report_path, report.to_csv());
  return 0;
}

int cmd_make_synthetic(const std::string& out_path, std::size_t sentences, std::uint64_t seed,
                       std::ostream& out) {
  write_corpus(out_path, make_synthetic_corpus(sentences, seed));
  out << "wrote " << sentences << " sentences to " << out_path << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Syn-LSTM-CRF sequence labeling toolkit", "synlstm"};
  app.require_subcommand(1, 1);

  std::string config, train_path, dev_path, out_path, model_path, data_path, report_path;
  std::string gate = "m", sources = "given,random", drop;
  std::optional<std::uint64_t> seed;
  std::uint64_t synth_seed = 0;
  std::size_t sentences = 0;
  double tol = 1e-4;

  auto* train_cmd = app.add_subcommand("train", "Train a model and save the best-dev checkpoint");
  train_cmd->add_option("--config", config, "Config file (key = value)")->required();
  train_cmd->add_option("--train", train_path, "Training corpus")->required();
  train_cmd->add_option("--dev", dev_path, "Development corpus")->required();
  train_cmd->add_option("--out", out_path, "Checkpoint output path")->required();
  train_cmd->add_option("--seed", seed, "Override the config seed");

  auto* eval_cmd = app.add_subcommand("eval", "Entity-level precision, recall and F1");
  eval_cmd->add_option("--model", model_path, "Checkpoint")->required();
  eval_cmd->add_option("--data", data_path, "Gold corpus")->required();
  eval_cmd->add_option("--report", report_path, "Write the full report as CSV");

  auto* predict_cmd = app.add_subcommand("predict", "Replace the label column with predictions");
  predict_cmd->add_option("--model", model_path, "Checkpoint")->required();
  predict_cmd->add_option("--data", data_path, "Input corpus")->required();
  predict_cmd->add_option("--out", out_path, "Output corpus")->required();

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every gradient");
  grad_cmd->add_option("--config", config, "Config file");
  grad_cmd->add_option("--tol", tol, "Maximum relative error")->capture_default_str();
  grad_cmd->add_option("--seed", seed, "Seed for the random instance");

  auto* gates_cmd = app.add_subcommand("analyze-gates", "Histogram of gate values");
  gates_cmd->add_option("--model", model_path, "Checkpoint")->required();
  gates_cmd->add_option("--data", data_path, "Corpus")->required();
  gates_cmd->add_option("--gate", gate, "Gate: f, i, m or o")->capture_default_str();
  gates_cmd->add_option("--out", out_path, "Histogram CSV")->required();

  auto* trees_cmd = app.add_subcommand("compare-trees", "Train and compare per tree source");
  trees_cmd->add_option("--config", config, "Config file")->required();
  trees_cmd->add_option("--data", data_path, "Corpus, split 4:1:1 into train/dev/test")->required();
  trees_cmd->add_option("--sources", sources, "given,random[,predicted=PATH]")->capture_default_str();
  trees_cmd->add_option("--out", out_path, "Write the comparison CSV");
  trees_cmd->add_option("--seed", seed, "Override the config seed");

  auto* ablate_cmd = app.add_subcommand("ablate", "Train and evaluate a reduced model");
  ablate_cmd->add_option("--config", config, "Config file")->required();
  ablate_cmd->add_option("--data", data_path, "Corpus, split 4:1:1 into train/dev/test")->required();
  ablate_cmd->add_option("--drop", drop,
                         "gcn-1-layer | gcn-all | deprel-embedding | pos-embedding | "
                         "original-dependency")
      ->required();
  ablate_cmd->add_option("--report", report_path, "Write the report as CSV");
  ablate_cmd->add_option("--seed", seed, "Override the config seed");

  auto* synth_cmd = app.add_subcommand("make-synthetic", "Write the graph-dependent toy corpus");
  synth_cmd->add_option("--out", out_path, "Output corpus")->required();
  synth_cmd->add_option("--sentences", sentences, "Number of sentences")->required();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*train_cmd) return cmd_train(config, train_path, dev_path, out_path, seed, out);
    if (*eval_cmd) return cmd_eval(model_path, data_path, report_path, out);
    if (*predict_cmd) return cmd_predict(model_path, data_path, out_path, out);
    if (*grad_cmd) return cmd_gradcheck(config, tol, seed, out);
    if (*gates_cmd) return cmd_analyze_gates(model_path, data_path, gate, out_path, out);
    if (*trees_cmd) return cmd_compare_trees(config, data_path, sources, out_path, seed, out);
    if (*ablate_cmd) return cmd_ablate(config, data_path, drop, report_path, seed, out);
    if (*synth_cmd) return cmd_make_synthetic(out_path, sentences, synth_seed, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace synlstm
