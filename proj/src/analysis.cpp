#include "synlstm/analysis.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "synlstm/error.hpp"
#include "synlstm/trainer.hpp"

namespace synlstm {

Gate parse_gate(const std::string& s) {
  if (s == "f") return Gate::f;
  if (s == "i") return Gate::i;
  if (s == "m") return Gate::m;
  if (s == "o") return Gate::o;
  throw ContractError("unknown gate '" + s + "' (expected f, i, m or o)");
}

std::string gate_name(Gate g) {
  switch (g) {
    case Gate::f: return "f";
    case Gate::i: return "i";
    case Gate::m: return "m";
    case Gate::o: return "o";
  }
  return "?";
}

const std::array<double, GateHistogram::kBuckets + 1>& GateHistogram::edges() {
  static const std::array<double, kBuckets + 1> e{0.0, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  return e;
}

std::size_t GateHistogram::bucket_of(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << "gate value " << v << " outside [0,1]";
    throw DataIntegrityError(msg.str());
  }
  const auto& e = edges();
  for (std::size_t b = 1; b < kBuckets; ++b) {
    if (v < e[b]) return b - 1;
  }
  return kBuckets - 1;
}

std::size_t GateHistogram::total() const {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

std::string GateHistogram::to_csv() const {
  std::ostringstream os;
  os << "bucket_low,bucket_high,count\n";
  for (std::size_t b = 0; b < kBuckets; ++b) {
    os << edges()[b] << ',' << edges()[b + 1] << ',' << counts[b] << '\n';
  }
  return os.str();
}

namespace {
const std::vector<double>& gate_values(const GateTrace::Step& s, Gate g) {
  switch (g) {
    case Gate::f: return s.f;
    case Gate::i: return s.i;
    case Gate::m: return s.m;
    case Gate::o: return s.o;
  }
  return s.f;
}
}  // namespace

GateHistogram gate_histogram(const std::vector<GateTrace>& traces, Gate gate) {
  if (traces.empty()) throw ContractError("gate_histogram: no traces");
  GateHistogram h;
  for (const auto& tr : traces) {
    for (const auto& step : tr.steps) {
      for (double v : gate_values(step, gate)) ++h.counts[GateHistogram::bucket_of(v)];
    }
  }
  return h;
}

double mean_gate(const std::vector<GateTrace>& traces, Gate gate) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& tr : traces) {
    for (const auto& step : tr.steps) {
      for (double v : gate_values(step, gate)) {
        sum += v;
        ++count;
      }
    }
  }
  if (count == 0) throw ContractError("mean_gate: no gate values");
  return sum / static_cast<double>(count);
}

Split split_corpus(const Corpus& corpus) {
  const std::size_t n = corpus.size();
  if (n < 3) throw ContractError("split_corpus: need at least 3 sentences");
  const std::size_t n_train = n * 4 / 6;
  const std::size_t n_dev = (n - n_train) / 2;
  Split s;
  s.train.assign(corpus.begin(), corpus.begin() + n_train);
  s.dev.assign(corpus.begin() + n_train, corpus.begin() + n_train + n_dev);
  s.test.assign(corpus.begin() + n_train + n_dev, corpus.end());
  return s;
}

std::vector<TreeSourceSpec> parse_tree_sources(const std::string& list) {
  std::vector<TreeSourceSpec> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "given" || item == "random") {
      out.push_back({item, ""});
    } else if (item.rfind("predicted=", 0) == 0 && item.size() > 10) {
      out.push_back({"predicted", item.substr(10)});
    } else {
      throw ContractError("unknown tree source '" + item + "'");
    }
  }
  if (out.empty()) throw ContractError("no tree sources given");
  return out;
}

std::string TreeComparison::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "metric,bucket,value\n";
  for (const auto& s : sources) {
    os << "f1,source:" << s.source << ',' << s.f1 << '\n';
    os << "mean_m,source:" << s.source << ',' << s.mean_m << '\n';
  }
  for (const auto& [a, b, d] : deltas) os << "f1_delta," << a << '-' << b << ',' << d << '\n';
  return os.str();
}

TreeComparison compare_tree_sources(const std::vector<std::string>& sources,
                                    const std::map<std::string, Checkpoint>& checkpoints,
                                    const std::map<std::string, Corpus>& test_by_source) {
  TreeComparison cmp;
  for (const auto& src : sources) {
    const auto ck = checkpoints.find(src);
    if (ck == checkpoints.end()) throw ContractError("no checkpoint for tree source '" + src + "'");
    const auto test = test_by_source.find(src);
    if (test == test_by_source.end()) throw ContractError("no test corpus for tree source '" + src + "'");
    const Model model = restore(ck->second);
    TreeSourceResult r;
    r.source = src;
    r.f1 = evaluate(model, test->second).f1();
    const auto traces = collect_traces(model, test->second);
    r.mean_m = traces.empty() ? 0.0 : mean_gate(traces, Gate::m);
    cmp.sources.push_back(r);
  }
  for (std::size_t a = 0; a < cmp.sources.size(); ++a) {
    for (std::size_t b = a + 1; b < cmp.sources.size(); ++b) {
      cmp.deltas.emplace_back(cmp.sources[a].source, cmp.sources[b].source,
                              cmp.sources[a].f1 - cmp.sources[b].f1);
    }
  }
  return cmp;
}

double bootstrap_test(const LabelRows& gold, const LabelRows& pred_a, const LabelRows& pred_b,
                      std::size_t resamples, std::uint64_t seed, Scheme scheme) {
  if (resamples < 100) throw ContractError("bootstrap_test: at least 100 resamples required");
  if (gold.size() != pred_a.size() || gold.size() != pred_b.size()) {
    throw ContractError("bootstrap_test: corpora are not aligned");
  }
  const std::size_t n = gold.size();
  if (n == 0) return 1.0;
  // Per-sentence counts in a canonical order, so that the result does not
  // depend on how the corpus happens to be ordered.
  std::vector<std::pair<Counts, Counts>> per(n);
  Counts ta, tb;
  for (std::size_t i = 0; i < n; ++i) {
    per[i] = {sentence_counts(gold[i], pred_a[i], scheme), sentence_counts(gold[i], pred_b[i], scheme)};
    ta += per[i].first;
    tb += per[i].second;
  }
  auto key = [](const std::pair<Counts, Counts>& p) {
    return std::array<std::size_t, 6>{p.first.tp, p.first.fp, p.first.fn,
                                      p.second.tp, p.second.fp, p.second.fn};
  };
  std::sort(per.begin(), per.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });

  const double observed = ta.f1() - tb.f1();
  if (observed == 0.0) return 1.0;
  std::size_t reversed = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (r + 1));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    Counts ca, cb;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& s = per[pick(rng)];
      ca += s.first;
      cb += s.second;
    }
    const double delta = ca.f1() - cb.f1();
    if ((observed > 0.0 && delta <= 0.0) || (observed < 0.0 && delta >= 0.0)) ++reversed;
  }
  return static_cast<double>(reversed) / static_cast<double>(resamples);
}

Ablation parse_ablation(const std::string& s) {
  if (s == "gcn-1-layer") return Ablation::gcn_1_layer;
  if (s == "gcn-all") return Ablation::gcn_all;
  if (s == "deprel-embedding") return Ablation::deprel_embedding;
  if (s == "pos-embedding") return Ablation::pos_embedding;
  if (s == "original-dependency") return Ablation::original_dependency;
  throw ContractError("unknown ablation '" + s + "'");
}

std::string ablation_name(Ablation a) {
  switch (a) {
    case Ablation::gcn_1_layer: return "gcn-1-layer";
    case Ablation::gcn_all: return "gcn-all";
    case Ablation::deprel_embedding: return "deprel-embedding";
    case Ablation::pos_embedding: return "pos-embedding";
    case Ablation::original_dependency: return "original-dependency";
  }
  return "?";
}

ModelConfig ablate_config(const ModelConfig& cfg, Ablation drop) {
  ModelConfig out = cfg;
  switch (drop) {
    case Ablation::gcn_1_layer: out.gcn_layers = 1; break;
    case Ablation::gcn_all: out.graph_input = GraphInput::zeros; break;
    case Ablation::deprel_embedding: out.use_deprel = false; break;
    case Ablation::pos_embedding: out.use_pos = false; break;
    case Ablation::original_dependency: out.tree_source = TreeSource::random; break;
  }
  return out;
}

}  // namespace synlstm
