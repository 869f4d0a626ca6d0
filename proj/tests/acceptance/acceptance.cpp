// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [path/to/synthetic.conf]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "synlstm/analysis.hpp"
#include "synlstm/checkpoint.hpp"
#include "synlstm/cli.hpp"
#include "synlstm/crf.hpp"
#include "synlstm/gradcheck.hpp"
#include "synlstm/graph.hpp"
#include "synlstm/syn_lstm.hpp"
#include "synlstm/synthetic.hpp"
#include "synlstm/trainer.hpp"
#include "synlstm/trees.hpp"

#ifndef SYNLSTM_SOURCE_DIR
#define SYNLSTM_SOURCE_DIR "."
#endif

using namespace synlstm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << name << ':' << v.detail.str()
            << " (" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)"
            << std::endl;
}

std::mt19937_64& rng_for(std::uint64_t seed) {
  static std::mt19937_64 rng;
  rng.seed(seed);
  return rng;
}

ad::Tensor uniform(ad::Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(ad::shape_size(shape));
  for (double& x : v) x = d(rng);
  return ad::Tensor(std::move(shape), std::move(v));
}

void randomize(const std::vector<ad::Tensor>& tensors, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (const auto& t : tensors) {
    for (double& v : t.data_mut()) v = d(rng);
  }
}

// ---- 1 ---------------------------------------------------------------------

void gradient_suite(Verdict& v) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& r : gradcheck_all(ModelConfig{})) {
    v.detail << ' ' << variant_name(r.variant) << '=' << std::scientific << std::setprecision(2)
             << r.max_rel_error << " over " << r.checked;
    v.require(r.checked > 0, "no entries checked");
    worst = std::max(worst, r.max_rel_error);
  }
  const double secs = seconds_since(t0);
  v.require(worst < 1e-4, "max relative error < 1e-4");
  v.require(secs < 120.0, "runtime < 2 min");
}

// ---- 2 ---------------------------------------------------------------------

void expansion_identity(Verdict& v) {
  std::mt19937_64& rng = rng_for(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const std::size_t H = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const std::size_t dx = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t dg = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    ParamStore store;
    const SynLstmParams p = make_syn_lstm_params(store, "s", dx, dg, H, rng);
    std::vector<ad::Tensor> all;
    for (const auto& [name, t] : store.entries()) all.push_back(t);
    randomize(all, rng);
    const ad::Tensor x = uniform({n, dx}, rng, -2, 2), g = uniform({n, dg}, rng, -2, 2);
    ad::Tape tape;
    CellState s = zero_state(1, H);
    for (std::size_t t = 0; t < n; ++t) {
      s = syn_lstm_step(tape, ad::slice_rows(tape, x, t, 1), ad::slice_rows(tape, g, t, 1), s, p);
      const CellExpansion e = expand_cell_state(x, g, p, t);
      for (std::size_t k = 0; k < H; ++k) worst = std::max(worst, std::abs(e.c[k] - s.c[k]));
    }
  }
  v.detail << " max |c - expansion| = " << std::scientific << std::setprecision(2) << worst;
  v.require(worst <= 1e-10, "within 1e-10");
}

// ---- 3 ---------------------------------------------------------------------

struct Enumeration {
  double log_z = 0.0;
  std::vector<std::size_t> argmax;
  std::vector<double> node;
};

// Scores every label sequence directly from the definition.
Enumeration enumerate(const crf::TagLattice& lat, const crf::Transitions& T) {
  const std::size_t n = lat.n, L = lat.labels;
  std::vector<std::vector<std::size_t>> paths;
  std::vector<double> scores;
  std::vector<std::size_t> y(n, 0);
  while (true) {
    double s = T.at(T.start(), y[0]) + T.at(y[n - 1], T.stop());
    for (std::size_t t = 0; t < n; ++t) s += lat.at(t, y[t]);
    for (std::size_t t = 1; t < n; ++t) s += T.at(y[t - 1], y[t]);
    paths.push_back(y);
    scores.push_back(s);
    std::size_t k = n;
    while (k > 0 && ++y[k - 1] == L) y[--k] = 0;
    if (k == 0) break;
  }
  Enumeration e;
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  e.argmax = paths[best];
  double acc = 0.0;
  for (double s : scores) acc += std::exp(s - scores[best]);
  e.log_z = scores[best] + std::log(acc);
  e.node.assign(n * L, 0.0);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const double p = std::exp(scores[k] - e.log_z);
    for (std::size_t t = 0; t < n; ++t) e.node[t * L + paths[k][t]] += p;
  }
  return e;
}

void crf_oracle(Verdict& v) {
  std::mt19937_64& rng = rng_for(3);
  double z_err = 0.0, m_err = 0.0;
  std::size_t path_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const ad::Tensor E = uniform({n, L}, rng, -3, 3);
    E.set_requires_grad(true);
    const ad::Tensor raw = uniform({L + 2, L + 2}, rng, -3, 3);
    const crf::TagLattice lat = crf::lattice_from(E);
    const crf::Transitions T = crf::make_transitions(L, raw.data());
    const Enumeration e = enumerate(lat, T);

    z_err = std::max(z_err, std::abs(crf::log_partition(lat, T) - e.log_z));
    if (crf::viterbi(lat, T).path != e.argmax) ++path_mismatch;

    // d logZ / dE = d NLL / dE + onehot(gold).
    std::vector<std::size_t> gold(n);
    for (auto& y : gold) y = std::uniform_int_distribution<std::size_t>(0, L - 1)(rng);
    ad::Tape tape;
    tape.backward(crf::nll_loss(tape, E, raw, gold));
    const crf::Marginals fb = crf::marginals(lat, T);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t y = 0; y < L; ++y) {
        const double dlogz = E.grad()[t * L + y] + (gold[t] == y ? 1.0 : 0.0);
        m_err = std::max(m_err, std::abs(dlogz - e.node[t * L + y]));
        m_err = std::max(m_err, std::abs(fb.node[t * L + y] - e.node[t * L + y]));
      }
    }
  }
  v.detail << " max |logZ err| = " << std::scientific << std::setprecision(2) << z_err
           << ", viterbi mismatches = " << path_mismatch << ", max marginal err = " << m_err;
  v.require(z_err < 1e-8, "logZ within 1e-8");
  v.require(path_mismatch == 0, "viterbi equals brute force");
  v.require(m_err <= 1e-6, "marginals within 1e-6");
}

// ---- 4 ---------------------------------------------------------------------

GcnParams random_gcn(ParamStore& store, std::size_t in, std::size_t hidden, std::size_t layers,
                     std::mt19937_64& rng) {
  GcnParams p = make_gcn_params(store, "g", in, hidden, layers, rng);
  for (auto& l : p.layers) randomize({l.b}, rng);
  return p;
}

void gcn_properties(Verdict& v) {
  std::mt19937_64& rng = rng_for(4);
  double perm_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ParamStore store;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const GcnParams p = random_gcn(store, 5, 4, 2, rng);
    const auto heads = random_tree_heads(n, rng);
    const ad::Tensor g = uniform({n, 5}, rng, -2, 2);
    std::vector<std::size_t> perm(n), inv(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t k = 0; k < n; ++k) inv[perm[k]] = k;
    std::vector<int> pheads(n);
    std::vector<double> pg(n * 5);
    for (std::size_t k = 0; k < n; ++k) {
      const int h = heads[perm[k]];
      pheads[k] = h == 0 ? 0 : static_cast<int>(inv[h - 1] + 1);
      for (std::size_t c = 0; c < 5; ++c) pg[k * 5 + c] = g.at(perm[k], c);
    }
    ad::Tape tape;
    const ad::Tensor out =
        gcn_encode(tape, g, gcn_weights(build_adjacency(heads), GcnAggregation::neighbors), p);
    const ad::Tensor pout = gcn_encode(
        tape, ad::Tensor({n, 5}, pg), gcn_weights(build_adjacency(pheads), GcnAggregation::neighbors), p);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t c = 0; c < 4; ++c) {
        perm_err = std::max(perm_err, std::abs(pout.at(k, c) - out.at(perm[k], c)));
      }
    }
  }

  // Chain trees: output t must not depend on inputs more than L hops away.
  std::size_t leaks = 0, reached = 0, expected_reach = 0;
  for (std::size_t layers = 1; layers <= 3; ++layers) {
    const std::size_t n = 8;
    std::vector<int> chain(n);
    for (std::size_t k = 0; k < n; ++k) chain[k] = static_cast<int>(k);
    ParamStore store;
    const GcnParams p = random_gcn(store, 3, 4, layers, rng);
    for (auto& l : p.layers) {
      for (double& b : l.b.data_mut()) b = std::abs(b) + 1.0;  // units stay active
    }
    for (auto& l : p.layers) {
      for (double& w : l.W.data_mut()) w = std::abs(w) + 0.1;
    }
    for (std::size_t t = 0; t < n; ++t) {
      const ad::Tensor g = uniform({n, 3}, rng, 0.0, 1.0);
      g.set_requires_grad(true);
      ad::Tape tape;
      const ad::Tensor out =
          gcn_encode(tape, g, gcn_weights(build_adjacency(chain), GcnAggregation::neighbors), p);
      tape.backward(ad::sum(tape, ad::slice_rows(tape, out, t, 1)));
      for (std::size_t s = 0; s < n; ++s) {
        const std::size_t dist = s > t ? s - t : t - s;
        double sens = 0.0;
        for (std::size_t c = 0; c < 3; ++c) sens += std::abs(g.grad()[s * 3 + c]);
        if (dist > layers && sens != 0.0) ++leaks;
        if (dist <= layers) {
          ++expected_reach;
          if (sens > 0.0) ++reached;
        }
      }
    }
  }

  // Identity weights on all-ones input: each row sums d_t copies of 1/d_t.
  double norm_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    const auto heads = random_tree_heads(n, rng);
    GcnLayerParams l{ad::Tensor::matrix(2, 2, {1, 0, 0, 1}), ad::Tensor(ad::Shape{2})};
    ad::Tape tape;
    const ad::Tensor out = gcn_layer(tape, ad::Tensor({n, 2}, std::vector<double>(n * 2, 1.0)),
                                     gcn_weights(build_adjacency(heads), GcnAggregation::neighbors), l);
    for (double x : out.data()) norm_err = std::max(norm_err, std::abs(x - 1.0));
  }

  v.detail << " permutation err = " << std::scientific << std::setprecision(2) << perm_err
           << ", out-of-range sensitivities = " << leaks << ", in-range reached = " << reached << '/'
           << expected_reach << ", normalisation err = " << norm_err;
  v.require(perm_err <= 1e-12, "permutation equivariance within 1e-12");
  v.require(leaks == 0, "zero sensitivity beyond L hops");
  v.require(reached == expected_reach, "nonzero sensitivity within L hops");
  v.require(norm_err <= 1e-15, "degree normalisation");
}

// ---- 5, 6 ------------------------------------------------------------------

struct SeedOutcome {
  double given_train = 0.0, given_test = 0.0, bilstm_test = 0.0, random_test = 0.0;
  double m_given = 0.0, m_random = 0.0;
};

std::vector<SeedOutcome> synthetic_outcomes;
double synthetic_seconds = 0.0;
std::string synthetic_error;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Split randomized(const Split& s, std::uint64_t seed) {
  const auto rels = relation_set(s.train);
  const std::uint64_t base = seed * 1000003ULL;
  return {randomize_trees(s.train, rels, base + 1), randomize_trees(s.dev, rels, base + 2),
          randomize_trees(s.test, rels, base + 3)};
}

void run_synthetic(const ModelConfig& base, const fs::path& workdir) {
  const auto t0 = Clock::now();
  const fs::path data = workdir / "synthetic.conll";
  const std::string path = data.string();
  const char* argv[] = {"synlstm", "make-synthetic", "--out", path.c_str(), "--sentences", "300",
                        "--seed", "11"};
  std::ostringstream out, err;
  if (run_cli(8, argv, out, err) != 0) throw std::runtime_error("make-synthetic: " + err.str());
  const Split split = split_corpus(parse_corpus(data));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SeedOutcome o;
    ModelConfig cfg = base;
    cfg.seed = seed;
    {
      const Model m = restore(train(cfg, split.train, split.dev).best);
      o.given_train = evaluate(m, split.train).f1();
      o.given_test = evaluate(m, split.test).f1();
      o.m_given = mean_gate(collect_traces(m, split.test), Gate::m);
    }
    {
      ModelConfig c = cfg;
      c.variant = Variant::bilstm_crf;
      o.bilstm_test = evaluate(restore(train(c, split.train, split.dev).best), split.test).f1();
    }
    {
      ModelConfig c = cfg;
      c.tree_source = TreeSource::random;
      const Split r = randomized(split, seed);
      const Model m = restore(train(c, r.train, r.dev).best);
      o.random_test = evaluate(m, r.test).f1();
      o.m_random = mean_gate(collect_traces(m, r.test), Gate::m);
    }
    std::cout << "  seed " << seed << std::fixed << std::setprecision(4) << ": given train F1 "
              << o.given_train << ", test F1 given " << o.given_test << " / bilstm "
              << o.bilstm_test << " / random " << o.random_test << ", mean m given "
              << o.m_given << " / random " << o.m_random << std::endl;
    synthetic_outcomes.push_back(o);
  }
  synthetic_seconds = seconds_since(t0);
}

void synthetic_direction(Verdict& v) {
  if (!synthetic_error.empty()) throw std::runtime_error(synthetic_error);
  std::vector<double> train_f1, given, bilstm, random;
  for (const auto& o : synthetic_outcomes) {
    train_f1.push_back(o.given_train);
    given.push_back(o.given_test);
    bilstm.push_back(o.bilstm_test);
    random.push_back(o.random_test);
  }
  const double min_train = *std::min_element(train_f1.begin(), train_f1.end());
  v.detail << std::fixed << std::setprecision(4) << " min train F1 " << min_train
           << ", median test F1 given " << median(given) << " / bilstm " << median(bilstm)
           << " / random " << median(random) << ", runtime " << std::setprecision(0)
           << synthetic_seconds << " s";
  v.require(min_train >= 0.99, "train F1 >= 0.99 for every seed");
  v.require(median(given) > median(bilstm), "given beats bilstm");
  v.require(median(given) > median(random), "given beats random trees");
  v.require(synthetic_seconds < 600.0, "runtime < 10 min");
}

void gate_direction(Verdict& v) {
  if (!synthetic_error.empty()) throw std::runtime_error(synthetic_error);
  std::vector<double> given, random;
  for (const auto& o : synthetic_outcomes) {
    given.push_back(o.m_given);
    random.push_back(o.m_random);
  }
  v.detail << std::fixed << std::setprecision(4) << " median mean m given " << median(given)
           << " / random " << median(random);
  v.require(median(given) > median(random), "given-tree m exceeds random-tree m");
}

// ---- 7 ---------------------------------------------------------------------

void determinism(Verdict& v, const ModelConfig& base, const fs::path& workdir) {
  ModelConfig cfg = base;
  cfg.epochs = 5;
  cfg.dropout = 0.3;  // exercises the dropout stream too
  const fs::path conf = workdir / "determinism.conf";
  std::ofstream(conf) << config_to_text(cfg);
  const Split split = split_corpus(make_synthetic_corpus(60, 5));
  write_corpus(workdir / "train.conll", split.train);
  write_corpus(workdir / "dev.conll", split.dev);

  auto cli_train = [&](const std::string& out_name, std::string& log) {
    const std::string c = conf.string(), tr = (workdir / "train.conll").string(),
                      dv = (workdir / "dev.conll").string(), o = (workdir / out_name).string();
    const char* argv[] = {"synlstm", "train", "--config", c.c_str(), "--train", tr.c_str(),
                          "--dev", dv.c_str(), "--out", o.c_str()};
    std::ostringstream out, err;
    const int code = run_cli(10, argv, out, err);
    if (code != 0) throw std::runtime_error("train exited " + std::to_string(code) + ": " + err.str());
    log = out.str();
    return load_checkpoint(workdir / out_name);
  };
  std::string log_a, log_b;
  const Checkpoint a = cli_train("a.bin", log_a);
  const Checkpoint b = cli_train("b.bin", log_b);
  v.require(a.summary.loss_curve == b.summary.loss_curve, "identical loss curves");
  v.require(a.summary.dev_f1_curve == b.summary.dev_f1_curve, "identical dev curves");
  v.require(log_a == log_b, "identical training logs");
  v.require(a.summary.loss_curve.size() == cfg.epochs, "one loss per epoch");

  const TrainResult lib = train(cfg, split.train, split.dev);
  v.require(lib.best.summary.loss_curve == a.summary.loss_curve, "library and CLI agree");

  const Model reloaded = restore(a);
  const double f1 = evaluate(reloaded, split.dev).f1();
  v.detail << std::setprecision(17) << " best dev F1 " << a.summary.best_dev_f1
           << ", reloaded " << f1;
  v.require(f1 == a.summary.best_dev_f1, "reloaded dev F1 equals stored");
}

// ---- 8 ---------------------------------------------------------------------

void lr_schedule(Verdict& v) {
  const ModelConfig d;
  v.require(d.lr == 0.2 && d.decay == 0.1, "defaults lr 0.2, decay 0.1");
  v.require(epoch_lr(1, d.lr, d.decay) == 0.2, "epoch 1 rate is 0.2");
  std::size_t mismatches = 0;
  for (std::size_t e = 1; e <= 1000; ++e) {
    if (epoch_lr(e, d.lr, d.decay) != 0.2 / (1.0 + 0.1 * static_cast<double>(e - 1))) ++mismatches;
  }
  v.detail << " epochs 1..1000 checked, mismatches " << mismatches << ", epoch 11 = "
           << epoch_lr(11, d.lr, d.decay);
  v.require(mismatches == 0, "exact schedule");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path config_path =
      argc > 1 ? fs::path(argv[1]) : fs::path(SYNLSTM_SOURCE_DIR) / "configs" / "synthetic.conf";
  const fs::path workdir = fs::temp_directory_path() / ("synlstm_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(workdir);

  ModelConfig synthetic;
  try {
    synthetic = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "cannot load " << config_path << ": " << e.what() << '\n';
    return 2;
  }

  report(1, "gradient suite", gradient_suite);
  report(2, "expansion identity", expansion_identity);
  report(3, "CRF oracle equivalence", crf_oracle);
  report(4, "GCN properties", gcn_properties);
  try {
    run_synthetic(synthetic, workdir);
  } catch (const std::exception& e) {
    synthetic_error = e.what();
  }
  report(5, "synthetic graph-dependent corpus", synthetic_direction);
  report(6, "gate regulation direction", gate_direction);
  report(7, "determinism and round trip", [&](Verdict& v) { determinism(v, synthetic, workdir); });
  report(8, "learning-rate schedule", lr_schedule);

  std::error_code ec;
  fs::remove_all(workdir, ec);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
