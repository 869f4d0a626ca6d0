#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "synlstm/crf.hpp"
#include "synlstm/error.hpp"
#include "synlstm/labels.hpp"
#include "test_util.hpp"

using namespace synlstm;
using crf::TagLattice;
using crf::Transitions;

namespace {

struct Instance {
  TagLattice lat;
  Transitions T;
};

Instance random_instance(std::size_t n, std::size_t L, std::mt19937_64& rng, double range = 3.0) {
  std::uniform_real_distribution<double> d(-range, range);
  Instance in;
  in.lat.n = n;
  in.lat.labels = L;
  for (std::size_t k = 0; k < n * L; ++k) in.lat.emissions.push_back(d(rng));
  std::vector<double> raw((L + 2) * (L + 2));
  for (double& v : raw) v = d(rng);
  in.T = crf::make_transitions(L, raw);
  return in;
}

// Independent enumeration: every sequence, its score, and the partition.
struct Enumerated {
  std::vector<std::vector<std::size_t>> paths;
  std::vector<double> scores;
  double log_z = 0.0;
};

double direct_score(const Instance& in, const std::vector<std::size_t>& y) {
  const std::size_t L = in.lat.labels;
  const auto& s = in.T.scores;
  const std::size_t w = L + 2;
  double total = s[L * w + y[0]] + s[y.back() * w + L + 1];
  for (std::size_t t = 0; t < y.size(); ++t) total += in.lat.emissions[t * L + y[t]];
  for (std::size_t t = 1; t < y.size(); ++t) total += s[y[t - 1] * w + y[t]];
  return total;
}

Enumerated enumerate(const Instance& in) {
  Enumerated e;
  const std::size_t n = in.lat.n, L = in.lat.labels;
  std::vector<std::size_t> y(n, 0);
  double mx = -INFINITY;
  while (true) {
    e.paths.push_back(y);
    e.scores.push_back(direct_score(in, y));
    mx = std::max(mx, e.scores.back());
    std::size_t k = n;
    while (k > 0 && ++y[k - 1] == L) y[--k] = 0;
    if (k == 0) break;
  }
  double acc = 0.0;
  for (double s : e.scores) acc += std::exp(s - mx);
  e.log_z = mx + std::log(acc);
  return e;
}

}  // namespace

TEST(CrfScore, HandComputedExample) {
  // L = 2, n = 2.
  std::vector<double> raw(16, 0.0);
  raw[2 * 4 + 0] = 0.5;   // START -> 0
  raw[0 * 4 + 1] = -1.0;  // 0 -> 1
  raw[1 * 4 + 3] = 2.0;   // 1 -> STOP
  const Transitions T = crf::make_transitions(2, raw);
  const TagLattice lat{2, 2, {1.0, 2.0, 3.0, 4.0}};
  const std::vector<std::size_t> y{0, 1};
  EXPECT_DOUBLE_EQ(crf::score_sequence(lat, T, y), 0.5 + 1.0 - 1.0 + 4.0 + 2.0);
  EXPECT_THROW(crf::score_sequence(lat, T, std::vector<std::size_t>{0}), ContractError);
  EXPECT_THROW(crf::score_sequence(lat, T, std::vector<std::size_t>{0, 2}), ContractError);
}

TEST(CrfPartition, ZeroScoresCountSequences) {
  const Transitions T = crf::make_transitions(3, std::vector<double>(25, 0.0));
  const TagLattice lat{4, 3, std::vector<double>(12, 0.0)};
  EXPECT_NEAR(crf::log_partition(lat, T), 4.0 * std::log(3.0), 1e-12);
}

TEST(CrfPartition, SingleLabelIsSingleScore) {
  const Transitions T = crf::make_transitions(1, std::vector<double>{0.3, 0.0, 0.7, 0.0, 0.0, 0.0,
                                                                     0.0, 0.0, 0.0});
  const TagLattice lat{3, 1, {1.0, 2.0, 3.0}};
  EXPECT_NEAR(crf::log_partition(lat, T), 0.3 * 2 + 0.7 + 6.0 + 0.0, 1e-12);
  EXPECT_NEAR(crf::nll(lat, T, std::vector<std::size_t>{0, 0, 0}), 0.0, 1e-12);
}

TEST(CrfPartition, EmptyLatticeIsRejected) {
  const Transitions T = crf::make_transitions(2, std::vector<double>(16, 0.0));
  EXPECT_THROW(crf::log_partition(TagLattice{0, 2, {}}, T), ContractError);
  EXPECT_THROW(crf::make_transitions(2, std::vector<double>(9, 0.0)), DimensionError);
}

TEST(CrfPartition, MatchesEnumeration) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const Instance in = random_instance(n, L, rng);
    const Enumerated e = enumerate(in);
    EXPECT_NEAR(crf::log_partition(in.lat, in.T), e.log_z, 1e-8);
    EXPECT_NEAR(crf::brute_force(in.lat, in.T).log_z, e.log_z, 1e-8);
    for (std::size_t k = 0; k < e.paths.size(); k += 7) {
      EXPECT_NEAR(crf::score_sequence(in.lat, in.T, e.paths[k]), e.scores[k], 1e-12);
    }
  }
}

TEST(CrfNll, ProbabilityOfGold) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = random_instance(4, 3, rng);
    const Enumerated e = enumerate(in);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, e.paths.size() - 1)(rng);
    const double nll = crf::nll(in.lat, in.T, e.paths[k]);
    EXPECT_GE(nll, 0.0);
    EXPECT_NEAR(std::exp(-nll), std::exp(e.scores[k] - e.log_z), 1e-10);
  }
}

TEST(CrfNll, LargeMarginGoldHasNearZeroLoss) {
  const Transitions T = crf::make_transitions(2, std::vector<double>(16, 0.0));
  const TagLattice lat{2, 2, {50.0, 0.0, 0.0, 50.0}};
  const double nll = crf::nll(lat, T, std::vector<std::size_t>{0, 1});
  EXPECT_GE(nll, 0.0);
  EXPECT_LT(nll, 1e-20);
}

TEST(CrfViterbi, ZeroTransitionsGivePositionwiseArgmax) {
  const Transitions T = crf::make_transitions(3, std::vector<double>(25, 0.0));
  const TagLattice lat{3, 3, {0.1, 0.9, 0.2, 1.0, 1.0, 0.0, -1.0, -2.0, -1.0}};
  const auto d = crf::viterbi(lat, T);
  EXPECT_EQ(d.path, (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_NEAR(d.score, 0.9 + 1.0 - 1.0, 1e-12);
}

TEST(CrfViterbi, MatchesEnumerationWithSmallestTieBreak) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    Instance in = random_instance(n, L, rng);
    if (trial % 3 == 0) {
      // Coarse integer scores produce ties.
      for (double& v : in.lat.emissions) v = std::round(v);
      for (double& v : in.T.scores) {
        if (std::isfinite(v)) v = std::round(v);
      }
    }
    const Enumerated e = enumerate(in);
    std::size_t best = 0;
    for (std::size_t k = 1; k < e.scores.size(); ++k) {
      if (e.scores[k] > e.scores[best]) best = k;  // enumeration order is lexicographic
    }
    const auto d = crf::viterbi(in.lat, in.T);
    EXPECT_EQ(d.path, e.paths[best]);
    EXPECT_NEAR(d.score, e.scores[best], 1e-10);
    EXPECT_EQ(crf::brute_force(in.lat, in.T).argmax, e.paths[best]);
  }
}

TEST(CrfMarginals, MatchEnumeration) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t L = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const Instance in = random_instance(n, L, rng);
    const Enumerated e = enumerate(in);
    std::vector<double> node(n * L, 0.0);
    for (std::size_t k = 0; k < e.paths.size(); ++k) {
      const double p = std::exp(e.scores[k] - e.log_z);
      for (std::size_t t = 0; t < n; ++t) node[t * L + e.paths[k][t]] += p;
    }
    const auto m = crf::marginals(in.lat, in.T);
    EXPECT_NEAR(m.log_z, e.log_z, 1e-8);
    for (std::size_t t = 0; t < n; ++t) {
      double row = 0.0;
      for (std::size_t y = 0; y < L; ++y) {
        EXPECT_NEAR(m.node[t * L + y], node[t * L + y], 1e-6);
        row += m.node[t * L + y];
      }
      EXPECT_NEAR(row, 1.0, 1e-10);
    }
  }
}

TEST(CrfInvariance, EmissionShiftMovesPartitionOnly) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Instance in = random_instance(5, 4, rng);
    const std::vector<std::size_t> y{0, 1, 2, 3, 0};
    const double z0 = crf::log_partition(in.lat, in.T), nll0 = crf::nll(in.lat, in.T, y);
    const auto path0 = crf::viterbi(in.lat, in.T).path;
    for (double& v : in.lat.emissions) v += 2.5;
    EXPECT_NEAR(crf::log_partition(in.lat, in.T), z0 + 5 * 2.5, 1e-10);
    EXPECT_NEAR(crf::nll(in.lat, in.T, y), nll0, 1e-10);
    EXPECT_EQ(crf::viterbi(in.lat, in.T).path, path0);
  }
}

TEST(CrfMask, BioesConstraints) {
  const std::vector<std::string> labels = bioes_label_set({"PER"});
  const auto mask = crf::bioes_transition_mask(labels);
  const std::size_t L = labels.size(), w = L + 2;
  auto id = [&](const std::string& l) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin());
  };
  auto ok = [&](std::size_t a, std::size_t b) { return mask[a * w + b] != 0; };
  EXPECT_FALSE(ok(id("O"), id("I-PER")));
  EXPECT_FALSE(ok(id("O"), id("E-PER")));
  EXPECT_TRUE(ok(id("B-PER"), id("E-PER")));
  EXPECT_FALSE(ok(id("B-PER"), id("O")));
  EXPECT_TRUE(ok(id("E-PER"), id("S-PER")));
  EXPECT_FALSE(ok(L, id("I-PER")));
  EXPECT_TRUE(ok(L, id("S-PER")));
  EXPECT_FALSE(ok(id("B-PER"), L + 1));
  EXPECT_TRUE(ok(id("O"), L + 1));

  // Every masked Viterbi path decodes to a legal BIOES sequence.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    TagLattice lat{6, L, {}};
    for (std::size_t k = 0; k < 6 * L; ++k) lat.emissions.push_back(d(rng));
    std::vector<double> raw(w * w);
    for (double& v : raw) v = d(rng);
    const auto path = crf::viterbi(lat, crf::make_transitions(L, raw, mask)).path;
    std::vector<std::string> tags;
    for (auto p : path) tags.push_back(labels[p]);
    EXPECT_TRUE(labels_valid(tags, Scheme::bioes));
  }
}

TEST(CrfLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  const std::size_t n = 4, L = 3;
  const ad::Tensor E = testutil::random_tensor({n, L}, rng);
  const ad::Tensor T = testutil::random_tensor({L + 2, L + 2}, rng);
  const std::vector<std::size_t> gold{2, 0, 1, 1};
  ad::Tape tape;
  tape.backward(crf::nll_loss(tape, E, T, gold));
  for (const auto& t : {E, T}) {
    const auto numeric = testutil::numeric_grad(t, [&] {
      ad::Tape probe;
      return crf::nll_loss(probe, E, T, gold)[0];
    });
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double a = t.grad()[k], b = numeric[k];
      EXPECT_TRUE(std::abs(a - b) < 1e-8 || testutil::rel_err(a, b) < 1e-6) << a << " vs " << b;
    }
  }
}

TEST(CrfLoss, EmissionGradientIsMarginalMinusGold) {
  std::mt19937_64 rng(8);
  const ad::Tensor E = testutil::random_tensor({3, 2}, rng);
  const ad::Tensor T = testutil::random_tensor({4, 4}, rng);
  const std::vector<std::size_t> gold{1, 1, 0};
  ad::Tape tape;
  tape.backward(crf::nll_loss(tape, E, T, gold));
  const auto m = crf::marginals(crf::lattice_from(E), crf::make_transitions(2, T.data()));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t y = 0; y < 2; ++y) {
      EXPECT_NEAR(E.grad()[t * 2 + y], m.node[t * 2 + y] - (gold[t] == y ? 1.0 : 0.0), 1e-12);
    }
  }
}
