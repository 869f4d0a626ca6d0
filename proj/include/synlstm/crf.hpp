#pragma once

// Linear-chain CRF over L labels with virtual START (id L) and STOP (id L+1)
// states:
//
//   score(y) = T[START][y_1] + sum_t T[y_t][y_{t+1}] + T[y_n][STOP] + sum_t E[t][y_t]
//   P(y) = exp(score(y)) / sum_y' exp(score(y'))
//
// All lattice arithmetic is in log space.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "synlstm/tape.hpp"

namespace synlstm::crf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> values);

// n x L emission scores.
struct TagLattice {
  std::size_t n = 0;
  std::size_t labels = 0;
  std::vector<double> emissions;

  double at(std::size_t t, std::size_t y) const { return emissions[t * labels + y]; }
};

// (L+2) x (L+2) transition scores, row = from, column = to.
struct Transitions {
  std::size_t labels = 0;
  std::vector<double> scores;

  std::size_t start() const { return labels; }
  std::size_t stop() const { return labels + 1; }
  std::size_t width() const { return labels + 2; }
  double at(std::size_t from, std::size_t to) const { return scores[from * width() + to]; }
  double& at(std::size_t from, std::size_t to) { return scores[from * width() + to]; }
};

// Copies raw scores and forces entries into START and out of STOP to -inf.
// When `allowed` is non-empty it is an (L+2) x (L+2) 0/1 mask; disallowed
// entries become -inf as well.
Transitions make_transitions(std::size_t labels, std::span<const double> raw,
                             std::span<const unsigned char> allowed = {});

// 0/1 mask forbidding transitions that are illegal under BIOES for the given
// label strings (e.g. O -> I-X, START -> E-X, B-X -> STOP).
std::vector<unsigned char> bioes_transition_mask(const std::vector<std::string>& labels);

double score_sequence(const TagLattice& lattice, const Transitions& T,
                      std::span<const std::size_t> y);

// Forward algorithm.
double log_partition(const TagLattice& lattice, const Transitions& T);

// log_partition - score_sequence(gold) = -log P(gold).
double nll(const TagLattice& lattice, const Transitions& T, std::span<const std::size_t> gold);

struct Decoded {
  std::vector<std::size_t> path;
  double score = 0.0;
};

// Best-scoring path. Among equally scoring paths the lexicographically
// smallest label sequence is returned.
Decoded viterbi(const TagLattice& lattice, const Transitions& T);

struct Marginals {
  double log_z = 0.0;
  std::vector<double> node;  // n x L, P(y_t = l)
  std::vector<double> edge;  // (L+2) x (L+2), expected transition counts
};

// Forward-backward posteriors; node marginals equal d logZ / d E.
Marginals marginals(const TagLattice& lattice, const Transitions& T);

struct BruteForce {
  double log_z = 0.0;
  std::vector<std::size_t> argmax;
  double best_score = 0.0;
};

inline constexpr std::size_t kBruteForceLimit = 1000000;

// Enumerates all L^n sequences (requires L^n <= 10^6). Ties go to the
// lexicographically smallest sequence.
BruteForce brute_force(const TagLattice& lattice, const Transitions& T);

// Differentiable NLL: emissions [n x L], raw transitions [(L+2) x (L+2)].
// `allowed` has the same meaning as in make_transitions.
ad::Tensor nll_loss(ad::Tape& tape, const ad::Tensor& emissions, const ad::Tensor& transitions,
                    std::span<const std::size_t> gold, std::span<const unsigned char> allowed = {});

TagLattice lattice_from(const ad::Tensor& emissions);

}  // namespace synlstm::crf
