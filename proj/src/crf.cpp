#include "synlstm/crf.hpp"

#include <algorithm>
#include <cmath>

#include "synlstm/error.hpp"
#include "synlstm/labels.hpp"

namespace synlstm::crf {

double logsumexp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - hi);
  return hi + std::log(s);
}

Transitions make_transitions(std::size_t labels, std::span<const double> raw,
                             std::span<const unsigned char> allowed) {
  Transitions T;
  T.labels = labels;
  const std::size_t w = labels + 2;
  if (raw.size() != w * w) {
    throw DimensionError("transitions: expected " + std::to_string(w) + "x" + std::to_string(w) +
                         " scores, got " + std::to_string(raw.size()));
  }
  if (!allowed.empty() && allowed.size() != w * w) {
    throw DimensionError("transitions: mask size mismatch");
  }
  T.scores.assign(raw.begin(), raw.end());
  for (std::size_t i = 0; i < w; ++i) {
    T.at(i, T.start()) = kNegInf;
    T.at(T.stop(), i) = kNegInf;
  }
  if (!allowed.empty()) {
    for (std::size_t k = 0; k < w * w; ++k) {
      if (!allowed[k]) T.scores[k] = kNegInf;
    }
  }
  return T;
}

std::vector<unsigned char> bioes_transition_mask(const std::vector<std::string>& labels) {
  const std::size_t L = labels.size();
  const std::size_t w = L + 2;
  std::vector<Tag> tags;
  for (const std::string& l : labels) tags.push_back(parse_tag(l));
  // Which tags may open a sentence / close a sentence.
  auto can_start = [](const Tag& t) { return t.prefix == 'O' || t.prefix == 'B' || t.prefix == 'S'; };
  auto can_end = [](const Tag& t) { return t.prefix == 'O' || t.prefix == 'E' || t.prefix == 'S'; };
  auto can_follow = [](const Tag& a, const Tag& b) {
    const bool open = a.prefix == 'B' || a.prefix == 'I';
    if (open) return (b.prefix == 'I' || b.prefix == 'E') && b.type == a.type;
    return b.prefix == 'O' || b.prefix == 'B' || b.prefix == 'S';
  };
  std::vector<unsigned char> mask(w * w, 1);
  for (std::size_t a = 0; a < L; ++a) {
    mask[L * w + a] = can_start(tags[a]);
    mask[a * w + L + 1] = can_end(tags[a]);
    for (std::size_t b = 0; b < L; ++b) mask[a * w + b] = can_follow(tags[a], tags[b]);
  }
  return mask;
}

namespace {

void check_lattice(const TagLattice& lat, const Transitions& T) {
  if (lat.n == 0) throw ContractError("CRF lattice must have n >= 1");
  if (lat.labels != T.labels) throw DimensionError("CRF lattice and transitions disagree on L");
  if (lat.emissions.size() != lat.n * lat.labels) throw DimensionError("CRF emissions size");
}

std::vector<double> forward_scores(const TagLattice& lat, const Transitions& T) {
  const std::size_t L = lat.labels;
  std::vector<double> alpha(lat.n * L);
  for (std::size_t y = 0; y < L; ++y) alpha[y] = T.at(T.start(), y) + lat.at(0, y);
  std::vector<double> tmp(L);
  for (std::size_t t = 1; t < lat.n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p) tmp[p] = alpha[(t - 1) * L + p] + T.at(p, y);
      alpha[t * L + y] = logsumexp(tmp) + lat.at(t, y);
    }
  }
  return alpha;
}

std::vector<double> backward_scores(const TagLattice& lat, const Transitions& T) {
  const std::size_t L = lat.labels;
  std::vector<double> beta(lat.n * L);
  for (std::size_t y = 0; y < L; ++y) beta[(lat.n - 1) * L + y] = T.at(y, T.stop());
  std::vector<double> tmp(L);
  for (std::size_t t = lat.n - 1; t-- > 0;) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t q = 0; q < L; ++q) {
        tmp[q] = T.at(y, q) + lat.at(t + 1, q) + beta[(t + 1) * L + q];
      }
      beta[t * L + y] = logsumexp(tmp);
    }
  }
  return beta;
}

double final_logz(const TagLattice& lat, const Transitions& T, const std::vector<double>& alpha) {
  const std::size_t L = lat.labels;
  std::vector<double> tmp(L);
  for (std::size_t y = 0; y < L; ++y) tmp[y] = alpha[(lat.n - 1) * L + y] + T.at(y, T.stop());
  return logsumexp(tmp);
}

}  // namespace

double score_sequence(const TagLattice& lat, const Transitions& T, std::span<const std::size_t> y) {
  check_lattice(lat, T);
  if (y.size() != lat.n) throw ContractError("score_sequence: label sequence length mismatch");
  for (std::size_t v : y) {
    if (v >= lat.labels) throw ContractError("score_sequence: label id " + std::to_string(v) + " out of range");
  }
  double s = T.at(T.start(), y[0]);
  for (std::size_t t = 0; t < lat.n; ++t) {
    s += lat.at(t, y[t]);
    s += t + 1 < lat.n ? T.at(y[t], y[t + 1]) : T.at(y[t], T.stop());
  }
  return s;
}

double log_partition(const TagLattice& lat, const Transitions& T) {
  check_lattice(lat, T);
  return final_logz(lat, T, forward_scores(lat, T));
}

double nll(const TagLattice& lat, const Transitions& T, std::span<const std::size_t> gold) {
  return log_partition(lat, T) - score_sequence(lat, T, gold);
}

Decoded viterbi(const TagLattice& lat, const Transitions& T) {
  check_lattice(lat, T);
  const std::size_t L = lat.labels;
  const std::size_t n = lat.n;
  // best[t][y]: best score of positions t..n-1 (plus STOP) given y_t = y.
  std::vector<double> best(n * L);
  for (std::size_t y = 0; y < L; ++y) best[(n - 1) * L + y] = lat.at(n - 1, y) + T.at(y, T.stop());
  for (std::size_t t = n - 1; t-- > 0;) {
    for (std::size_t y = 0; y < L; ++y) {
      double m = kNegInf;
      for (std::size_t q = 0; q < L; ++q) m = std::max(m, T.at(y, q) + best[(t + 1) * L + q]);
      best[t * L + y] = lat.at(t, y) + m;
    }
  }
  Decoded out;
  out.path.resize(n);
  std::size_t prev = T.start();
  for (std::size_t t = 0; t < n; ++t) {
    double m = kNegInf;
    std::size_t arg = 0;
    for (std::size_t y = 0; y < L; ++y) {
      const double v = T.at(prev, y) + best[t * L + y];
      if (v > m) {
        m = v;
        arg = y;
      }
    }
    if (t == 0) out.score = m;
    out.path[t] = arg;
    prev = arg;
  }
  return out;
}

Marginals marginals(const TagLattice& lat, const Transitions& T) {
  check_lattice(lat, T);
  const std::size_t L = lat.labels;
  const std::size_t n = lat.n;
  const std::size_t w = T.width();
  const auto alpha = forward_scores(lat, T);
  const auto beta = backward_scores(lat, T);
  Marginals m;
  m.log_z = final_logz(lat, T, alpha);
  m.node.assign(n * L, 0.0);
  m.edge.assign(w * w, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      m.node[t * L + y] = std::exp(alpha[t * L + y] + beta[t * L + y] - m.log_z);
    }
  }
  for (std::size_t y = 0; y < L; ++y) {
    m.edge[T.start() * w + y] = m.node[y];
    m.edge[y * w + T.stop()] = m.node[(n - 1) * L + y];
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t p = 0; p < L; ++p) {
      for (std::size_t y = 0; y < L; ++y) {
        m.edge[p * w + y] += std::exp(alpha[(t - 1) * L + p] + T.at(p, y) + lat.at(t, y) +
                                      beta[t * L + y] - m.log_z);
      }
    }
  }
  return m;
}

BruteForce brute_force(const TagLattice& lat, const Transitions& T) {
  check_lattice(lat, T);
  const std::size_t L = lat.labels;
  double count = 1.0;
  for (std::size_t t = 0; t < lat.n; ++t) count *= static_cast<double>(L);
  if (count > static_cast<double>(kBruteForceLimit)) {
    throw ContractError("brute_force: " + std::to_string(L) + "^" + std::to_string(lat.n) +
                        " sequences exceed the enumeration limit");
  }
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> y(lat.n, 0);
  BruteForce out;
  out.best_score = kNegInf;
  out.argmax = y;
  while (true) {
    const double s = score_sequence(lat, T, y);
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.argmax = y;
    }
    // Odometer with position 0 most significant: lexicographic order.
    bool done = true;
    for (std::size_t pos = lat.n; pos-- > 0;) {
      if (++y[pos] < L) {
        done = false;
        break;
      }
      y[pos] = 0;
    }
    if (done) break;
  }
  out.log_z = logsumexp(scores);
  return out;
}

TagLattice lattice_from(const ad::Tensor& emissions) {
  TagLattice lat;
  lat.n = emissions.rows();
  lat.labels = emissions.cols();
  lat.emissions.assign(emissions.data().begin(), emissions.data().end());
  return lat;
}

ad::Tensor nll_loss(ad::Tape& tape, const ad::Tensor& emissions, const ad::Tensor& transitions,
                    std::span<const std::size_t> gold, std::span<const unsigned char> allowed) {
  const std::size_t L = emissions.cols();
  const TagLattice lat = lattice_from(emissions);
  const Transitions T = make_transitions(L, transitions.data(), allowed);
  Marginals marg = marginals(lat, T);
  const double value = marg.log_z - score_sequence(lat, T, gold);
  ad::Tensor out = ad::Tensor::scalar(value);
  std::vector<std::size_t> y(gold.begin(), gold.end());
  return tape.record(out, {emissions, transitions},
                     [emissions, transitions, out, marg = std::move(marg), y, L]() mutable {
                       const double g = out.grad()[0];
                       const std::size_t n = y.size();
                       const std::size_t w = L + 2;
                       if (emissions.requires_grad()) {
                         auto ge = emissions.grad_mut();
                         for (std::size_t t = 0; t < n; ++t) {
                           for (std::size_t l = 0; l < L; ++l) {
                             ge[t * L + l] += g * (marg.node[t * L + l] - (y[t] == l ? 1.0 : 0.0));
                           }
                         }
                       }
                       if (transitions.requires_grad()) {
                         auto gt = transitions.grad_mut();
                         for (std::size_t k = 0; k < w * w; ++k) gt[k] += g * marg.edge[k];
                         gt[L * w + y[0]] -= g;
                         for (std::size_t t = 0; t + 1 < n; ++t) gt[y[t] * w + y[t + 1]] -= g;
                         gt[y[n - 1] * w + L + 1] -= g;
                       }
                     });
}

}  // namespace synlstm::crf
