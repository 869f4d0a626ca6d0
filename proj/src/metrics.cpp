#include "synlstm/metrics.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "synlstm/error.hpp"

namespace synlstm {

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

double Counts::precision() const { return ratio(tp, tp + fp); }
double Counts::recall() const { return ratio(tp, tp + fn); }
double Counts::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Counts& Counts::operator+=(const Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

std::size_t sentence_bucket(std::size_t n) {
  if (n <= 14) return 0;
  if (n <= 29) return 1;
  if (n <= 44) return 2;
  if (n <= 59) return 3;
  return 4;
}

std::size_t entity_bucket(std::size_t len) {
  if (len == 0) throw ContractError("entity_bucket: empty entity");
  return std::min<std::size_t>(len, 6) - 1;
}

const std::array<std::string, kSentenceBuckets>& sentence_bucket_names() {
  static const std::array<std::string, kSentenceBuckets> names{"<=14", "15-29", "30-44", "45-59",
                                                               ">=60"};
  return names;
}

const std::array<std::string, kEntityBuckets>& entity_bucket_names() {
  static const std::array<std::string, kEntityBuckets> names{"1", "2", "3", "4", "5", ">=6"};
  return names;
}

namespace {

void count_sentence(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                    Scheme scheme, EvalReport* report, Counts& total) {
  if (gold.size() != pred.size()) {
    throw ContractError("entity_f1: sentence lengths differ (" + std::to_string(gold.size()) +
                        " vs " + std::to_string(pred.size()) + ")");
  }
  const auto g = decode_spans(gold, scheme);
  const auto p = decode_spans(pred, scheme);
  const std::set<EntitySpan> gs(g.begin(), g.end());
  const std::set<EntitySpan> ps(p.begin(), p.end());
  Counts c;
  const std::size_t sb = sentence_bucket(gold.size());
  auto bump = [&](const EntitySpan& s, std::size_t Counts::*field) {
    if (!report) return;
    report->per_type[s.type].*field += 1;
    report->by_sentence_length[sb].*field += 1;
    report->by_entity_length[entity_bucket(s.end - s.start + 1)].*field += 1;
  };
  for (const auto& s : ps) {
    if (gs.count(s)) {
      ++c.tp;
      bump(s, &Counts::tp);
    } else {
      ++c.fp;
      bump(s, &Counts::fp);
    }
  }
  for (const auto& s : gs) {
    if (!ps.count(s)) {
      ++c.fn;
      bump(s, &Counts::fn);
    }
  }
  total += c;
}

bool uses_bioes(const LabelRows& rows) {
  for (const auto& row : rows) {
    for (const auto& l : row) {
      if (l.size() >= 2 && (l[0] == 'E' || l[0] == 'S') && l[1] == '-') return true;
    }
  }
  return false;
}

}  // namespace

Counts sentence_counts(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                       Scheme scheme) {
  Counts c;
  count_sentence(gold, pred, scheme, nullptr, c);
  return c;
}

EvalReport entity_f1(const LabelRows& gold, const LabelRows& pred, Scheme scheme) {
  if (gold.size() != pred.size()) {
    throw ContractError("entity_f1: " + std::to_string(gold.size()) + " gold vs " +
                        std::to_string(pred.size()) + " predicted sentences");
  }
  EvalReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    count_sentence(gold[i], pred[i], scheme, &report, report.overall);
  }
  return report;
}

LabelRows label_rows(const Corpus& corpus) {
  LabelRows rows;
  rows.reserve(corpus.size());
  for (const auto& s : corpus) rows.push_back(s.labels);
  return rows;
}

EvalReport entity_f1(const Corpus& gold, const Corpus& pred) {
  const LabelRows g = label_rows(gold), p = label_rows(pred);
  const Scheme scheme = uses_bioes(g) || uses_bioes(p) ? Scheme::bioes : Scheme::bio;
  return entity_f1(g, p, scheme);
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "metric,bucket,value\n";
  os << "precision,all," << precision() << '\n';
  os << "recall,all," << recall() << '\n';
  os << "f1,all," << f1() << '\n';
  for (const auto& [type, c] : per_type) {
    os << "precision,type:" << type << ',' << c.precision() << '\n';
    os << "recall,type:" << type << ',' << c.recall() << '\n';
    os << "f1,type:" << type << ',' << c.f1() << '\n';
  }
  for (std::size_t b = 0; b < kSentenceBuckets; ++b) {
    os << "f1,sentence_length:" << sentence_bucket_names()[b] << ',' << by_sentence_length[b].f1()
       << '\n';
  }
  for (std::size_t b = 0; b < kEntityBuckets; ++b) {
    os << "f1,entity_length:" << entity_bucket_names()[b] << ',' << by_entity_length[b].f1() << '\n';
  }
  return os.str();
}

std::string EvalReport::to_json() const {
  auto counts = [](const Counts& c) {
    return nlohmann::json{{"tp", c.tp},           {"fp", c.fp},         {"fn", c.fn},
                          {"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()}};
  };
  nlohmann::json j;
  j["overall"] = counts(overall);
  for (const auto& [type, c] : per_type) j["per_type"][type] = counts(c);
  for (std::size_t b = 0; b < kSentenceBuckets; ++b) {
    j["sentence_length"][sentence_bucket_names()[b]] = counts(by_sentence_length[b]);
  }
  for (std::size_t b = 0; b < kEntityBuckets; ++b) {
    j["entity_length"][entity_bucket_names()[b]] = counts(by_entity_length[b]);
  }
  return j.dump(2);
}

}  // namespace synlstm
