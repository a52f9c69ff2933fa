#include "lexinduce/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "lexinduce/error.hpp"
#include <json.hpp>

namespace lexinduce {

namespace {

double ratio(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

template <typename A, typename B>
void check_parallel(const std::vector<A>& gold, const std::vector<B>& pred, const char* what) {
  if (gold.empty()) throw InputError(std::string("empty corpus for ") + what);
  if (gold.size() != pred.size())
    throw InputError(std::string(what) + ": " + std::to_string(gold.size()) + " gold vs " +
                     std::to_string(pred.size()) + " predicted sentences");
}

}  // namespace

SpanCounts& SpanCounts::operator+=(const SpanCounts& o) {
  matched += o.matched;
  gold += o.gold;
  predicted += o.predicted;
  return *this;
}

double SpanCounts::precision() const { return ratio(matched, predicted); }
double SpanCounts::recall() const { return ratio(matched, gold); }

double SpanCounts::f1() const {
  if (gold == 0 && predicted == 0) return 1.0;
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

AttachmentCounts& AttachmentCounts::operator+=(const AttachmentCounts& o) {
  tokens += o.tokens;
  directed += o.directed;
  undirected += o.undirected;
  return *this;
}

double AttachmentCounts::das() const {
  if (tokens == 0) throw InputError("attachment score over zero tokens");
  return ratio(directed, tokens);
}

double AttachmentCounts::uas() const {
  if (tokens == 0) throw InputError("attachment score over zero tokens");
  return ratio(undirected, tokens);
}

SpanCounts span_counts(const SpanSet& gold, const SpanSet& pred) {
  SpanCounts c;
  c.gold = gold.size();
  c.predicted = pred.size();
  for (const auto& s : pred) c.matched += gold.count(s);
  return c;
}

SpanCounts span_counts(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred) {
  check_parallel(gold, pred, "span evaluation");
  SpanCounts total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += span_counts(gold[i], pred[i]);
  return total;
}

AttachmentCounts attachment_counts(const DependencyParse& gold, const DependencyParse& pred) {
  if (gold.size() != pred.size())
    throw InputError("dependency length mismatch: gold " + std::to_string(gold.size()) + " vs predicted " +
                     std::to_string(pred.size()));
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < gold.size(); ++i) {
    int h = gold.head_of[i];
    if (h != DependencyParse::kRoot) edges.insert({std::min(i, h), std::max(i, h)});
  }
  AttachmentCounts c;
  c.tokens = static_cast<std::size_t>(gold.size());
  for (int i = 0; i < gold.size(); ++i) {
    const int g = gold.head_of[i], p = pred.head_of[i];
    if (g == p) ++c.directed;
    if (p == DependencyParse::kRoot) {
      if (g == DependencyParse::kRoot) ++c.undirected;
    } else if (edges.count({std::min(i, p), std::max(i, p)})) {
      ++c.undirected;
    }
  }
  return c;
}

AttachmentCounts attachment_counts(const std::vector<DependencyParse>& gold,
                                   const std::vector<DependencyParse>& pred) {
  check_parallel(gold, pred, "dependency evaluation");
  AttachmentCounts total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += attachment_counts(gold[i], pred[i]);
  return total;
}

double corpus_f1(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred) {
  return span_counts(gold, pred).f1();
}

double sentence_f1(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred) {
  check_parallel(gold, pred, "span evaluation");
  double sum = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) sum += span_counts(gold[i], pred[i]).f1();
  return sum / static_cast<double>(gold.size());
}

double das(const std::vector<DependencyParse>& gold, const std::vector<DependencyParse>& pred) {
  return attachment_counts(gold, pred).das();
}

double uas(const std::vector<DependencyParse>& gold, const std::vector<DependencyParse>& pred) {
  return attachment_counts(gold, pred).uas();
}

std::map<std::string, double> root_pos_distribution(const std::vector<DependencyParse>& pred,
                                                    const std::vector<std::vector<std::string>>& tags) {
  check_parallel(pred, tags, "root POS distribution");
  std::map<std::string, std::size_t> tally;
  std::size_t total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (int t = 0; t < pred[i].size(); ++t) {
      if (pred[i].head_of[t] != DependencyParse::kRoot) continue;
      if (static_cast<std::size_t>(t) >= tags[i].size())
        throw InputError("POS reference shorter than parse in sentence " + std::to_string(i));
      ++tally[tags[i][t]];
      ++total;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [tag, c] : tally) out[tag] = static_cast<double>(c) / total;
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["corpus_f1"] = corpus_f1;
  j["sentence_f1"] = sentence_f1;
  j["das"] = das;
  j["uas"] = uas;
  j["n_sentences"] = n_sentences;
  j["root_pos_distribution"] = nlohmann::ordered_json::object();
  for (const auto& [tag, f] : root_pos_distribution) j["root_pos_distribution"][tag] = f;
  return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char buf[96];
  auto row = [&](const std::string& name, double v) {
    std::snprintf(buf, sizeof buf, "%-14s %8.2f\n", name.c_str(), 100.0 * v);
    out << buf;
  };
  std::snprintf(buf, sizeof buf, "%-14s %8zu\n", "sentences", n_sentences);
  out << buf;
  row("corpus_f1", corpus_f1);
  row("sentence_f1", sentence_f1);
  row("das", das);
  row("uas", uas);
  if (!root_pos_distribution.empty()) {
    out << "\nroot POS (%)\n";
    for (const auto& [tag, f] : root_pos_distribution) row("  " + tag, f);
  }
  return out.str();
}

EvalReport evaluate(const std::vector<SpanSet>& gold_spans, const std::vector<SpanSet>& pred_spans,
                    const std::vector<DependencyParse>& gold_deps, const std::vector<DependencyParse>& pred_deps,
                    const std::vector<std::vector<std::string>>& tags) {
  EvalReport r;
  r.corpus_f1 = corpus_f1(gold_spans, pred_spans);
  r.sentence_f1 = sentence_f1(gold_spans, pred_spans);
  auto att = attachment_counts(gold_deps, pred_deps);
  r.das = att.das();
  r.uas = att.uas();
  r.n_sentences = gold_spans.size();
  if (!tags.empty()) r.root_pos_distribution = root_pos_distribution(pred_deps, tags);
  return r;
}

}  // namespace lexinduce
