#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lexinduce/tree.hpp"

namespace lexinduce {

// Raw tallies, so corpus metrics can be merged across shards.
struct SpanCounts {
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t predicted = 0;

  SpanCounts& operator+=(const SpanCounts& o);
  double precision() const;
  double recall() const;
  // Both sets empty counts as a perfect match.
  double f1() const;
};

struct AttachmentCounts {
  std::size_t tokens = 0;
  std::size_t directed = 0;
  std::size_t undirected = 0;

  AttachmentCounts& operator+=(const AttachmentCounts& o);
  double das() const;
  double uas() const;
};

SpanCounts span_counts(const SpanSet& gold, const SpanSet& pred);
SpanCounts span_counts(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred);
AttachmentCounts attachment_counts(const DependencyParse& gold, const DependencyParse& pred);
AttachmentCounts attachment_counts(const std::vector<DependencyParse>& gold,
                                   const std::vector<DependencyParse>& pred);

// Micro average over the corpus.
double corpus_f1(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred);
// Mean of per-sentence F1.
double sentence_f1(const std::vector<SpanSet>& gold, const std::vector<SpanSet>& pred);

// Token-level, ROOT attachments included.
double das(const std::vector<DependencyParse>& gold, const std::vector<DependencyParse>& pred);
// Undirected edge match; the ROOT attachment must match exactly.
double uas(const std::vector<DependencyParse>& gold, const std::vector<DependencyParse>& pred);

// Share of predicted roots per reference tag.
std::map<std::string, double> root_pos_distribution(const std::vector<DependencyParse>& pred,
                                                    const std::vector<std::vector<std::string>>& tags);

struct EvalReport {
  double corpus_f1 = 0.0;
  double sentence_f1 = 0.0;
  double das = 0.0;
  double uas = 0.0;
  std::size_t n_sentences = 0;
  std::map<std::string, double> root_pos_distribution;

  std::string to_json() const;
  std::string to_table() const;
};

// `tags` may be empty, which leaves root_pos_distribution empty.
EvalReport evaluate(const std::vector<SpanSet>& gold_spans, const std::vector<SpanSet>& pred_spans,
                    const std::vector<DependencyParse>& gold_deps, const std::vector<DependencyParse>& pred_deps,
                    const std::vector<std::vector<std::string>>& tags = {});

}  // namespace lexinduce
