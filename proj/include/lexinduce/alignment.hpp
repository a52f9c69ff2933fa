#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexinduce/priors.hpp"

namespace lexinduce {

using Stopwords = std::unordered_set<std::string>;

// One word per line; blank lines and '#' comments ignored; lowercased.
Stopwords load_stopwords(const std::string& path);

struct CaptionInput {
  std::string sentence_id;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;  // may be empty: tokens are used instead
};

// Participants may arrive as "role=value" / {"role", "value"} pairs upstream;
// by this point they are bare values, and unfilled roles are dropped.
struct LabelInput {
  std::string sentence_id;
  std::string activity;
  std::vector<std::string> participants;
};

struct CaptionRecord {
  std::string sentence_id;
  std::vector<std::string> original_tokens;
  std::vector<std::string> content_tokens;  // lowercased lemmas of non-stopwords
  std::vector<int> position_map;            // content index -> original index
};

struct LabelRecord {
  std::string sentence_id;
  std::string activity;
  std::vector<std::string> participants;

  // Activity first, then participants in order.
  std::vector<std::string> sequence() const;
};

// nullopt when nothing survives stopword removal (caller logs and skips).
std::optional<std::pair<CaptionRecord, LabelRecord>> preprocess(const CaptionInput& caption,
                                                                 const LabelInput& labels,
                                                                 const Stopwords& stopwords);

// Presence-based counts: a type counts once per record pair.
class CoocTable {
 public:
  void add(const CaptionRecord& caption, const LabelRecord& labels);

  int caption_count(const std::string& s) const;
  int label_count(const std::string& t) const;
  int cooc(const std::string& s, const std::string& t) const;
  // 2 * cooc / (count_caption + count_label); 0 when either count is 0.
  double dice(const std::string& s, const std::string& t) const;

 private:
  std::unordered_map<std::string, int> caption_counts_;
  std::unordered_map<std::string, int> label_counts_;
  std::map<std::pair<std::string, std::string>, int> joint_;
};

CoocTable build_cooc(const std::vector<std::pair<CaptionRecord, LabelRecord>>& corpus);

struct AlignmentPair {
  std::string caption_token;
  std::string label_token;
  double dice_score = 0.0;
  int caption_position = 0;  // original caption index
  int label_position = 0;    // index into LabelRecord::sequence()
};

// Greedy competitive linking on Dice scores. Ties: lower caption position,
// then lower label index. Output is in link order (descending score).
std::vector<AlignmentPair> competitive_link(const CaptionRecord& caption, const LabelRecord& labels,
                                            const CoocTable& cooc);

enum class SpanMode {
  Coupling,  // unaligned predicate keeps F0 = 0 (zero-initialized F)
  Combined   // unaligned predicate: no spans for the record
};

SpanMode parse_span_mode(const std::string& s);

// Rewarded spans for one record, in generation order. Every span has the
// predicate position as its head and at one of its ends.
std::vector<SpanTriple> generate_rewarded_spans(const CaptionRecord& caption, const LabelRecord& labels,
                                                const std::vector<AlignmentPair>& aligns, SpanMode mode);

}  // namespace lexinduce
