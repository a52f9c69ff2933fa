#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexinduce/tree.hpp"

namespace lexinduce {

enum class NormalizationMode { DivideBy5, Affine1To5 };

NormalizationMode parse_normalization_mode(std::string_view s);

// Lemma -> concreteness in [0, 1]. Absent lemmas score exactly 0.
class ConcretenessLexicon {
 public:
  explicit ConcretenessLexicon(NormalizationMode mode = NormalizationMode::DivideBy5) : mode_(mode) {}

  // TSV rows "lemma<TAB>raw" with raw in [1, 5]; later duplicates win.
  static ConcretenessLexicon load(const std::string& path,
                                  NormalizationMode mode = NormalizationMode::DivideBy5);
  static ConcretenessLexicon parse(std::istream& in, const std::string& source, NormalizationMode mode);

  void insert_raw(const std::string& lemma, double raw);
  void insert_normalized(const std::string& lemma, double score);
  double lookup(std::string_view lemma) const;  // lowercased exact match
  NormalizationMode mode() const { return mode_; }
  std::size_t size() const { return scores_.size(); }

 private:
  NormalizationMode mode_;
  std::unordered_map<std::string, double> scores_;
};

// Inclusive token indices into the original caption.
struct SpanTriple {
  int start = 0;
  int end = 0;
  int head = 0;
  auto operator<=>(const SpanTriple&) const = default;
};

class RewardedSpanSet {
 public:
  // Rejects triples with start >= end or head outside {start, end};
  // duplicates are ignored.
  void add(const std::string& sentence_id, SpanTriple s);
  void ensure(const std::string& sentence_id) { by_sentence_[sentence_id]; }
  const std::vector<SpanTriple>& spans_for(const std::string& sentence_id) const;
  bool contains(const std::string& sentence_id, const SpanTriple& s) const;
  const std::map<std::string, std::vector<SpanTriple>>& all() const { return by_sentence_; }

  // JSON lines: {"sentence_id": ..., "spans": [[start, end, head], ...]}
  static RewardedSpanSet load_jsonl(const std::string& path);
  void save_jsonl(const std::string& path, const std::vector<std::string>& order) const;

 private:
  std::map<std::string, std::vector<SpanTriple>> by_sentence_;
};

// Where the span potential may fire.
enum class Placement { Root, NonRoot };

Placement parse_placement(std::string_view s);

struct PriorBundle {
  double lambda_c = 0.0;
  double lambda_v = 0.0;
  std::shared_ptr<const ConcretenessLexicon> lexicon;
  std::shared_ptr<const RewardedSpanSet> spans;
  Placement placement = Placement::NonRoot;
  bool inference_priors_enabled = true;

  // lambda >= 0, and lambda > 0 only with its resource present.
  void validate() const;

  double root_potential(const Sentence& sentence, int head_position) const;
  double span_potential(const std::string& sentence_id, int start, int end, int head) const;

  // The bundle Viterbi should use: zeroed when inference priors are off.
  PriorBundle for_decoding() const;
};

// Per-sentence view of the potentials, precomputed for the chart.
struct SentencePriors {
  int length = 0;
  std::vector<double> root_bonus;      // lambda_c * conc(lemma_h)
  std::vector<SpanTriple> rewarded;    // sorted
  double lambda_v = 0.0;
  Placement placement = Placement::NonRoot;

  static SentencePriors none(int length);
  static SentencePriors bind(const PriorBundle& bundle, const Sentence& sentence);

  bool is_rewarded(int start, int end, int head) const;
  // Rewarded and allowed by the placement mode, whatever lambda_v is.
  bool potential_applies(int start, int end, int head) const;
  double span_bonus(int start, int end, int head) const {
    return lambda_v != 0.0 && potential_applies(start, end, head) ? lambda_v : 0.0;
  }
};

}  // namespace lexinduce
