#include "lexinduce/alignment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>

#include "lexinduce/error.hpp"

namespace lexinduce {

namespace {
std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

Stopwords load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read stopword list: " + path);
  Stopwords out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    line = line.substr(b);
    if (line.empty() || line[0] == '#') continue;
    out.insert(lowercase(line));
  }
  return out;
}

std::vector<std::string> LabelRecord::sequence() const {
  std::vector<std::string> out;
  out.reserve(participants.size() + 1);
  out.push_back(activity);
  out.insert(out.end(), participants.begin(), participants.end());
  return out;
}

std::optional<std::pair<CaptionRecord, LabelRecord>> preprocess(const CaptionInput& caption,
                                                                 const LabelInput& labels,
                                                                 const Stopwords& stopwords) {
  if (!caption.lemmas.empty() && caption.lemmas.size() != caption.tokens.size())
    throw InputError("caption " + caption.sentence_id + ": token and lemma counts differ");
  if (labels.activity.empty()) throw InputError("labels " + labels.sentence_id + ": missing activity");
  CaptionRecord c;
  c.sentence_id = caption.sentence_id;
  c.original_tokens = caption.tokens;
  for (std::size_t i = 0; i < caption.tokens.size(); ++i) {
    if (stopwords.count(lowercase(caption.tokens[i]))) continue;
    c.content_tokens.push_back(lowercase(caption.lemmas.empty() ? caption.tokens[i] : caption.lemmas[i]));
    c.position_map.push_back(static_cast<int>(i));
  }
  if (c.content_tokens.empty()) return std::nullopt;

  LabelRecord l;
  l.sentence_id = labels.sentence_id;
  l.activity = lowercase(labels.activity);
  for (const auto& p : labels.participants)
    if (!p.empty()) l.participants.push_back(lowercase(p));
  return std::make_pair(std::move(c), std::move(l));
}

void CoocTable::add(const CaptionRecord& caption, const LabelRecord& labels) {
  std::set<std::string> cs(caption.content_tokens.begin(), caption.content_tokens.end());
  auto seq = labels.sequence();
  std::set<std::string> ls(seq.begin(), seq.end());
  for (const auto& s : cs) ++caption_counts_[s];
  for (const auto& t : ls) ++label_counts_[t];
  for (const auto& s : cs)
    for (const auto& t : ls) ++joint_[{s, t}];
}

int CoocTable::caption_count(const std::string& s) const {
  auto it = caption_counts_.find(s);
  return it == caption_counts_.end() ? 0 : it->second;
}

int CoocTable::label_count(const std::string& t) const {
  auto it = label_counts_.find(t);
  return it == label_counts_.end() ? 0 : it->second;
}

int CoocTable::cooc(const std::string& s, const std::string& t) const {
  auto it = joint_.find({s, t});
  return it == joint_.end() ? 0 : it->second;
}

double CoocTable::dice(const std::string& s, const std::string& t) const {
  const int denom = caption_count(s) + label_count(t);
  if (denom == 0) return 0.0;
  return 2.0 * cooc(s, t) / denom;
}

CoocTable build_cooc(const std::vector<std::pair<CaptionRecord, LabelRecord>>& corpus) {
  CoocTable table;
  for (const auto& [c, l] : corpus) table.add(c, l);
  return table;
}

std::vector<AlignmentPair> competitive_link(const CaptionRecord& caption, const LabelRecord& labels,
                                            const CoocTable& cooc) {
  const auto seq = labels.sequence();
  std::vector<AlignmentPair> candidates;
  for (std::size_t ci = 0; ci < caption.content_tokens.size(); ++ci) {
    for (std::size_t li = 0; li < seq.size(); ++li) {
      double score = cooc.dice(caption.content_tokens[ci], seq[li]);
      if (score > 0.0)
        candidates.push_back({caption.content_tokens[ci], seq[li], score, caption.position_map[ci],
                              static_cast<int>(li)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const AlignmentPair& a, const AlignmentPair& b) {
    if (a.dice_score != b.dice_score) return a.dice_score > b.dice_score;
    if (a.caption_position != b.caption_position) return a.caption_position < b.caption_position;
    return a.label_position < b.label_position;
  });
  std::set<int> used_caption, used_label;
  std::vector<AlignmentPair> links;
  for (const auto& c : candidates) {
    if (used_caption.count(c.caption_position) || used_label.count(c.label_position)) continue;
    used_caption.insert(c.caption_position);
    used_label.insert(c.label_position);
    links.push_back(c);
  }
  return links;
}

SpanMode parse_span_mode(const std::string& s) {
  if (s == "coupling") return SpanMode::Coupling;
  if (s == "combined") return SpanMode::Combined;
  throw ConfigError("unknown span mode: " + s + " (expected coupling|combined)");
}

std::vector<SpanTriple> generate_rewarded_spans(const CaptionRecord& caption, const LabelRecord& labels,
                                                const std::vector<AlignmentPair>& aligns, SpanMode mode) {
  const std::size_t num_labels = labels.participants.size() + 1;
  std::vector<std::optional<int>> F(num_labels);
  for (std::size_t l = 0; l < num_labels; ++l)
    for (const auto& a : aligns)
      if (a.label_position == static_cast<int>(l)) F[l] = a.caption_position;

  if (!F[0] && mode == SpanMode::Combined) return {};
  const int predicate = F[0].value_or(0);
  if (predicate >= static_cast<int>(caption.original_tokens.size()) && !caption.original_tokens.empty())
    throw InputError("alignment position beyond caption end in " + caption.sentence_id);

  std::vector<std::size_t> args;
  std::vector<int> D(num_labels, 0);
  for (std::size_t i = 1; i < num_labels; ++i) {
    if (!F[i]) continue;
    D[i] = *F[i] - predicate;
    args.push_back(i);
  }
  std::stable_sort(args.begin(), args.end(), [&D](std::size_t a, std::size_t b) { return D[a] < D[b]; });

  std::vector<SpanTriple> spans;
  for (std::size_t i : args) {
    const int d = D[i];
    if (d == 0) continue;
    SpanTriple s = d < 0 ? SpanTriple{*F[i], predicate, predicate} : SpanTriple{predicate, *F[i], predicate};
    if (std::find(spans.begin(), spans.end(), s) == spans.end()) spans.push_back(s);
  }
  return spans;
}

}  // namespace lexinduce
