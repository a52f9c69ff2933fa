#include "lexinduce/priors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lexinduce/error.hpp"

namespace lexinduce {

namespace {
std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}
}  // namespace

NormalizationMode parse_normalization_mode(std::string_view s) {
  if (s == "divide_by_5") return NormalizationMode::DivideBy5;
  if (s == "affine_1_5") return NormalizationMode::Affine1To5;
  throw ConfigError("unknown normalization mode: " + std::string(s));
}

Placement parse_placement(std::string_view s) {
  if (s == "root") return Placement::Root;
  if (s == "non_root") return Placement::NonRoot;
  throw ConfigError("unknown placement: " + std::string(s));
}

void ConcretenessLexicon::insert_raw(const std::string& lemma, double raw) {
  if (!(raw >= 1.0 && raw <= 5.0)) throw InputError("concreteness rating outside [1, 5] for '" + lemma + "'");
  double score = mode_ == NormalizationMode::DivideBy5 ? raw / 5.0 : (raw - 1.0) / 4.0;
  scores_[lowercase(lemma)] = score;
}

void ConcretenessLexicon::insert_normalized(const std::string& lemma, double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw InputError("normalized concreteness outside [0, 1]");
  scores_[lowercase(lemma)] = score;
}

double ConcretenessLexicon::lookup(std::string_view lemma) const {
  auto it = scores_.find(lowercase(lemma));
  return it == scores_.end() ? 0.0 : it->second;
}

ConcretenessLexicon ConcretenessLexicon::parse(std::istream& in, const std::string& source,
                                               NormalizationMode mode) {
  ConcretenessLexicon lex(mode);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto where = source + ":" + std::to_string(lineno) + ": ";
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw InputError(where + "expected lemma<TAB>score");
    std::string lemma = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    if (auto tab2 = rest.find('\t'); tab2 != std::string::npos) rest = rest.substr(0, tab2);
    double raw = 0.0;
    std::size_t used = 0;
    try {
      raw = std::stod(rest, &used);
    } catch (const std::exception&) {
      throw InputError(where + "score is not a number: '" + rest + "'");
    }
    if (used != rest.size()) throw InputError(where + "score is not a number: '" + rest + "'");
    if (!(raw >= 1.0 && raw <= 5.0))
      throw InputError(where + "rating " + rest + " outside [1, 5]");
    lex.insert_raw(lemma, raw);
  }
  return lex;
}

ConcretenessLexicon ConcretenessLexicon::load(const std::string& path, NormalizationMode mode) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read lexicon: " + path);
  return parse(in, path, mode);
}

// ---- rewarded spans ----------------------------------------------------------

void RewardedSpanSet::add(const std::string& sentence_id, SpanTriple s) {
  if (s.start >= s.end || s.start < 0 || (s.head != s.start && s.head != s.end))
    throw InputError("invalid rewarded span for sentence " + sentence_id);
  auto& v = by_sentence_[sentence_id];
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

const std::vector<SpanTriple>& RewardedSpanSet::spans_for(const std::string& sentence_id) const {
  static const std::vector<SpanTriple> empty;
  auto it = by_sentence_.find(sentence_id);
  return it == by_sentence_.end() ? empty : it->second;
}

bool RewardedSpanSet::contains(const std::string& sentence_id, const SpanTriple& s) const {
  const auto& v = spans_for(sentence_id);
  return std::find(v.begin(), v.end(), s) != v.end();
}

RewardedSpanSet RewardedSpanSet::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read spans file: " + path);
  RewardedSpanSet out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto where = path + ":" + std::to_string(lineno) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      std::string id = j.at("sentence_id").get<std::string>();
      if (out.by_sentence_.count(id)) throw InputError(where + "duplicate sentence_id " + id);
      out.ensure(id);
      for (const auto& s : j.at("spans")) {
        if (!s.is_array() || s.size() != 3) throw InputError(where + "span must be [start, end, head]");
        out.add(id, {s[0].get<int>(), s[1].get<int>(), s[2].get<int>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    } catch (const InputError& e) {
      std::string msg = e.what();
      throw InputError(msg.rfind(path, 0) == 0 ? msg : where + msg);
    }
  }
  return out;
}

void RewardedSpanSet::save_jsonl(const std::string& path, const std::vector<std::string>& order) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write spans file: " + path);
  for (const auto& id : order) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : spans_for(id)) spans.push_back({s.start, s.end, s.head});
    nlohmann::json j;
    j["sentence_id"] = id;
    j["spans"] = spans;
    out << j.dump() << '\n';
  }
}

// ---- bundle -----------------------------------------------------------------

void PriorBundle::validate() const {
  if (!(lambda_c >= 0.0) || !(lambda_v >= 0.0)) throw ConfigError("prior weights must be >= 0");
  if (lambda_c > 0.0 && !lexicon) throw ConfigError("lambda_c > 0 requires a concreteness lexicon");
  if (lambda_v > 0.0 && !spans) throw ConfigError("lambda_v > 0 requires a rewarded-span set");
}

double PriorBundle::root_potential(const Sentence& sentence, int head_position) const {
  if (lambda_c == 0.0 || !lexicon) return 0.0;
  return lambda_c * lexicon->lookup(sentence.lemmas.at(static_cast<std::size_t>(head_position)));
}

double PriorBundle::span_potential(const std::string& sentence_id, int start, int end, int head) const {
  if (lambda_v == 0.0 || !spans) return 0.0;
  return spans->contains(sentence_id, {start, end, head}) ? lambda_v : 0.0;
}

PriorBundle PriorBundle::for_decoding() const {
  PriorBundle out = *this;
  if (!inference_priors_enabled) {
    out.lambda_c = 0.0;
    out.lambda_v = 0.0;
  }
  return out;
}

SentencePriors SentencePriors::none(int length) {
  SentencePriors p;
  p.length = length;
  p.root_bonus.assign(static_cast<std::size_t>(length), 0.0);
  return p;
}

SentencePriors SentencePriors::bind(const PriorBundle& bundle, const Sentence& sentence) {
  SentencePriors p = none(sentence.size());
  for (int h = 0; h < sentence.size(); ++h) p.root_bonus[static_cast<std::size_t>(h)] = bundle.root_potential(sentence, h);
  p.placement = bundle.placement;
  if (bundle.spans) {
    p.lambda_v = bundle.lambda_v;
    for (const auto& s : bundle.spans->spans_for(sentence.id)) {
      if (s.end >= sentence.size())
        throw InputError("rewarded span beyond sentence end in " + sentence.id);
      p.rewarded.push_back(s);
    }
    std::sort(p.rewarded.begin(), p.rewarded.end());
  }
  return p;
}

bool SentencePriors::is_rewarded(int start, int end, int head) const {
  return std::binary_search(rewarded.begin(), rewarded.end(), SpanTriple{start, end, head});
}

bool SentencePriors::potential_applies(int start, int end, int head) const {
  if (rewarded.empty()) return false;
  if (placement == Placement::Root && !(start == 0 && end == length - 1)) return false;
  return is_rewarded(start, end, head);
}

}  // namespace lexinduce
