#include "lexinduce/grammar.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lexinduce/error.hpp"
#include "lexinduce/logspace.hpp"

namespace lexinduce {

using nlohmann::json;

void GrammarConfig::validate() const {
  if (num_nonterminals < 1) throw ConfigError("num_nonterminals must be >= 1");
  if (num_preterminals < 1) throw ConfigError("num_preterminals must be >= 1");
  if (!(emission_smoothing >= 0.0)) throw ConfigError("emission_smoothing must be >= 0");
}

GrammarTables::GrammarTables(const GrammarShape& s)
    : shape(s),
      root(s.root_size(), 0.0),
      head(s.head_size(), 0.0),
      dep(s.dep_size(), 0.0),
      emit(s.emit_size(), 0.0) {}

void GrammarTables::axpy(double a, const GrammarTables& other) {
  if (!(shape == other.shape)) throw std::invalid_argument("table shape mismatch");
  auto apply = [a](std::vector<double>& y, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  };
  apply(root, other.root);
  apply(head, other.head);
  apply(dep, other.dep);
  apply(emit, other.emit);
}

double GrammarTables::max_abs() const {
  double m = 0.0;
  for (const auto* t : {&root, &head, &dep, &emit})
    for (double v : *t) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void log_softmax_blocks(const std::vector<double>& in, std::vector<double>& out,
                        std::size_t block) {
  out.resize(in.size());
  for (std::size_t off = 0; off < in.size(); off += block) {
    std::span<const double> ctx(in.data() + off, block);
    double z = log_sum_exp(ctx);
    for (std::size_t i = 0; i < block; ++i) out[off + i] = in[off + i] - z;
  }
}

double context_logprob(std::span<const double> ctx, std::size_t outcome) {
  return ctx[outcome] - log_sum_exp(ctx);
}

void check_nonterminal(const GrammarShape& s, Symbol a) {
  if (!s.is_nonterminal(a)) throw std::out_of_range("nonterminal id out of range");
}
void check_symbol(const GrammarShape& s, Symbol x) {
  if (x < 0 || x >= s.symbols()) throw std::out_of_range("symbol id out of range");
}
void check_word(const GrammarShape& s, WordId w) {
  if (w < 0 || w >= s.vocab) throw std::out_of_range("word id out of range");
}

void check_rule(const GrammarShape& s, const RuleDescriptor& rule) {
  std::visit(
      [&s](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, RootRule>) {
          check_nonterminal(s, r.parent);
        } else if constexpr (std::is_same_v<R, BinaryRule>) {
          check_nonterminal(s, r.parent);
          check_word(s, r.head_word);
          check_symbol(s, r.inheriting);
          check_symbol(s, r.dependent);
        } else {
          if (!s.is_preterminal(r.preterminal))
            throw std::out_of_range("preterminal id out of range");
          check_word(s, r.word);
        }
      },
      rule);
}

}  // namespace

GrammarTables log_normalize(const GrammarTables& logits) {
  const auto& s = logits.shape;
  GrammarTables out;
  out.shape = s;
  log_softmax_blocks(logits.root, out.root, s.root_size());
  log_softmax_blocks(logits.head, out.head, static_cast<std::size_t>(2 * s.symbols()));
  log_softmax_blocks(logits.dep, out.dep, static_cast<std::size_t>(s.symbols()));
  log_softmax_blocks(logits.emit, out.emit, static_cast<std::size_t>(s.vocab));
  return out;
}

double rule_logprob(const GrammarTables& log_probs, const RuleDescriptor& rule) {
  const auto& s = log_probs.shape;
  check_rule(s, rule);
  if (const auto* r = std::get_if<RootRule>(&rule)) return log_probs.root[r->parent];
  if (const auto* r = std::get_if<BinaryRule>(&rule)) {
    return log_probs.head[s.head_index(r->parent, r->head_word, r->dir, r->inheriting)] +
           log_probs.dep[s.dep_index(r->dir, r->parent, r->inheriting, r->dependent)];
  }
  const auto& e = std::get<EmissionRule>(rule);
  return log_probs.emit[s.emit_index(e.preterminal, e.word)];
}

LexGrammar::LexGrammar(GrammarConfig config, Vocabulary vocab, GrammarTables logits)
    : config_(config), vocab_(std::move(vocab)), logits_(std::move(logits)) {
  config_.validate();
  const auto& s = logits_.shape;
  if (s.nonterminals != config_.num_nonterminals || s.preterminals != config_.num_preterminals ||
      s.vocab != vocab_.size())
    throw ConfigError("grammar tables do not match config/vocabulary sizes");
  if (logits_.root.size() != s.root_size() || logits_.head.size() != s.head_size() ||
      logits_.dep.size() != s.dep_size() || logits_.emit.size() != s.emit_size())
    throw ConfigError("grammar table sizes inconsistent with shape");
}

LexGrammar LexGrammar::new_random(const GrammarConfig& config, const Vocabulary& vocab) {
  config.validate();
  if (vocab.size() < 1) throw ConfigError("empty vocabulary");
  GrammarShape shape{config.num_nonterminals, config.num_preterminals, vocab.size()};
  GrammarTables logits(shape);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> dist(0.0, 0.1);
  for (auto* t : {&logits.root, &logits.head, &logits.dep, &logits.emit})
    for (double& v : *t) v = dist(rng);
  return LexGrammar(config, vocab, std::move(logits));
}

double LexGrammar::rule_logprob(const RuleDescriptor& rule) const {
  const auto& s = shape();
  check_rule(s, rule);
  if (const auto* r = std::get_if<RootRule>(&rule))
    return context_logprob(logits_.root, static_cast<std::size_t>(r->parent));
  if (const auto* r = std::get_if<BinaryRule>(&rule)) {
    std::span<const double> head(logits_.head.data() + s.head_context(r->parent, r->head_word),
                                 static_cast<std::size_t>(2 * s.symbols()));
    std::span<const double> dep(logits_.dep.data() + s.dep_context(r->dir, r->parent, r->inheriting),
                                static_cast<std::size_t>(s.symbols()));
    return context_logprob(head, static_cast<std::size_t>(r->dir) * s.symbols() + r->inheriting) +
           context_logprob(dep, static_cast<std::size_t>(r->dependent));
  }
  const auto& e = std::get<EmissionRule>(rule);
  std::span<const double> emit(logits_.emit.data() + s.emit_context(e.preterminal),
                               static_cast<std::size_t>(s.vocab));
  return context_logprob(emit, static_cast<std::size_t>(e.word));
}

bool LexGrammar::operator==(const LexGrammar& other) const {
  return config_.num_nonterminals == other.config_.num_nonterminals &&
         config_.num_preterminals == other.config_.num_preterminals &&
         config_.seed == other.config_.seed &&
         config_.emission_smoothing == other.config_.emission_smoothing &&
         vocab_ == other.vocab_ && logits_ == other.logits_;
}

// ---- serialization ----------------------------------------------------------

std::string LexGrammar::to_json() const {
  const auto& s = shape();
  const int S = s.symbols();
  json j;
  j["version"] = kFormatVersion;
  j["num_nonterminals"] = s.nonterminals;
  j["num_preterminals"] = s.preterminals;
  j["seed"] = config_.seed;
  j["emission_smoothing"] = config_.emission_smoothing;
  j["vocabulary"] = vocab_.words();

  json head = json::array();
  for (int a = 0; a < s.nonterminals; ++a) {
    json per_word = json::array();
    for (int w = 0; w < s.vocab; ++w) {
      json dirs = json::array();
      for (int d = 0; d < 2; ++d) {
        auto begin = logits_.head.begin() +
                     static_cast<std::ptrdiff_t>(s.head_index(a, w, static_cast<Direction>(d), 0));
        dirs.push_back(std::vector<double>(begin, begin + S));
      }
      per_word.push_back(std::move(dirs));
    }
    head.push_back(std::move(per_word));
  }
  json dep = json::array();
  for (int d = 0; d < 2; ++d) {
    json per_parent = json::array();
    for (int a = 0; a < s.nonterminals; ++a) {
      json per_inh = json::array();
      for (int b = 0; b < S; ++b) {
        auto begin = logits_.dep.begin() +
                     static_cast<std::ptrdiff_t>(s.dep_context(static_cast<Direction>(d), a, b));
        per_inh.push_back(std::vector<double>(begin, begin + S));
      }
      per_parent.push_back(std::move(per_inh));
    }
    dep.push_back(std::move(per_parent));
  }
  json emit = json::array();
  for (int t = 0; t < s.preterminals; ++t) {
    auto begin = logits_.emit.begin() + static_cast<std::ptrdiff_t>(t) * s.vocab;
    emit.push_back(std::vector<double>(begin, begin + s.vocab));
  }
  j["tables"] = {{"root", logits_.root}, {"head", head}, {"dep", dep}, {"emit", emit}};
  return j.dump();
}

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("grammar file missing '") + key + "'");
  return j.at(key);
}

void read_row(const json& row, std::size_t expected, std::vector<double>& out, const char* what) {
  if (!row.is_array() || row.size() != expected)
    throw FormatError(std::string("grammar table '") + what + "' has wrong dimensions");
  for (const auto& v : row) {
    if (!v.is_number()) throw FormatError(std::string("non-numeric entry in '") + what + "'");
    out.push_back(v.get<double>());
  }
}

void expect_size(const json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n)
    throw FormatError(std::string("grammar table '") + what + "' has wrong dimensions");
}

}  // namespace

LexGrammar LexGrammar::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("grammar file is not valid JSON: ") + e.what());
  }
  if (require(j, "version") != kFormatVersion)
    throw FormatError("unsupported grammar version: " + require(j, "version").dump());
  GrammarConfig cfg;
  try {
    cfg.num_nonterminals = require(j, "num_nonterminals").get<int>();
    cfg.num_preterminals = require(j, "num_preterminals").get<int>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.emission_smoothing = j.value("emission_smoothing", 0.0);
  } catch (const json::type_error& e) {
    throw FormatError(std::string("grammar header: ") + e.what());
  }
  if (cfg.num_nonterminals < 1 || cfg.num_preterminals < 1)
    throw FormatError("grammar header has empty symbol inventory");
  std::vector<std::string> words;
  try {
    words = require(j, "vocabulary").get<std::vector<std::string>>();
  } catch (const json::type_error& e) {
    throw FormatError(std::string("grammar vocabulary: ") + e.what());
  }
  if (words.empty() || words.front() != Vocabulary::kUnk)
    throw FormatError("grammar vocabulary must start with the UNK token");
  Vocabulary vocab(words);
  GrammarShape s{cfg.num_nonterminals, cfg.num_preterminals, vocab.size()};
  const std::size_t S = static_cast<std::size_t>(s.symbols());
  const auto& tables = require(j, "tables");

  GrammarTables logits;
  logits.shape = s;
  read_row(require(tables, "root"), s.root_size(), logits.root, "root");

  const auto& head = require(tables, "head");
  expect_size(head, static_cast<std::size_t>(s.nonterminals), "head");
  for (const auto& per_word : head) {
    expect_size(per_word, static_cast<std::size_t>(s.vocab), "head");
    for (const auto& dirs : per_word) {
      expect_size(dirs, 2, "head");
      for (const auto& row : dirs) read_row(row, S, logits.head, "head");
    }
  }
  const auto& dep = require(tables, "dep");
  expect_size(dep, 2, "dep");
  for (const auto& per_parent : dep) {
    expect_size(per_parent, static_cast<std::size_t>(s.nonterminals), "dep");
    for (const auto& per_inh : per_parent) {
      expect_size(per_inh, S, "dep");
      for (const auto& row : per_inh) read_row(row, S, logits.dep, "dep");
    }
  }
  const auto& emit = require(tables, "emit");
  expect_size(emit, static_cast<std::size_t>(s.preterminals), "emit");
  for (const auto& row : emit) read_row(row, static_cast<std::size_t>(s.vocab), logits.emit, "emit");

  return LexGrammar(cfg, std::move(vocab), std::move(logits));
}

void LexGrammar::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write grammar file: " + path);
  out << to_json() << '\n';
  if (!out) throw InputError("failed writing grammar file: " + path);
}

LexGrammar LexGrammar::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read grammar file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace lexinduce
