#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lexinduce/vocabulary.hpp"

namespace lexinduce {

enum class Direction : int { Left = 0, Right = 1 };

// Symbols live in one id space: [0, N) are nonterminals, [N, N+P) are
// preterminals.
using Symbol = int;

struct GrammarConfig {
  int num_nonterminals = 15;
  int num_preterminals = 20;
  std::uint64_t seed = 0;
  // Symmetric Dirichlet pseudo-count on emissions, applied by the trainer.
  double emission_smoothing = 0.0;

  void validate() const;
};

// Index arithmetic for the four conditional tables.
//
//   root  [A]                 N
//   head  [A][w][dir][B]      N * V * 2 * S      p(dir, B | A, w)
//   dep   [dir][A][B][C]      2 * N * S * S      p(C | dir, A, B)
//   emit  [T][w]              P * V              p(w | T)
//
// with S = N + P. The head table dominates: at N=15, P=20, V=10k it holds
// 10.5M doubles (84 MB), which is why rare words are folded into UNK.
struct GrammarShape {
  int nonterminals = 0;
  int preterminals = 0;
  int vocab = 0;

  int symbols() const { return nonterminals + preterminals; }
  bool is_nonterminal(Symbol x) const { return x >= 0 && x < nonterminals; }
  bool is_preterminal(Symbol x) const { return x >= nonterminals && x < symbols(); }

  std::size_t root_size() const { return static_cast<std::size_t>(nonterminals); }
  std::size_t head_size() const {
    return static_cast<std::size_t>(nonterminals) * vocab * 2 * symbols();
  }
  std::size_t dep_size() const {
    return static_cast<std::size_t>(2) * nonterminals * symbols() * symbols();
  }
  std::size_t emit_size() const { return static_cast<std::size_t>(preterminals) * vocab; }

  // Start of the 2*S block for context (A, w); add dir*S + B.
  std::size_t head_context(Symbol a, WordId w) const {
    return (static_cast<std::size_t>(a) * vocab + w) * 2 * symbols();
  }
  std::size_t head_index(Symbol a, WordId w, Direction d, Symbol b) const {
    return head_context(a, w) + static_cast<std::size_t>(d) * symbols() + b;
  }
  // Start of the S block for context (dir, A, B); add C.
  std::size_t dep_context(Direction d, Symbol a, Symbol b) const {
    return ((static_cast<std::size_t>(d) * nonterminals + a) * symbols() + b) * symbols();
  }
  std::size_t dep_index(Direction d, Symbol a, Symbol b, Symbol c) const {
    return dep_context(d, a, b) + c;
  }
  // T is a preterminal in the shared symbol space.
  std::size_t emit_context(Symbol t) const {
    return static_cast<std::size_t>(t - nonterminals) * vocab;
  }
  std::size_t emit_index(Symbol t, WordId w) const { return emit_context(t) + w; }

  bool operator==(const GrammarShape&) const = default;
};

// Dense storage shared by logits, log-probabilities and gradients.
struct GrammarTables {
  GrammarShape shape;
  std::vector<double> root;
  std::vector<double> head;
  std::vector<double> dep;
  std::vector<double> emit;

  GrammarTables() = default;
  explicit GrammarTables(const GrammarShape& s);

  // this += a * other
  void axpy(double a, const GrammarTables& other);
  double max_abs() const;

  bool operator==(const GrammarTables&) const = default;
};

// Log-softmax over every conditioning context.
GrammarTables log_normalize(const GrammarTables& logits);

struct RootRule {
  Symbol parent;
};
struct BinaryRule {
  Symbol parent;
  WordId head_word;
  Direction dir;
  Symbol inheriting;
  Symbol dependent;
};
struct EmissionRule {
  Symbol preterminal;
  WordId word;
};
using RuleDescriptor = std::variant<RootRule, BinaryRule, EmissionRule>;

// Reads from already-normalized tables. Throws std::out_of_range on bad ids.
double rule_logprob(const GrammarTables& log_probs, const RuleDescriptor& rule);

class LexGrammar {
 public:
  static constexpr const char* kFormatVersion = "lexinduce-grammar/1";

  LexGrammar(GrammarConfig config, Vocabulary vocab, GrammarTables logits);

  // Logits ~ N(0, 0.1^2), drawn in table order from config.seed.
  static LexGrammar new_random(const GrammarConfig& config, const Vocabulary& vocab);

  const GrammarConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const GrammarShape& shape() const { return logits_.shape; }
  const GrammarTables& logits() const { return logits_; }
  GrammarTables& mutable_logits() { return logits_; }

  GrammarTables log_probs() const { return log_normalize(logits_); }

  // Normalizes only the contexts the rule touches.
  double rule_logprob(const RuleDescriptor& rule) const;

  std::string to_json() const;
  static LexGrammar from_json(const std::string& text);
  void save(const std::string& path) const;
  static LexGrammar load(const std::string& path);

  bool operator==(const LexGrammar& other) const;

 private:
  GrammarConfig config_;
  Vocabulary vocab_;
  GrammarTables logits_;
};

}  // namespace lexinduce
