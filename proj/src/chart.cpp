#include "lexinduce/chart.hpp"

#include <cmath>
#include <string>

#include "lexinduce/error.hpp"
#include "lexinduce/logspace.hpp"

namespace lexinduce {

Chart::Chart(int length, int symbols)
    : n_(length),
      symbols_(symbols),
      inside_(static_cast<std::size_t>(length) * length * length * symbols, kNegInf),
      marginal_(static_cast<std::size_t>(length) * length * symbols, kNegInf) {}

namespace {

struct LabelRange {
  Symbol begin;
  Symbol end;
};

// Single tokens are preterminals; anything wider is a nonterminal.
LabelRange labels_for_width(const GrammarShape& s, int width) {
  return width == 1 ? LabelRange{s.nonterminals, s.symbols()} : LabelRange{0, s.nonterminals};
}

void check_inputs(const Sentence& sentence, const GrammarShape& shape, const SentencePriors& priors) {
  sentence.validate(shape.vocab);
  if (priors.length != sentence.size() || static_cast<int>(priors.root_bonus.size()) != sentence.size())
    throw ConfigError("priors were bound to a sentence of a different length");
}

// Shared by inside() and the masked variant behind posterior_any_rewarded().
// With `mask_rewarded`, cells that would receive the span potential are
// removed from the chart instead.
InsideResult run_inside(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors,
                        bool mask_rewarded) {
  const GrammarShape& s = scores.shape();
  check_inputs(sentence, s, priors);
  const GrammarTables& lp = scores.tables();
  const int n = sentence.size();
  const int N = s.nonterminals;
  const int S = s.symbols();
  const auto& words = sentence.token_ids;

  InsideResult result;
  Chart& chart = result.chart;
  chart = Chart(n, S);

  for (int i = 0; i < n; ++i) {
    for (Symbol t = N; t < S; ++t) {
      double v = lp.emit[s.emit_index(t, words[static_cast<std::size_t>(i)])];
      chart.inside_ref(i, i, i, t) = v;
      chart.marginal_ref(i, i, t) = v;
    }
  }

  std::vector<LogAccumulator> acc(static_cast<std::size_t>(n) * N);
  for (int width = 2; width <= n; ++width) {
    for (int i = 0; i + width - 1 < n; ++i) {
      const int j = i + width - 1;
      for (int h = i; h <= j; ++h)
        for (Symbol a = 0; a < N; ++a) acc[static_cast<std::size_t>(h) * N + a] = LogAccumulator{};

      for (int k = i; k < j; ++k) {
        const LabelRange left = labels_for_width(s, k - i + 1);
        const LabelRange right = labels_for_width(s, j - k);

        // Left-headed: (i,k) inherits, (k+1,j) is the dependent.
        for (Symbol a = 0; a < N; ++a) {
          for (Symbol b = left.begin; b < left.end; ++b) {
            const double* dep = lp.dep.data() + s.dep_context(Direction::Left, a, b);
            LogAccumulator ds;
            for (Symbol c = right.begin; c < right.end; ++c) ds.add(dep[c] + chart.head_marginal(k + 1, j, c));
            const double depsum = ds.value();
            for (int h = i; h <= k; ++h) {
              double t = lp.head[s.head_index(a, words[static_cast<std::size_t>(h)], Direction::Left, b)] +
                         chart.inside(i, k, h, b) + depsum;
              acc[static_cast<std::size_t>(h) * N + a].add(t);
            }
          }
        }
        // Right-headed: (k+1,j) inherits, (i,k) is the dependent.
        for (Symbol a = 0; a < N; ++a) {
          for (Symbol b = right.begin; b < right.end; ++b) {
            const double* dep = lp.dep.data() + s.dep_context(Direction::Right, a, b);
            LogAccumulator ds;
            for (Symbol c = left.begin; c < left.end; ++c) ds.add(dep[c] + chart.head_marginal(i, k, c));
            const double depsum = ds.value();
            for (int h = k + 1; h <= j; ++h) {
              double t = lp.head[s.head_index(a, words[static_cast<std::size_t>(h)], Direction::Right, b)] +
                         chart.inside(k + 1, j, h, b) + depsum;
              acc[static_cast<std::size_t>(h) * N + a].add(t);
            }
          }
        }
      }

      for (Symbol a = 0; a < N; ++a) {
        LogAccumulator marg;
        for (int h = i; h <= j; ++h) {
          double v = acc[static_cast<std::size_t>(h) * N + a].value();
          if (mask_rewarded) {
            if (priors.potential_applies(i, j, h)) v = kNegInf;
          } else {
            v += priors.span_bonus(i, j, h);
          }
          chart.inside_ref(i, j, h, a) = v;
          marg.add(v);
        }
        chart.marginal_ref(i, j, a) = marg.value();
      }
    }
  }

  LogAccumulator total;
  for (Symbol a = 0; a < N; ++a)
    for (int h = 0; h < n; ++h)
      total.add(lp.root[static_cast<std::size_t>(a)] + chart.inside(0, n - 1, h, a) +
                priors.root_bonus[static_cast<std::size_t>(h)]);
  result.log_marginal = total.value();
  if (std::isnan(result.log_marginal) || (!mask_rewarded && !std::isfinite(result.log_marginal)))
    throw NumericError("non-finite log marginal for sentence " + sentence.id);
  return result;
}

}  // namespace

InsideResult inside(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors) {
  return run_inside(sentence, scores, priors, false);
}

InsideResult inside(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors) {
  priors.validate();
  return inside(sentence, RuleScores(grammar), SentencePriors::bind(priors, sentence));
}

// ---- Viterbi ------------------------------------------------------------------

namespace {

struct BackPointer {
  int split = -1;
  Direction dir = Direction::Left;
  Symbol inheriting = -1;
  Symbol dependent = -1;
  int dependent_head = -1;
};

}  // namespace

ViterbiResult viterbi(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors) {
  const GrammarShape& s = scores.shape();
  check_inputs(sentence, s, priors);
  const GrammarTables& lp = scores.tables();
  const int n = sentence.size();
  const int N = s.nonterminals;
  const int S = s.symbols();
  const auto& words = sentence.token_ids;

  Chart best(n, S);
  // Best head per (span, label) for use as a dependent child.
  std::vector<int> best_head(static_cast<std::size_t>(n) * n * S, -1);
  auto span_label = [&](int i, int j, Symbol x) { return (static_cast<std::size_t>(i) * n + j) * S + x; };
  std::vector<BackPointer> bp(static_cast<std::size_t>(n) * n * n * N);
  auto bp_at = [&](int i, int j, int h, Symbol a) -> BackPointer& {
    return bp[((static_cast<std::size_t>(i) * n + j) * n + h) * N + a];
  };

  for (int i = 0; i < n; ++i) {
    for (Symbol t = N; t < S; ++t) {
      double v = lp.emit[s.emit_index(t, words[static_cast<std::size_t>(i)])];
      best.inside_ref(i, i, i, t) = v;
      best.marginal_ref(i, i, t) = v;
      best_head[span_label(i, i, t)] = i;
    }
  }

  for (int width = 2; width <= n; ++width) {
    for (int i = 0; i + width - 1 < n; ++i) {
      const int j = i + width - 1;
      for (int k = i; k < j; ++k) {
        const LabelRange left = labels_for_width(s, k - i + 1);
        const LabelRange right = labels_for_width(s, j - k);
        for (int d = 0; d < 2; ++d) {
          const Direction dir = static_cast<Direction>(d);
          const bool left_inherits = dir == Direction::Left;
          const int inh_i = left_inherits ? i : k + 1;
          const int inh_j = left_inherits ? k : j;
          const int dep_i = left_inherits ? k + 1 : i;
          const int dep_j = left_inherits ? j : k;
          const LabelRange inh = left_inherits ? left : right;
          const LabelRange depr = left_inherits ? right : left;
          for (Symbol a = 0; a < N; ++a) {
            for (Symbol b = inh.begin; b < inh.end; ++b) {
              const double* dep = lp.dep.data() + s.dep_context(dir, a, b);
              double dep_best = kNegInf;
              Symbol dep_label = -1;
              for (Symbol c = depr.begin; c < depr.end; ++c) {
                double v = dep[c] + best.head_marginal(dep_i, dep_j, c);
                if (v > dep_best) {
                  dep_best = v;
                  dep_label = c;
                }
              }
              if (dep_label < 0) continue;
              for (int h = inh_i; h <= inh_j; ++h) {
                double t = lp.head[s.head_index(a, words[static_cast<std::size_t>(h)], dir, b)] +
                           best.inside(inh_i, inh_j, h, b) + dep_best;
                double& cur = best.inside_ref(i, j, h, a);
                if (t > cur) {
                  cur = t;
                  bp_at(i, j, h, a) = {k, dir, b, dep_label, best_head[span_label(dep_i, dep_j, dep_label)]};
                }
              }
            }
          }
        }
      }
      for (Symbol a = 0; a < N; ++a) {
        double m = kNegInf;
        for (int h = i; h <= j; ++h) {
          double& v = best.inside_ref(i, j, h, a);
          v += priors.span_bonus(i, j, h);
          if (v > m) {
            m = v;
            best_head[span_label(i, j, a)] = h;
          }
        }
        best.marginal_ref(i, j, a) = m;
      }
    }
  }

  double top = kNegInf;
  Symbol top_label = -1;
  int top_head = -1;
  for (Symbol a = 0; a < N; ++a) {
    for (int h = 0; h < n; ++h) {
      double v = lp.root[static_cast<std::size_t>(a)] + best.inside(0, n - 1, h, a) +
                 priors.root_bonus[static_cast<std::size_t>(h)];
      if (v > top) {
        top = v;
        top_label = a;
        top_head = h;
      }
    }
  }
  if (!std::isfinite(top)) throw NumericError("no finite Viterbi tree for sentence " + sentence.id);

  ViterbiResult result;
  result.score = top;
  LexTree& tree = result.tree;
  auto build = [&](auto&& self, int i, int j, int h, Symbol x) -> int {
    if (i == j) return tree.add_leaf(i, x);
    const BackPointer p = bp_at(i, j, h, x);
    const int k = p.split;
    int inh, dep;
    if (p.dir == Direction::Left) {
      inh = self(self, i, k, h, p.inheriting);
      dep = self(self, k + 1, j, p.dependent_head, p.dependent);
      return tree.add_binary(x, p.dir, inh, dep);
    }
    dep = self(self, i, k, p.dependent_head, p.dependent);
    inh = self(self, k + 1, j, h, p.inheriting);
    return tree.add_binary(x, p.dir, dep, inh);
  };
  build(build, 0, n - 1, top_head, top_label);
  return result;
}

ViterbiResult viterbi(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors) {
  priors.validate();
  return viterbi(sentence, RuleScores(grammar), SentencePriors::bind(priors.for_decoding(), sentence));
}

// ---- tree scoring -------------------------------------------------------------

double tree_score_unchecked(const LexTree& tree, const Sentence& sentence, const GrammarTables& lp,
                            const SentencePriors& priors) {
  const GrammarShape& s = lp.shape;
  const auto& root = tree.root_node();
  double score = lp.root[static_cast<std::size_t>(root.label)] +
                 priors.root_bonus[static_cast<std::size_t>(root.head)];
  for (const auto& node : tree.nodes()) {
    const WordId w = sentence.token_ids[static_cast<std::size_t>(node.head)];
    if (node.is_leaf()) {
      score += lp.emit[s.emit_index(node.label, w)];
      continue;
    }
    const Symbol b = tree.node(node.inheriting).label;
    const Symbol c = tree.node(node.dependent).label;
    score += lp.head[s.head_index(node.label, w, node.dir, b)] + lp.dep[s.dep_index(node.dir, node.label, b, c)] +
             priors.span_bonus(node.start, node.end, node.head);
  }
  return score;
}

double tree_score(const LexTree& tree, const Sentence& sentence, const RuleScores& scores,
                  const SentencePriors& priors) {
  check_inputs(sentence, scores.shape(), priors);
  tree.validate(sentence.size(), &scores.shape());
  // Sum through rule_logprob so range checks apply to every rule.
  const GrammarTables& lp = scores.tables();
  double score = rule_logprob(lp, RootRule{tree.root_label()}) +
                 priors.root_bonus[static_cast<std::size_t>(tree.root_node().head)];
  for (const auto& node : tree.nodes()) {
    const WordId w = sentence.token_ids[static_cast<std::size_t>(node.head)];
    if (node.is_leaf()) {
      score += rule_logprob(lp, EmissionRule{node.label, w});
    } else {
      score += rule_logprob(lp, BinaryRule{node.label, w, node.dir, tree.node(node.inheriting).label,
                                           tree.node(node.dependent).label}) +
               priors.span_bonus(node.start, node.end, node.head);
    }
  }
  return score;
}

double tree_score(const LexTree& tree, const Sentence& sentence, const LexGrammar& grammar,
                  const PriorBundle& priors) {
  priors.validate();
  return tree_score(tree, sentence, RuleScores(grammar), SentencePriors::bind(priors, sentence));
}

// ---- outside pass and gradients -------------------------------------------------

ExpectedCounts::ExpectedCounts(const GrammarShape& s)
    : shape(s), root(s.root_size(), 0.0), dep(s.dep_size(), 0.0) {}

void ExpectedCounts::add(const ExpectedCounts& other) {
  if (!(shape == other.shape)) throw std::invalid_argument("count shape mismatch");
  log_marginal += other.log_marginal;
  for (std::size_t i = 0; i < root.size(); ++i) root[i] += other.root[i];
  for (std::size_t i = 0; i < dep.size(); ++i) dep[i] += other.dep[i];
  for (const auto& [w, v] : other.head) {
    auto& mine = head[w];
    if (mine.empty()) mine.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) mine[i] += v[i];
  }
  for (const auto& [w, v] : other.emit) {
    auto& mine = emit[w];
    if (mine.empty()) mine.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) mine[i] += v[i];
  }
}

ExpectedCounts posterior_counts(const Sentence& sentence, const RuleScores& scores,
                                const SentencePriors& priors) {
  InsideResult in = run_inside(sentence, scores, priors, false);
  const Chart& I = in.chart;
  const double Z = in.log_marginal;
  const GrammarShape& s = scores.shape();
  const GrammarTables& lp = scores.tables();
  const int n = sentence.size();
  const int N = s.nonterminals;
  const int S = s.symbols();
  const auto& words = sentence.token_ids;

  ExpectedCounts counts(s);
  counts.log_marginal = Z;
  const std::size_t head_block = static_cast<std::size_t>(2) * S;
  std::vector<double*> head_counts(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) {
    auto& v = counts.head[words[static_cast<std::size_t>(h)]];
    if (v.empty()) v.assign(static_cast<std::size_t>(N) * head_block, 0.0);
  }
  for (int h = 0; h < n; ++h) head_counts[static_cast<std::size_t>(h)] = counts.head[words[static_cast<std::size_t>(h)]].data();

  // O holds the outside score of a cell as an inheriting child (and, once
  // the cell is processed, its full outside score); OM collects outside mass
  // arriving through the head-marginalized dependent slot.
  Chart O(n, S);
  Chart OM(n, S);

  for (Symbol a = 0; a < N; ++a) {
    for (int h = 0; h < n; ++h) {
      double o = lp.root[static_cast<std::size_t>(a)] + priors.root_bonus[static_cast<std::size_t>(h)];
      O.inside_ref(0, n - 1, h, a) = o;
      counts.root[static_cast<std::size_t>(a)] += std::exp(o + I.inside(0, n - 1, h, a) - Z);
    }
  }

  std::vector<double> parent_out(static_cast<std::size_t>(n) * N);
  for (int width = n; width >= 2; --width) {
    for (int i = 0; i + width - 1 < n; ++i) {
      const int j = i + width - 1;
      for (int h = i; h <= j; ++h) {
        for (Symbol a = 0; a < N; ++a) {
          double& o = O.inside_ref(i, j, h, a);
          o = log_add(o, OM.head_marginal(i, j, a));
          // The span potential sits inside this cell's inside score, so the
          // children see it as part of their outside context.
          parent_out[static_cast<std::size_t>(h) * N + a] =
              o == kNegInf || I.inside(i, j, h, a) == kNegInf ? kNegInf : o + priors.span_bonus(i, j, h);
        }
      }
      for (int k = i; k < j; ++k) {
        const LabelRange left = labels_for_width(s, k - i + 1);
        const LabelRange right = labels_for_width(s, j - k);
        for (int d = 0; d < 2; ++d) {
          const Direction dir = static_cast<Direction>(d);
          const bool left_inherits = dir == Direction::Left;
          const int inh_i = left_inherits ? i : k + 1;
          const int inh_j = left_inherits ? k : j;
          const int dep_i = left_inherits ? k + 1 : i;
          const int dep_j = left_inherits ? j : k;
          const LabelRange inh = left_inherits ? left : right;
          const LabelRange depr = left_inherits ? right : left;
          for (Symbol a = 0; a < N; ++a) {
            for (Symbol b = inh.begin; b < inh.end; ++b) {
              const std::size_t dctx = s.dep_context(dir, a, b);
              const double* dep = lp.dep.data() + dctx;
              LogAccumulator ds;
              for (Symbol c = depr.begin; c < depr.end; ++c) ds.add(dep[c] + I.head_marginal(dep_i, dep_j, c));
              const double depsum = ds.value();
              LogAccumulator q;
              for (int h = inh_i; h <= inh_j; ++h) {
                const double po = parent_out[static_cast<std::size_t>(h) * N + a];
                if (po == kNegInf) continue;
                const std::size_t hidx = static_cast<std::size_t>(a) * head_block + static_cast<std::size_t>(d) * S + b;
                const double r = po + lp.head[s.head_context(a, words[static_cast<std::size_t>(h)]) +
                                              static_cast<std::size_t>(d) * S + b];
                const double ih = I.inside(inh_i, inh_j, h, b);
                head_counts[static_cast<std::size_t>(h)][hidx] += std::exp(r + ih + depsum - Z);
                double& o = O.inside_ref(inh_i, inh_j, h, b);
                o = log_add(o, r + depsum);
                q.add(r + ih);
              }
              const double qv = q.value();
              if (qv == kNegInf) continue;
              for (Symbol c = depr.begin; c < depr.end; ++c) {
                const double t = qv + dep[c];
                counts.dep[dctx + static_cast<std::size_t>(c)] += std::exp(t + I.head_marginal(dep_i, dep_j, c) - Z);
                double& om = OM.marginal_ref(dep_i, dep_j, c);
                om = log_add(om, t);
              }
            }
          }
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    auto& e = counts.emit[words[static_cast<std::size_t>(i)]];
    if (e.empty()) e.assign(static_cast<std::size_t>(s.preterminals), 0.0);
    for (Symbol t = N; t < S; ++t) {
      double o = log_add(O.inside(i, i, i, t), OM.head_marginal(i, i, t));
      e[static_cast<std::size_t>(t - N)] += std::exp(I.inside(i, i, i, t) + o - Z);
    }
  }
  return counts;
}

void accumulate_gradient(const ExpectedCounts& counts, const GrammarTables& lp, GrammarTables& grad) {
  const GrammarShape& s = lp.shape;
  if (!(grad.shape == s) || !(counts.shape == s)) throw std::invalid_argument("gradient shape mismatch");
  const int N = s.nonterminals;
  const int S = s.symbols();

  double root_total = 0.0;
  for (double c : counts.root) root_total += c;
  for (std::size_t a = 0; a < counts.root.size(); ++a)
    grad.root[a] += counts.root[a] - std::exp(lp.root[a]) * root_total;

  const std::size_t head_block = static_cast<std::size_t>(2) * S;
  for (const auto& [w, c] : counts.head) {
    for (Symbol a = 0; a < N; ++a) {
      const double* ca = c.data() + static_cast<std::size_t>(a) * head_block;
      double total = 0.0;
      for (std::size_t k = 0; k < head_block; ++k) total += ca[k];
      const std::size_t ctx = s.head_context(a, w);
      for (std::size_t k = 0; k < head_block; ++k)
        grad.head[ctx + k] += ca[k] - std::exp(lp.head[ctx + k]) * total;
    }
  }

  for (std::size_t ctx = 0; ctx < counts.dep.size(); ctx += static_cast<std::size_t>(S)) {
    double total = 0.0;
    for (int c = 0; c < S; ++c) total += counts.dep[ctx + static_cast<std::size_t>(c)];
    if (total == 0.0) continue;
    for (int c = 0; c < S; ++c) {
      const std::size_t idx = ctx + static_cast<std::size_t>(c);
      grad.dep[idx] += counts.dep[idx] - std::exp(lp.dep[idx]) * total;
    }
  }

  std::vector<double> emit_total(static_cast<std::size_t>(s.preterminals), 0.0);
  for (const auto& [w, c] : counts.emit)
    for (std::size_t t = 0; t < c.size(); ++t) emit_total[t] += c[t];
  for (int t = 0; t < s.preterminals; ++t) {
    const double total = emit_total[static_cast<std::size_t>(t)];
    if (total == 0.0) continue;
    const std::size_t ctx = s.emit_context(N + t);
    for (int w = 0; w < s.vocab; ++w) grad.emit[ctx + static_cast<std::size_t>(w)] -= std::exp(lp.emit[ctx + static_cast<std::size_t>(w)]) * total;
  }
  for (const auto& [w, c] : counts.emit)
    for (int t = 0; t < s.preterminals; ++t) grad.emit[s.emit_index(N + t, w)] += c[static_cast<std::size_t>(t)];
}

GrammarTables expected_counts(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors) {
  priors.validate();
  RuleScores scores(grammar);
  auto counts = posterior_counts(sentence, scores, SentencePriors::bind(priors, sentence));
  GrammarTables grad(grammar.shape());
  accumulate_gradient(counts, scores.tables(), grad);
  return grad;
}

double posterior_root_head(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors,
                           int position) {
  InsideResult in = run_inside(sentence, scores, priors, false);
  if (position < 0 || position >= sentence.size()) throw std::out_of_range("root position out of range");
  LogAccumulator acc;
  const int n = sentence.size();
  for (Symbol a = 0; a < scores.shape().nonterminals; ++a)
    acc.add(scores.tables().root[static_cast<std::size_t>(a)] + in.chart.inside(0, n - 1, position, a) +
            priors.root_bonus[static_cast<std::size_t>(position)]);
  return std::exp(acc.value() - in.log_marginal);
}

double posterior_any_rewarded(const Sentence& sentence, const RuleScores& scores,
                              const SentencePriors& priors) {
  const double all = run_inside(sentence, scores, priors, false).log_marginal;
  const double without = run_inside(sentence, scores, priors, true).log_marginal;
  return -std::expm1(without - all);
}

}  // namespace lexinduce
