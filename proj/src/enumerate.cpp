#include "lexinduce/enumerate.hpp"

#include <algorithm>

#include "lexinduce/error.hpp"
#include "lexinduce/logspace.hpp"

namespace lexinduce {

namespace {

struct Pending {
  int node;
  int start;
  int end;
};

template <class Visit>
class TreeWalker {
 public:
  TreeWalker(int length, const GrammarShape& shape, Visit& visit)
      : n_(length), shape_(shape), visit_(visit) {}

  void run() {
    nodes_.assign(1, TreeNode{});
    pending_.push_back({0, 0, n_ - 1});
    expand();
  }

 private:
  void expand() {
    if (pending_.empty()) {
      // Children always sit after their parent, so a reverse sweep settles heads.
      for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
        it->head = it->is_leaf() ? it->start : nodes_[static_cast<std::size_t>(it->inheriting)].head;
      visit_(LexTree(nodes_, 0));
      return;
    }
    const Pending item = pending_.back();
    pending_.pop_back();
    const auto idx = static_cast<std::size_t>(item.node);
    if (item.start == item.end) {
      for (Symbol t = shape_.nonterminals; t < shape_.symbols(); ++t) {
        nodes_[idx] = TreeNode{item.start, item.end, item.start, t, Direction::Left, -1, -1};
        expand();
      }
    } else {
      const std::size_t base = nodes_.size();
      for (Symbol a = 0; a < shape_.nonterminals; ++a) {
        for (int k = item.start; k < item.end; ++k) {
          for (int d = 0; d < 2; ++d) {
            const auto dir = static_cast<Direction>(d);
            const int left = static_cast<int>(base);
            const int right = left + 1;
            nodes_.resize(base + 2);
            nodes_[idx] = TreeNode{item.start, item.end, 0, a, dir,
                                   dir == Direction::Left ? left : right,
                                   dir == Direction::Left ? right : left};
            pending_.push_back({left, item.start, k});
            pending_.push_back({right, k + 1, item.end});
            expand();
            pending_.pop_back();
            pending_.pop_back();
            nodes_.resize(base);
          }
        }
      }
    }
    pending_.push_back(item);
  }

  int n_;
  const GrammarShape& shape_;
  Visit& visit_;
  std::vector<TreeNode> nodes_;
  std::vector<Pending> pending_;
};

template <class Visit>
void walk_trees(int length, const GrammarShape& shape, Visit& visit) {
  if (length > kMaxEnumerationLength)
    throw ConfigError("enumeration refused: length " + std::to_string(length) + " exceeds " +
                      std::to_string(kMaxEnumerationLength));
  if (length < 1) throw ConfigError("enumeration needs a non-empty sentence");
  TreeWalker<Visit> walker(length, shape, visit);
  walker.run();
}

}  // namespace

void for_each_tree(int length, const GrammarShape& shape, const std::function<void(const LexTree&)>& visit) {
  auto fn = [&visit](const LexTree& t) { visit(t); };
  walk_trees(length, shape, fn);
}

std::vector<ScoredTree> enumerate_trees(const Sentence& sentence, const RuleScores& scores,
                                        const SentencePriors& priors) {
  sentence.validate(scores.shape().vocab);
  std::vector<ScoredTree> out;
  auto fn = [&](const LexTree& t) {
    out.push_back({t, tree_score_unchecked(t, sentence, scores.tables(), priors)});
  };
  walk_trees(sentence.size(), scores.shape(), fn);
  return out;
}

EnumerationSummary enumerate_summary(const Sentence& sentence, const RuleScores& scores,
                                     const SentencePriors& priors) {
  sentence.validate(scores.shape().vocab);
  EnumerationSummary summary;
  summary.max_score = kNegInf;
  LogAccumulator total;
  auto fn = [&](const LexTree& t) {
    const double v = tree_score_unchecked(t, sentence, scores.tables(), priors);
    ++summary.count;
    total.add(v);
    summary.max_score = std::max(summary.max_score, v);
  };
  walk_trees(sentence.size(), scores.shape(), fn);
  summary.log_sum = total.value();
  return summary;
}

}  // namespace lexinduce
