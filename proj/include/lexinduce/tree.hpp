#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexinduce/grammar.hpp"
#include "lexinduce/vocabulary.hpp"

namespace lexinduce {

struct Sentence {
  std::string id;
  std::vector<WordId> token_ids;
  std::vector<std::string> surface;
  std::vector<std::string> lemmas;

  int size() const { return static_cast<int>(token_ids.size()); }

  // Tokens are lowercased before lookup; OOV maps to UNK. Lemmas default to
  // the lowercased tokens when empty.
  static Sentence from_tokens(std::string id, const std::vector<std::string>& tokens,
                              const std::vector<std::string>& lemmas, const Vocabulary& vocab);

  // n >= 2 and every id inside [0, vocab_size).
  void validate(int vocab_size) const;
};

struct TreeNode {
  int start = 0;
  int end = 0;  // inclusive
  int head = 0;
  Symbol label = 0;
  Direction dir = Direction::Left;
  int inheriting = -1;  // node indices; -1 for leaves
  int dependent = -1;

  bool is_leaf() const { return inheriting < 0; }
};

// Binary head-annotated tree stored as a flat node array.
class LexTree {
 public:
  LexTree() = default;
  LexTree(std::vector<TreeNode> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}

  int add_leaf(int position, Symbol preterminal);
  // `left` and `right` are given in surface order; `dir` decides which one
  // passes its head up (Left: A[a] -> B[a] C[b], Right: A[a] -> B[b] C[a]).
  // The newest node becomes the root.
  int add_binary(Symbol nonterminal, Direction dir, int left, int right);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int root() const { return root_; }
  const TreeNode& root_node() const { return node(root_); }
  Symbol root_label() const { return root_node().label; }
  int length() const { return nodes_.empty() ? 0 : root_node().end + 1; }

  int left_child(const TreeNode& n) const { return n.dir == Direction::Left ? n.inheriting : n.dependent; }
  int right_child(const TreeNode& n) const { return n.dir == Direction::Left ? n.dependent : n.inheriting; }

  // Throws StructureError unless the tree covers [0, n) with adjacent
  // disjoint sibling spans, head inheritance matching `dir`, preterminal
  // leaves and nonterminal internal nodes (label checks need `shape`).
  void validate(int sentence_length, const GrammarShape* shape = nullptr) const;

  bool operator==(const LexTree& other) const;

 private:
  std::vector<TreeNode> nodes_;
  int root_ = -1;
};

struct DependencyParse {
  static constexpr int kRoot = -1;
  std::vector<int> head_of;  // governor position, or kRoot

  int size() const { return static_cast<int>(head_of.size()); }
  // Exactly one root, every token reaches it, no cycles.
  bool is_tree() const;
  int root_position() const;
  bool operator==(const DependencyParse&) const = default;
};

using Span = std::pair<int, int>;  // inclusive (start, end)
using SpanSet = std::set<Span>;

// Constituent spans. With `exclude_trivial`, width-1 spans and the whole
// sentence are dropped.
SpanSet extract_spans(const LexTree& tree, bool exclude_trivial = true);

// One arc per binary node, from its head to the dependent child's head.
DependencyParse extract_dependencies(const LexTree& tree);

// "(NT2@1 (PT0@0 a) (PT1@1 dog))": labels are NT<id> / PT<id - N>, @ marks
// the head position.
std::string to_bracketed(const LexTree& tree, const std::vector<std::string>& surface,
                         int num_nonterminals);

}  // namespace lexinduce
