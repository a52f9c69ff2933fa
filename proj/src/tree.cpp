#include "lexinduce/tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "lexinduce/error.hpp"

namespace lexinduce {

namespace {
std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

Sentence Sentence::from_tokens(std::string id, const std::vector<std::string>& tokens,
                               const std::vector<std::string>& lemmas, const Vocabulary& vocab) {
  if (!lemmas.empty() && lemmas.size() != tokens.size())
    throw InputError("sentence " + id + ": token and lemma counts differ");
  Sentence s;
  s.id = std::move(id);
  s.surface = tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    s.token_ids.push_back(vocab.id(lowercase(tokens[i])));
    s.lemmas.push_back(lowercase(lemmas.empty() ? tokens[i] : lemmas[i]));
  }
  return s;
}

void Sentence::validate(int vocab_size) const {
  if (size() < 2) throw InputError("sentence " + id + ": length must be >= 2");
  for (WordId w : token_ids)
    if (w < 0 || w >= vocab_size) throw std::out_of_range("sentence " + id + ": word id out of range");
}

int LexTree::add_leaf(int position, Symbol preterminal) {
  TreeNode n;
  n.start = n.end = n.head = position;
  n.label = preterminal;
  nodes_.push_back(n);
  root_ = static_cast<int>(nodes_.size()) - 1;
  return root_;
}

int LexTree::add_binary(Symbol nonterminal, Direction dir, int left, int right) {
  const TreeNode& l = node(left);
  const TreeNode& r = node(right);
  TreeNode n;
  n.start = l.start;
  n.end = r.end;
  n.label = nonterminal;
  n.dir = dir;
  n.inheriting = dir == Direction::Left ? left : right;
  n.dependent = dir == Direction::Left ? right : left;
  n.head = node(n.inheriting).head;
  nodes_.push_back(n);
  root_ = static_cast<int>(nodes_.size()) - 1;
  return root_;
}

void LexTree::validate(int sentence_length, const GrammarShape* shape) const {
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size())) throw StructureError("tree has no root");
  std::vector<int> visits(nodes_.size(), 0);
  int next_leaf = 0;
  std::function<void(int)> walk = [&](int i) {
    if (i < 0 || i >= static_cast<int>(nodes_.size())) throw StructureError("child index out of range");
    if (visits[static_cast<std::size_t>(i)]++) throw StructureError("node reachable twice");
    const TreeNode& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) {
      if (n.dependent >= 0) throw StructureError("leaf with a dependent child");
      if (n.start != next_leaf || n.end != n.start || n.head != n.start)
        throw StructureError("leaf span/head inconsistent at position " + std::to_string(next_leaf));
      if (shape && !shape->is_preterminal(n.label)) throw StructureError("leaf label is not a preterminal");
      ++next_leaf;
      return;
    }
    if (n.dependent < 0) throw StructureError("binary node missing dependent child");
    if (shape && !shape->is_nonterminal(n.label)) throw StructureError("internal label is not a nonterminal");
    int l = left_child(n), r = right_child(n);
    walk(l);
    walk(r);
    const TreeNode& ln = nodes_[static_cast<std::size_t>(l)];
    const TreeNode& rn = nodes_[static_cast<std::size_t>(r)];
    if (ln.end + 1 != rn.start || n.start != ln.start || n.end != rn.end)
      throw StructureError("sibling spans not adjacent or parent span mismatch");
    if (n.head != nodes_[static_cast<std::size_t>(n.inheriting)].head)
      throw StructureError("node head differs from its inheriting child's head");
  };
  walk(root_);
  if (next_leaf != sentence_length || root_node().start != 0 || root_node().end != sentence_length - 1)
    throw StructureError("tree does not cover the sentence");
}

bool LexTree::operator==(const LexTree& other) const {
  // Structural equality, independent of node storage order.
  std::function<bool(int, int)> eq = [&](int a, int b) {
    const TreeNode& x = node(a);
    const TreeNode& y = other.node(b);
    if (x.start != y.start || x.end != y.end || x.head != y.head || x.label != y.label ||
        x.is_leaf() != y.is_leaf())
      return false;
    if (x.is_leaf()) return true;
    return x.dir == y.dir && eq(x.inheriting, y.inheriting) && eq(x.dependent, y.dependent);
  };
  if (nodes_.empty() || other.nodes_.empty()) return nodes_.empty() && other.nodes_.empty();
  return eq(root_, other.root_);
}

bool DependencyParse::is_tree() const {
  const int n = size();
  int roots = 0;
  for (int h : head_of) {
    if (h == kRoot) {
      ++roots;
    } else if (h < 0 || h >= n) {
      return false;
    }
  }
  if (roots != 1) return false;
  for (int d = 0; d < n; ++d) {
    int cur = d;
    for (int steps = 0; cur != kRoot; ++steps) {
      if (steps > n) return false;  // cycle
      cur = head_of[static_cast<std::size_t>(cur)];
    }
  }
  return true;
}

int DependencyParse::root_position() const {
  for (int i = 0; i < size(); ++i)
    if (head_of[static_cast<std::size_t>(i)] == kRoot) return i;
  return kRoot;
}

SpanSet extract_spans(const LexTree& tree, bool exclude_trivial) {
  SpanSet out;
  const int n = tree.length();
  for (const auto& node : tree.nodes()) {
    if (exclude_trivial && (node.start == node.end || (node.start == 0 && node.end == n - 1))) continue;
    out.emplace(node.start, node.end);
  }
  return out;
}

DependencyParse extract_dependencies(const LexTree& tree) {
  DependencyParse parse;
  parse.head_of.assign(static_cast<std::size_t>(tree.length()), DependencyParse::kRoot);
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) continue;
    parse.head_of[static_cast<std::size_t>(tree.node(node.dependent).head)] = node.head;
  }
  return parse;
}

namespace {
std::string escape_word(const std::string& w) {
  if (w == "(") return "-LRB-";
  if (w == ")") return "-RRB-";
  std::string out;
  for (char c : w) out += c == '(' ? '{' : c == ')' ? '}' : c;
  return out;
}
}  // namespace

std::string to_bracketed(const LexTree& tree, const std::vector<std::string>& surface,
                         int num_nonterminals) {
  std::string out;
  std::function<void(int)> emit = [&](int i) {
    const TreeNode& n = tree.node(i);
    if (n.is_leaf()) {
      out += "(PT" + std::to_string(n.label - num_nonterminals) + "@" + std::to_string(n.head) + " " +
             escape_word(surface.at(static_cast<std::size_t>(n.start))) + ")";
      return;
    }
    out += "(NT" + std::to_string(n.label) + "@" + std::to_string(n.head) + " ";
    emit(tree.left_child(n));
    out += " ";
    emit(tree.right_child(n));
    out += ")";
  };
  emit(tree.root());
  return out;
}

}  // namespace lexinduce
