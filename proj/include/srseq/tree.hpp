#pragma once

// Constituent trees over (possibly discontinuous) yields.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srseq {

/// Sorted set of 0-based word positions covered by a node.
using Yield = std::vector<int>;

inline bool is_consecutive(const Yield& yield) {
  for (std::size_t i = 1; i < yield.size(); ++i)
    if (yield[i] != yield[i - 1] + 1) return false;
  return true;
}

/// A leaf (position >= 0, no label) or a labeled constituent with ordered
/// children. Children are kept sorted by the minimum position of their
/// yield; the constructor enforces this so equal trees compare equal.
class Node {
 public:
  static Node leaf(int position) {
    Node n;
    n.position_ = position;
    n.yield_ = {position};
    return n;
  }

  Node(std::string label, std::vector<Node> children)
      : label_(std::move(label)), children_(std::move(children)) {
    std::stable_sort(children_.begin(), children_.end(),
                     [](const Node& a, const Node& b) { return a.min_position() < b.min_position(); });
    for (const auto& c : children_) yield_.insert(yield_.end(), c.yield_.begin(), c.yield_.end());
    std::sort(yield_.begin(), yield_.end());
  }

  bool is_leaf() const { return position_ >= 0; }
  int position() const { return position_; }
  const std::string& label() const { return label_; }
  const std::vector<Node>& children() const { return children_; }
  const Yield& yield() const { return yield_; }
  int min_position() const { return yield_.empty() ? -1 : yield_.front(); }
  bool is_continuous() const { return is_consecutive(yield_); }

  friend bool operator==(const Node& a, const Node& b) {
    return a.position_ == b.position_ && a.label_ == b.label_ && a.children_ == b.children_;
  }

 private:
  Node() = default;

  std::string label_;
  int position_ = -1;
  std::vector<Node> children_;
  Yield yield_;
};

/// A labeled constituent as seen by evaluation and set-valued queries.
struct Constituent {
  std::string label;
  Yield yield;

  friend bool operator==(const Constituent&, const Constituent&) = default;
  friend auto operator<=>(const Constituent&, const Constituent&) = default;
};

struct Violation {
  std::string message;
  std::string node;  // label of the offending node, or "<leaf>"
};

class ConstituentTree {
 public:
  ConstituentTree(std::vector<std::string> words, Node root)
      : words_(std::move(words)), root_(std::move(root)) {}

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  const Node& root() const { return root_; }

  friend bool operator==(const ConstituentTree&, const ConstituentTree&) = default;

 private:
  std::vector<std::string> words_;
  Node root_;
};

namespace detail {

template <typename F>
void for_each_constituent(const Node& node, F&& f) {
  if (node.is_leaf()) return;
  f(node);
  for (const auto& c : node.children()) for_each_constituent(c, f);
}

inline std::optional<Violation> check_node(const Node& node, std::size_t n) {
  if (node.is_leaf()) {
    if (node.position() >= static_cast<int>(n)) return Violation{"leaf position out of range", "<leaf>"};
    return std::nullopt;
  }
  if (node.children().empty()) return Violation{"empty constituent", node.label()};
  if (node.label().empty()) return Violation{"missing label", node.label()};
  for (const auto& c : node.children())
    if (auto v = check_node(c, n)) return v;
  // node.yield() is the sorted concatenation of the child yields.
  const Yield& y = node.yield();
  if (std::adjacent_find(y.begin(), y.end()) != y.end()) return Violation{"overlapping child yields", node.label()};
  return std::nullopt;
}

}  // namespace detail

/// All constituents of the tree in pre-order.
inline std::vector<Constituent> constituents(const ConstituentTree& tree) {
  std::vector<Constituent> out;
  detail::for_each_constituent(tree.root(), [&](const Node& n) { out.push_back({n.label(), n.yield()}); });
  return out;
}

inline bool is_continuous(const ConstituentTree& tree) {
  bool ok = true;
  detail::for_each_constituent(tree.root(), [&](const Node& n) { ok = ok && n.is_continuous(); });
  return ok;
}

inline std::vector<Constituent> discontinuous_constituents(const ConstituentTree& tree) {
  std::vector<Constituent> out;
  detail::for_each_constituent(tree.root(), [&](const Node& n) {
    if (!n.is_continuous()) out.push_back({n.label(), n.yield()});
  });
  return out;
}

/// Leaf positions in depth-first order over the stored child order.
/// Reading the sentence in this order makes every constituent contiguous.
inline std::vector<int> canonical_leaf_order(const ConstituentTree& tree) {
  std::vector<int> order;
  order.reserve(tree.size());
  auto visit = [&](auto&& self, const Node& n) -> void {
    if (n.is_leaf()) {
      order.push_back(n.position());
      return;
    }
    for (const auto& c : n.children()) self(self, c);
  };
  visit(visit, tree.root());
  return order;
}

/// Renumber leaves so that the word at order[i] moves to position i.
inline ConstituentTree relabel_leaves(const ConstituentTree& tree, const std::vector<int>& order) {
  if (order.size() != tree.size()) throw std::invalid_argument("permutation size does not match sentence length");
  std::vector<int> new_position(order.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= static_cast<int>(order.size()) || new_position[order[i]] != -1)
      throw std::invalid_argument("not a permutation");
    new_position[order[i]] = static_cast<int>(i);
  }
  std::vector<std::string> words(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) words[i] = tree.words()[order[i]];
  auto rebuild = [&](auto&& self, const Node& n) -> Node {
    if (n.is_leaf()) return Node::leaf(new_position[n.position()]);
    std::vector<Node> kids;
    kids.reserve(n.children().size());
    for (const auto& c : n.children()) kids.push_back(self(self, c));
    return Node(n.label(), std::move(kids));
  };
  return ConstituentTree(std::move(words), rebuild(rebuild, tree.root()));
}

/// Tree with leaves renumbered by canonical_leaf_order; always continuous.
inline ConstituentTree continuous_reordering(const ConstituentTree& tree) {
  return relabel_leaves(tree, canonical_leaf_order(tree));
}

/// First violated invariant, or nullopt when the tree is well formed.
inline std::optional<Violation> validate(const ConstituentTree& tree) {
  const Node& root = tree.root();
  if (root.is_leaf()) return Violation{"root is a leaf", "<leaf>"};
  if (auto v = detail::check_node(root, tree.size())) return v;
  if (root.yield().size() != tree.size()) return Violation{"root yield incomplete", root.label()};
  return std::nullopt;
}

}  // namespace srseq
