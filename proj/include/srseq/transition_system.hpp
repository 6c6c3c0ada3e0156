#pragma once

// Configurations, legality and transition application for the top-down,
// in-order and non-binary bottom-up systems with their SWAP / SWAP#k /
// SHIFT#k extensions.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srseq/transition.hpp"
#include "srseq/tree.hpp"

namespace srseq {

class StackItem {
 public:
  enum class Kind { Word, Marker, Built };

  static StackItem word(int position) { return StackItem(Kind::Word, position, {}, nullptr); }
  static StackItem marker(std::string label) { return StackItem(Kind::Marker, -1, std::move(label), nullptr); }
  static StackItem built(Node node) {
    auto ptr = std::make_shared<const Node>(std::move(node));
    const int pos = ptr->min_position();
    std::string label = ptr->label();
    return StackItem(Kind::Built, pos, std::move(label), std::move(ptr));
  }

  Kind kind() const { return kind_; }
  bool is_word() const { return kind_ == Kind::Word; }
  bool is_marker() const { return kind_ == Kind::Marker; }
  bool is_built() const { return kind_ == Kind::Built; }

  /// Word position, or the minimum yield position of a built constituent.
  int position() const { return position_; }
  const std::string& label() const { return label_; }
  const Node& node() const { return *node_; }

  Node to_node() const { return is_word() ? Node::leaf(position_) : *node_; }

  friend bool operator==(const StackItem& a, const StackItem& b) {
    if (a.kind_ != b.kind_ || a.position_ != b.position_ || a.label_ != b.label_) return false;
    return !a.is_built() || *a.node_ == *b.node_;
  }

 private:
  StackItem(Kind kind, int position, std::string label, std::shared_ptr<const Node> node)
      : kind_(kind), position_(position), label_(std::move(label)), node_(std::move(node)) {}

  Kind kind_;
  int position_;
  std::string label_;
  std::shared_ptr<const Node> node_;
};

struct Configuration {
  std::vector<StackItem> stack;  // back() is the top
  std::vector<int> buffer;       // front() is the next word
  bool finished = false;
  int label_mismatches = 0;      // REDUCE(X) whose X differed from the marker

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

class IllegalTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline Configuration initial(int n) {
  if (n < 1) throw std::invalid_argument("sentence must contain at least one word");
  Configuration c;
  c.buffer.reserve(n);
  for (int i = 0; i < n; ++i) c.buffer.push_back(i);
  return c;
}

namespace detail {

inline bool in_inventory(const Transition& t, const Scheme& s) {
  const bool continuous_family = s.strategy != Strategy::BottomUp;
  switch (t.action()) {
    case Action::Shift: return true;
    case Action::ShiftK: return s.reordering == Reordering::ShiftK;
    case Action::Swap: return s.reordering == Reordering::Swap || s.reordering == Reordering::SwapK;
    case Action::SwapK: return s.reordering == Reordering::SwapK;
    case Action::NonTerminal: return continuous_family;
    case Action::Reduce: return continuous_family && !s.enriched;
    case Action::ReduceLabeled: return continuous_family && s.enriched;
    case Action::ReduceK: return s.strategy == Strategy::BottomUp;
    case Action::Finish: return s.has_finish();
  }
  return false;
}

/// Index of the nearest marker from the top, or -1.
inline int nearest_marker(const Configuration& c) {
  for (int i = static_cast<int>(c.stack.size()) - 1; i >= 0; --i)
    if (c.stack[i].is_marker()) return i;
  return -1;
}

}  // namespace detail

/// Name of the violated guard, or nullopt when `t` may be applied.
inline std::optional<std::string> illegal_reason(const Configuration& c, const Transition& t, const Scheme& scheme) {
  if (!detail::in_inventory(t, scheme)) return t.str() + " is not part of scheme " + scheme.name();
  if (c.finished) return std::string("configuration is finished");
  const Transition n = t.normalized();
  const int depth = static_cast<int>(c.stack.size());
  switch (n.action()) {
    case Action::Shift:
      if (c.buffer.empty()) return std::string("buffer is empty");
      return std::nullopt;
    case Action::ShiftK:
      if (static_cast<int>(c.buffer.size()) <= n.k()) return "buffer has no element at index " + std::to_string(n.k());
      return std::nullopt;
    case Action::Swap:
    case Action::SwapK: {
      const int k = n.count();
      if (depth < k + 1) return "SWAP needs " + std::to_string(k + 1) + " stack items";
      const StackItem& top = c.stack[depth - 1];
      for (int i = 1; i <= k; ++i) {
        const StackItem& below = c.stack[depth - 1 - i];
        if (!below.is_word() || !top.is_word()) return std::string("SWAP moves words only");
        if (below.position() > top.position()) return std::string("SWAP would undo an earlier reordering");
      }
      return std::nullopt;
    }
    case Action::NonTerminal:
      if (scheme.strategy == Strategy::TopDown) {
        if (c.buffer.empty()) return std::string("top-down NT needs a non-empty buffer");
      } else if (depth == 0 || c.stack.back().is_marker()) {
        return std::string("in-order NT needs a word or constituent on top of the stack");
      }
      return std::nullopt;
    case Action::Reduce:
    case Action::ReduceLabeled: {
      const int m = detail::nearest_marker(c);
      if (m < 0) return std::string("no open non-terminal on the stack");
      if (scheme.strategy == Strategy::TopDown) {
        if (m == depth - 1) return std::string("REDUCE would build an empty constituent");
      } else if (m == 0 || c.stack[m - 1].is_marker()) {
        return std::string("in-order REDUCE needs a first child below the non-terminal");
      }
      return std::nullopt;
    }
    case Action::ReduceK:
      if (depth < n.k()) return "REDUCE#" + std::to_string(n.k()) + " needs " + std::to_string(n.k()) + " stack items";
      for (int i = depth - n.k(); i < depth; ++i)
        if (c.stack[i].is_marker()) return std::string("REDUCE#k would pop a non-terminal marker");
      return std::nullopt;
    case Action::Finish:
      if (!c.buffer.empty()) return std::string("FINISH needs an empty buffer");
      if (depth != 1 || !c.stack.front().is_built()) return std::string("FINISH needs a single constituent on the stack");
      return std::nullopt;
  }
  return std::string("unknown transition");
}

inline bool legal(const Configuration& c, const Transition& t, const Scheme& scheme) {
  return !illegal_reason(c, t, scheme).has_value();
}

/// Returns the successor configuration; throws IllegalTransition.
inline Configuration apply(const Configuration& c, const Transition& t, const Scheme& scheme) {
  if (auto why = illegal_reason(c, t, scheme)) throw IllegalTransition(t.str() + ": " + *why);
  Configuration next = c;
  const Transition n = t.normalized();
  auto build = [&](int first, std::string label) {
    std::vector<Node> kids;
    kids.reserve(next.stack.size() - first);
    for (std::size_t i = first; i < next.stack.size(); ++i)
      if (!next.stack[i].is_marker()) kids.push_back(next.stack[i].to_node());
    next.stack.erase(next.stack.begin() + first, next.stack.end());
    next.stack.push_back(StackItem::built(Node(std::move(label), std::move(kids))));
  };
  switch (n.action()) {
    case Action::Shift:
    case Action::ShiftK: {
      const int k = n.action() == Action::Shift ? 0 : n.k();
      next.stack.push_back(StackItem::word(next.buffer[k]));
      next.buffer.erase(next.buffer.begin() + k);
      break;
    }
    case Action::Swap:
    case Action::SwapK: {
      const int k = n.count();
      const auto top = next.stack.end() - 1;
      std::vector<int> moved;
      for (auto it = top - k; it != top; ++it) moved.push_back(it->position());
      next.stack.erase(top - k, top);
      next.buffer.insert(next.buffer.begin(), moved.begin(), moved.end());
      break;
    }
    case Action::NonTerminal:
      next.stack.push_back(StackItem::marker(n.label()));
      break;
    case Action::Reduce:
    case Action::ReduceLabeled: {
      const int m = detail::nearest_marker(next);
      std::string label = next.stack[m].label();
      if (n.action() == Action::ReduceLabeled && n.label() != label) ++next.label_mismatches;
      build(scheme.strategy == Strategy::TopDown ? m : m - 1, std::move(label));
      break;
    }
    case Action::ReduceK:
      build(static_cast<int>(next.stack.size()) - n.k(), n.label());
      break;
    case Action::Finish:
      next.finished = true;
      break;
  }
  return next;
}

inline bool is_terminal(const Configuration& c, const Scheme& scheme) {
  if (scheme.strategy == Strategy::TopDown)
    return c.buffer.empty() && c.stack.size() == 1 && c.stack.front().is_built();
  return c.finished;
}

/// The tree held by a terminal configuration.
inline ConstituentTree result_tree(const Configuration& c, std::vector<std::string> words) {
  if (c.stack.size() != 1 || !c.stack.front().is_built() || !c.buffer.empty())
    throw std::logic_error("configuration does not hold a single tree");
  return ConstituentTree(std::move(words), c.stack.front().node());
}

}  // namespace srseq
