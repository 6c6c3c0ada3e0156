#pragma once

// Static oracles: gold tree -> transition sequence for each scheme.
//
// Words are consumed in canonical_leaf_order. How a word that is not at the
// buffer front reaches the top of the stack depends on the reordering mode:
//   SWAP    shift every word in front of it, then swap each of them back
//   SWAP#k  the same, with the run of swaps merged into one SWAP#k
//   SHIFT#k take it directly from its current buffer index
// Because the bypassed words return to the buffer in their previous order,
// the buffer stays sorted by sentence position throughout.

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "srseq/transition.hpp"
#include "srseq/transition_system.hpp"
#include "srseq/tree.hpp"

namespace srseq {

struct Linearization {
  Scheme scheme;
  std::vector<Transition> tokens;
};

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

class Encoder {
 public:
  Encoder(const ConstituentTree& tree, const Scheme& scheme)
      : scheme_(scheme), config_(initial(static_cast<int>(tree.size()))) {}

  std::vector<Transition> run(const Node& root) {
    visit(root);
    if (scheme_.has_finish()) emit(Transition::finish());
    return std::move(tokens_);
  }

 private:
  void emit(const Transition& t) {
    if (auto why = illegal_reason(config_, t, scheme_))
      throw std::logic_error("oracle produced illegal " + t.str() + ": " + *why);
    config_ = apply(config_, t, scheme_);
    tokens_.push_back(t);
  }

  void need(int position) {
    const auto& buf = config_.buffer;
    const auto it = std::find(buf.begin(), buf.end(), position);
    const int index = static_cast<int>(it - buf.begin());
    switch (scheme_.reordering) {
      case Reordering::None:
        if (index != 0) throw std::logic_error("continuous oracle reached a non-adjacent word");
        emit(Transition::shift());
        return;
      case Reordering::ShiftK:
        emit(Transition::shift_k(index));
        return;
      case Reordering::Swap:
      case Reordering::SwapK:
        for (int i = 0; i <= index; ++i) emit(Transition::shift());
        if (index == 0) return;
        if (scheme_.reordering == Reordering::SwapK) {
          emit(Transition::swap_k(index));
        } else {
          for (int i = 0; i < index; ++i) emit(Transition::swap());
        }
        return;
    }
  }

  void child(const Node& n) {
    if (n.is_leaf())
      need(n.position());
    else
      visit(n);
  }

  Transition close(const Node& n) const {
    return scheme_.enriched ? Transition::reduce(n.label()) : Transition::reduce();
  }

  void visit(const Node& n) {
    const auto& kids = n.children();
    switch (scheme_.strategy) {
      case Strategy::TopDown:
        emit(Transition::nt(n.label()));
        for (const auto& c : kids) child(c);
        emit(close(n));
        break;
      case Strategy::InOrder:
        child(kids.front());
        emit(Transition::nt(n.label()));
        for (std::size_t i = 1; i < kids.size(); ++i) child(kids[i]);
        emit(close(n));
        break;
      case Strategy::BottomUp:
        for (const auto& c : kids) child(c);
        emit(Transition::reduce_k(static_cast<int>(kids.size()), n.label()));
        break;
    }
  }

  Scheme scheme_;
  Configuration config_;
  std::vector<Transition> tokens_;
};

}  // namespace detail

/// Transition sequence whose replay from initial() rebuilds `tree`.
/// Continuous-only schemes reject discontinuous trees.
inline Linearization encode(const ConstituentTree& tree, const Scheme& scheme) {
  if (auto v = validate(tree)) throw EncodeError("invalid tree: " + v->message);
  if (scheme.continuous_only() && !is_continuous(tree))
    throw EncodeError("scheme " + scheme.name() + " cannot encode a discontinuous tree");
  return {scheme, detail::Encoder(tree, scheme).run(tree.root())};
}

/// encode() under the labeled-REDUCE variant of a continuous scheme.
inline Linearization encode_enriched(const ConstituentTree& tree, Scheme scheme) {
  if (scheme.strategy == Strategy::BottomUp || !scheme.continuous_only())
    throw EncodeError("enriched encoding needs a continuous top-down or in-order scheme");
  scheme.enriched = true;
  return encode(tree, scheme);
}

struct VocabStats {
  std::set<std::string> dictionary;
  std::size_t size = 0;
  std::size_t max_length = 0;
};

/// Output dictionary and longest sequence over a collection of trees.
inline VocabStats vocab_stats(const std::vector<ConstituentTree>& trees, const Scheme& scheme) {
  VocabStats stats;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    Linearization lin;
    try {
      lin = encode(trees[i], scheme);
    } catch (const EncodeError& e) {
      throw EncodeError("tree " + std::to_string(i) + ": " + e.what());
    }
    for (const auto& t : lin.tokens) stats.dictionary.insert(t.str());
    stats.max_length = std::max(stats.max_length, lin.tokens.size());
  }
  stats.size = stats.dictionary.size();
  return stats;
}

}  // namespace srseq
