#pragma once

// Stack/buffer attention masks driven by the previously emitted token.
//
// Each mask is a length-n additive vector over input positions: 0 where the
// specialized head may attend, -inf elsewhere. A position is unmasked in at
// most one of the two. Besides the vectors, the tracker keeps the stack and
// buffer *order* of the unmasked positions, which SWAP and SHIFT#k need
// (position order alone cannot tell which stack word is second-to-top).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "srseq/transition.hpp"

namespace srseq {

inline constexpr double kMasked = -std::numeric_limits<double>::infinity();

struct MaskPair {
  std::vector<double> stack;
  std::vector<double> buffer;

  friend bool operator==(const MaskPair&, const MaskPair&) = default;
};

/// Ascending positions whose mask entry is 0.
inline std::vector<int> unmasked(const std::vector<double>& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i] == 0.0) out.push_back(static_cast<int>(i));
  return out;
}

class MaskError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MaskTracker {
 public:
  MaskTracker(int n, Scheme scheme) : scheme_(scheme) {
    if (n < 1) throw std::invalid_argument("mask tracker needs n >= 1");
    masks_.stack.assign(n, kMasked);
    masks_.buffer.assign(n, 0.0);
    for (int i = 0; i < n; ++i) buffer_.push_back(i);
  }

  const MaskPair& masks() const { return masks_; }
  std::size_t size() const { return masks_.stack.size(); }
  bool stack_empty() const { return stack_words() == 0; }
  bool buffer_empty() const { return buffer_.empty(); }

  /// Update after `token` was emitted.
  void step(const Transition& token) {
    const Transition t = token.normalized();
    switch (t.action()) {
      case Action::Shift:
      case Action::ShiftK: {
        const int k = t.action() == Action::Shift ? 0 : t.k();
        if (k >= static_cast<int>(buffer_.size())) throw MaskError(token.str() + " with " + std::to_string(buffer_.size()) + " buffered words");
        const int pos = buffer_[k];
        buffer_.erase(buffer_.begin() + k);
        stack_.push_back(pos);
        masks_.buffer[pos] = kMasked;
        masks_.stack[pos] = 0.0;
        break;
      }
      case Action::Swap:
      case Action::SwapK: {
        const int k = t.count();
        const int depth = static_cast<int>(stack_.size());
        if (depth < k + 1) throw MaskError(token.str() + " on a stack of " + std::to_string(depth));
        std::vector<int> moved(stack_.end() - 1 - k, stack_.end() - 1);
        for (int pos : moved) {
          if (pos == kMarker) throw MaskError(token.str() + " across a non-terminal");
          masks_.stack[pos] = kMasked;
          masks_.buffer[pos] = 0.0;
        }
        stack_.erase(stack_.end() - 1 - k, stack_.end() - 1);
        buffer_.insert(buffer_.begin(), moved.begin(), moved.end());
        break;
      }
      case Action::NonTerminal:
        stack_.push_back(kMarker);
        break;
      case Action::Reduce:
      case Action::ReduceLabeled: {
        auto marker = std::find(stack_.rbegin(), stack_.rend(), kMarker);
        if (marker == stack_.rend()) throw MaskError(token.str() + " without an open non-terminal");
        std::size_t first = static_cast<std::size_t>(stack_.rend() - marker) - 1;
        if (scheme_.strategy != Strategy::TopDown) {
          if (first == 0) throw MaskError(token.str() + " without a first child");
          --first;
        }
        reduce_from(first, token);
        break;
      }
      case Action::ReduceK: {
        if (static_cast<int>(stack_.size()) < t.k()) throw MaskError(token.str() + " on a short stack");
        reduce_from(stack_.size() - t.k(), token);
        break;
      }
      case Action::Finish:
        break;
    }
  }

 private:
  static constexpr int kMarker = -1;

  std::size_t stack_words() const {
    return static_cast<std::size_t>(std::count_if(stack_.begin(), stack_.end(), [](int p) { return p != kMarker; }));
  }

  // Collapse stack_[first..] into one entry kept at its minimum position.
  void reduce_from(std::size_t first, const Transition& token) {
    int keep = -1;
    for (std::size_t i = first; i < stack_.size(); ++i) {
      const int pos = stack_[i];
      if (pos == kMarker) continue;
      if (keep < 0 || pos < keep) keep = pos;
    }
    if (keep < 0) throw MaskError(token.str() + " over no words");
    for (std::size_t i = first; i < stack_.size(); ++i)
      if (stack_[i] != kMarker && stack_[i] != keep) masks_.stack[stack_[i]] = kMasked;
    stack_.resize(first);
    stack_.push_back(keep);
  }

  Scheme scheme_;
  MaskPair masks_;
  std::vector<int> stack_;   // representative positions in stack order, kMarker for non-terminals
  std::vector<int> buffer_;  // buffer order
};

/// masks[0] is the initial pair and masks[t] the pair after tokens[t-1].
inline std::vector<MaskPair> trace(int n, const std::vector<Transition>& tokens, const Scheme& scheme) {
  MaskTracker tracker(n, scheme);
  std::vector<MaskPair> out;
  out.reserve(tokens.size() + 1);
  out.push_back(tracker.masks());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    try {
      tracker.step(tokens[i]);
    } catch (const MaskError& e) {
      throw MaskError("step " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(tracker.masks());
  }
  return out;
}

}  // namespace srseq
