#pragma once

// Token sequence + sentence -> tree, repairing ill-formed sequences.
//
// Repair rules, applied in this order while replaying:
//   R1  an illegal token is skipped
//   R2  tokens exhausted with words left in the buffer: shift them all
//   R3  tokens exhausted without a single tree: drop open non-terminals and
//       wrap the remaining stack items under the fallback root label
//   R4  SHIFT#k past the end of the buffer is clamped to the last element
//   R5  REDUCE#k over more items than available is clamped to what is there

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "srseq/transition.hpp"
#include "srseq/transition_system.hpp"
#include "srseq/tree.hpp"

namespace srseq {

enum class RepairRule { SkipIllegal = 1, ShiftRemaining = 2, WrapRoot = 3, ClampShift = 4, ClampReduce = 5 };

inline const char* rule_name(RepairRule r) {
  switch (r) {
    case RepairRule::SkipIllegal: return "R1";
    case RepairRule::ShiftRemaining: return "R2";
    case RepairRule::WrapRoot: return "R3";
    case RepairRule::ClampShift: return "R4";
    case RepairRule::ClampReduce: return "R5";
  }
  return "?";
}

struct Repair {
  RepairRule rule;
  std::size_t token_index;  // index into the input tokens; == size() for end-of-input rules
  std::string detail;
};

struct DecodeOptions {
  std::string root_label = "ROOT";
};

struct DecodeResult {
  ConstituentTree tree;
  std::vector<Repair> repairs;
  int label_mismatches = 0;
};

namespace detail {

inline int top_items_without_marker(const Configuration& c) {
  int count = 0;
  for (auto it = c.stack.rbegin(); it != c.stack.rend() && !it->is_marker(); ++it) ++count;
  return count;
}

}  // namespace detail

/// Total on non-empty sentences: always returns a valid tree.
inline DecodeResult decode(const std::vector<std::string>& words, const std::vector<Transition>& tokens,
                           const Scheme& scheme, const DecodeOptions& options = {}) {
  if (words.empty()) throw std::invalid_argument("cannot decode an empty sentence");
  Configuration c = initial(static_cast<int>(words.size()));
  std::vector<Repair> repairs;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Transition t = tokens[i];
    if (auto why = illegal_reason(c, t, scheme)) {
      const int buffered = static_cast<int>(c.buffer.size());
      const int available = detail::top_items_without_marker(c);
      std::optional<Transition> clamped;
      RepairRule rule = RepairRule::SkipIllegal;
      if (t.action() == Action::ShiftK && buffered > 0 && t.k() >= buffered) {
        clamped = Transition::shift_k(buffered - 1);
        rule = RepairRule::ClampShift;
      } else if (t.action() == Action::ReduceK && available > 0 && t.k() > available) {
        clamped = Transition::reduce_k(available, t.label());
        rule = RepairRule::ClampReduce;
      }
      if (clamped && legal(c, *clamped, scheme)) {
        repairs.push_back({rule, i, t.str() + " -> " + clamped->str()});
        t = *clamped;
      } else {
        repairs.push_back({RepairRule::SkipIllegal, i, t.str() + ": " + *why});
        continue;
      }
    }
    c = apply(c, t, scheme);
  }

  if (!is_terminal(c, scheme)) {
    if (!c.buffer.empty()) {
      repairs.push_back({RepairRule::ShiftRemaining, tokens.size(), std::to_string(c.buffer.size()) + " words"});
      for (int pos : c.buffer) c.stack.push_back(StackItem::word(pos));
      c.buffer.clear();
    }
    const bool single_tree = c.stack.size() == 1 && c.stack.front().is_built();
    if (!single_tree) {
      std::vector<Node> kids;
      for (const auto& item : c.stack)
        if (!item.is_marker()) kids.push_back(item.to_node());
      repairs.push_back({RepairRule::WrapRoot, tokens.size(), std::to_string(kids.size()) + " items"});
      c.stack.clear();
      c.stack.push_back(StackItem::built(Node(options.root_label, std::move(kids))));
    }
    c.finished = true;
  }
  return {result_tree(c, words), std::move(repairs), c.label_mismatches};
}

struct RepairStats {
  std::array<std::size_t, 6> by_rule{};  // indexed by RepairRule value
  std::size_t repaired_items = 0;
  std::size_t items = 0;
};

struct BatchResult {
  std::vector<ConstituentTree> trees;
  RepairStats stats;
};

inline void accumulate(RepairStats& stats, const DecodeResult& r) {
  ++stats.items;
  if (!r.repairs.empty()) ++stats.repaired_items;
  for (const auto& rep : r.repairs) ++stats.by_rule[static_cast<int>(rep.rule)];
}

inline BatchResult decode_batch(const std::vector<std::vector<std::string>>& sentences,
                                const std::vector<std::vector<Transition>>& sequences, const Scheme& scheme,
                                const DecodeOptions& options = {}) {
  if (sentences.size() != sequences.size())
    throw std::invalid_argument("decode_batch: " + std::to_string(sentences.size()) + " sentences but " +
                                std::to_string(sequences.size()) + " token sequences");
  BatchResult out;
  out.trees.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    DecodeResult r = decode(sentences[i], sequences[i], scheme, options);
    accumulate(out.stats, r);
    out.trees.push_back(std::move(r.tree));
  }
  return out;
}

}  // namespace srseq
