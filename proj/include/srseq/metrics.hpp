#pragma once

// Labeled bracketing F1, discontinuous F1 and exact match.
//
// Items are (label, yield) pairs matched as multisets per sentence. With
// punctuation filtering, punctuation positions are removed from every yield
// and the remaining positions renumbered; items left empty are dropped.

#include <algorithm>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "srseq/tree.hpp"

namespace srseq {

enum class ZeroDenominator { Hundred, Zero };

struct EvalOptions {
  bool ignore_punctuation = false;
  bool ignore_root = false;
  std::set<std::string> punctuation = {",", ".", ":", ";", "''", "``", "-LRB-", "-RRB-", "!", "?"};
  ZeroDenominator zero_denominator = ZeroDenominator::Hundred;
};

struct SentenceCounts {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  SentenceCounts totals;
  bool zero_denominator = false;  // no items on either side
  std::vector<SentenceCounts> per_sentence;
};

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<Constituent> eval_items(const ConstituentTree& tree, const EvalOptions& opt, bool disc_only) {
  const std::size_t n = tree.size();
  std::vector<int> renumber(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!(opt.ignore_punctuation && opt.punctuation.count(tree.words()[i]))) renumber[i] = next++;

  std::vector<Constituent> items;
  auto visit = [&](auto&& self, const Node& node, bool is_root) -> void {
    if (node.is_leaf()) return;
    if (!(is_root && opt.ignore_root)) {
      Constituent c{node.label(), {}};
      for (int p : node.yield())
        if (renumber[p] >= 0) c.yield.push_back(renumber[p]);
      if (!c.yield.empty() && (!disc_only || !is_consecutive(c.yield))) items.push_back(std::move(c));
    }
    for (const auto& child : node.children()) self(self, child, false);
  };
  visit(visit, tree.root(), true);
  std::sort(items.begin(), items.end());
  return items;
}

inline std::size_t multiset_matches(const std::vector<Constituent>& a, const std::vector<Constituent>& b) {
  std::size_t i = 0, j = 0, m = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++m, ++i, ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return m;
}

inline Score score(const std::vector<ConstituentTree>& gold, const std::vector<ConstituentTree>& pred,
                   const EvalOptions& opt, bool disc_only) {
  if (gold.size() != pred.size())
    throw EvalError("gold has " + std::to_string(gold.size()) + " trees but prediction has " +
                    std::to_string(pred.size()));
  Score s;
  s.per_sentence.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].words() != pred[i].words()) throw EvalError("sentence mismatch at index " + std::to_string(i));
    const auto g = eval_items(gold[i], opt, disc_only);
    const auto p = eval_items(pred[i], opt, disc_only);
    SentenceCounts c{g.size(), p.size(), multiset_matches(g, p)};
    s.totals.gold += c.gold;
    s.totals.predicted += c.predicted;
    s.totals.matched += c.matched;
    s.per_sentence.push_back(c);
  }
  const auto& t = s.totals;
  s.zero_denominator = t.gold == 0 && t.predicted == 0;
  if (s.zero_denominator) {
    const double v = opt.zero_denominator == ZeroDenominator::Hundred ? 100.0 : 0.0;
    s.precision = s.recall = s.f1 = v;
    return s;
  }
  s.precision = t.predicted ? 100.0 * t.matched / t.predicted : 0.0;
  s.recall = t.gold ? 100.0 * t.matched / t.gold : 0.0;
  s.f1 = t.predicted + t.gold ? 200.0 * t.matched / (t.predicted + t.gold) : 0.0;
  return s;
}

}  // namespace detail

/// Micro-averaged labeled P/R/F1 on a 0-100 scale.
inline Score f1(const std::vector<ConstituentTree>& gold, const std::vector<ConstituentTree>& pred,
                const EvalOptions& options = {}) {
  return detail::score(gold, pred, options, false);
}

/// As f1(), restricted to items whose (filtered) yield is not consecutive.
/// When neither side has such items the score is reported per
/// options.zero_denominator and Score::zero_denominator is set.
inline Score disc_f1(const std::vector<ConstituentTree>& gold, const std::vector<ConstituentTree>& pred,
                     const EvalOptions& options = {}) {
  return detail::score(gold, pred, options, true);
}

inline double exact_match(const std::vector<ConstituentTree>& gold, const std::vector<ConstituentTree>& pred) {
  if (gold.size() != pred.size())
    throw EvalError("gold has " + std::to_string(gold.size()) + " trees but prediction has " +
                    std::to_string(pred.size()));
  if (gold.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) same += gold[i] == pred[i];
  return static_cast<double>(same) / static_cast<double>(gold.size());
}

}  // namespace srseq
