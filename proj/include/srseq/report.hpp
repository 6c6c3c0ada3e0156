#pragma once

// Evaluation summaries: an EVALB-style text table and a JSON document with
// per-sentence counts.

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srseq/metrics.hpp"

namespace srseq {

struct EvalReport {
  Score labeled;
  Score discontinuous;
  double exact = 0.0;
  std::size_t sentences = 0;
  EvalOptions options;
};

inline EvalReport evaluate(const std::vector<ConstituentTree>& gold, const std::vector<ConstituentTree>& pred,
                           const EvalOptions& options = {}) {
  return {f1(gold, pred, options), disc_f1(gold, pred, options), exact_match(gold, pred), gold.size(), options};
}

namespace detail {

inline std::string score_row(const char* name, const Score& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-15s %7zu %7zu %7zu %7.2f %7.2f %7.2f%s\n", name, s.totals.gold,
                s.totals.predicted, s.totals.matched, s.precision, s.recall, s.f1,
                s.zero_denominator ? "  (no items)" : "");
  return buf;
}

}  // namespace detail

inline std::string format_report(const EvalReport& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-15s %7s %7s %7s %7s %7s %7s\n", "", "gold", "pred", "match", "prec", "rec", "F1");
  out += buf;
  out += detail::score_row("labeled", r.labeled);
  out += detail::score_row("discontinuous", r.discontinuous);
  std::snprintf(buf, sizeof buf, "%-15s %7.2f\n", "exact match", 100.0 * r.exact);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-15s %7zu\n", "sentences", r.sentences);
  out += buf;
  std::snprintf(buf, sizeof buf, "punctuation %s, root %s\n", r.options.ignore_punctuation ? "ignored" : "kept",
                r.options.ignore_root ? "ignored" : "kept");
  out += buf;
  return out;
}

inline nlohmann::json score_json(const Score& s) {
  return {{"precision", s.precision}, {"recall", s.recall},       {"f1", s.f1},
          {"gold", s.totals.gold},    {"predicted", s.totals.predicted}, {"matched", s.totals.matched},
          {"zero_denominator", s.zero_denominator}};
}

inline nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < r.labeled.per_sentence.size(); ++i) {
    const auto& l = r.labeled.per_sentence[i];
    const auto& d = r.discontinuous.per_sentence[i];
    per.push_back({{"gold", l.gold},
                   {"predicted", l.predicted},
                   {"matched", l.matched},
                   {"disc_gold", d.gold},
                   {"disc_predicted", d.predicted},
                   {"disc_matched", d.matched}});
  }
  return {{"labeled", score_json(r.labeled)},
          {"discontinuous", score_json(r.discontinuous)},
          {"exact_match", r.exact},
          {"sentences", r.sentences},
          {"options",
           {{"ignore_punctuation", r.options.ignore_punctuation},
            {"ignore_root", r.options.ignore_root},
            {"zero_denominator", r.options.zero_denominator == ZeroDenominator::Hundred ? "hundred" : "zero"}}},
          {"per_sentence", per}};
}

}  // namespace srseq
