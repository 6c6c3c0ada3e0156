#pragma once

// Beam search over transition tokens. Tokens that are illegal in a
// hypothesis' replayed configuration are never expanded, and each
// hypothesis carries its own mask tracker.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "srseq/mask.hpp"
#include "srseq/neural/model.hpp"
#include "srseq/transition_system.hpp"

namespace srseq::neural {

struct Prediction {
  std::vector<Transition> tokens;
  double score = 0.0;     // sum of token log-probabilities
  bool terminal = false;  // false when the length cap or a dead end was hit
};

namespace detail {

struct Hypothesis {
  Configuration config;
  MaskTracker tracker;
  std::vector<int> inputs;  // start symbol + emitted ids
  std::vector<MaskPair> masks;
  std::vector<Transition> tokens;
  double score = 0.0;
};

inline Eigen::RowVectorXd next_log_probs(const Parameters& params, const ModelConfig& cfg, const Matrix& encoded,
                                         const Hypothesis& h) {
  Tape tape(false);
  Bound p(tape, params);
  Var enc = tape.ref(&encoded);
  const Matrix& logits = tape.value(decode_steps(p, cfg, enc, h.inputs, h.masks));
  const Eigen::RowVectorXd last = logits.row(logits.rows() - 1);
  const double top = last.maxCoeff();
  const double lse = top + std::log((last.array() - top).exp().sum());
  return last.array() - lse;
}

}  // namespace detail

/// Default cap: enough for any oracle sequence of the shipped schemes with
/// eager swapping on sentences of this length.
inline int default_length_cap(int n, const ModelConfig& cfg) {
  const long long quadratic = 2LL * n * n + 6LL * n + 8;
  return static_cast<int>(std::min<long long>(quadratic, cfg.max_positions));
}

inline Prediction predict(const Parameters& params, const ModelConfig& cfg, const Vocabulary& vocab,
                          const Scheme& scheme, const std::vector<std::string>& sentence, int beam,
                          int length_cap = 0) {
  if (sentence.empty()) throw std::invalid_argument("empty sentence");
  if (beam < 1) throw std::invalid_argument("beam width must be positive");
  const int n = static_cast<int>(sentence.size());
  if (length_cap <= 0) length_cap = default_length_cap(n, cfg);

  Matrix encoded;
  {
    Tape tape(false);
    Bound p(tape, params);
    encoded = tape.value(encode_sentence(p, cfg, vocab.word_ids(sentence)));
  }

  detail::Hypothesis start{initial(n), MaskTracker(n, scheme), {vocab.bos()}, {}, {}, 0.0};
  start.masks.push_back(start.tracker.masks());
  std::vector<detail::Hypothesis> active{start};
  std::vector<detail::Hypothesis> finished;

  struct Candidate {
    double score;
    std::size_t hyp;
    int token;
  };

  for (int step = 0; step < length_cap && !active.empty(); ++step) {
    std::vector<Candidate> cands;
    for (std::size_t h = 0; h < active.size(); ++h) {
      const auto logp = detail::next_log_probs(params, cfg, encoded, active[h]);
      for (int v = 0; v < vocab.output_size(); ++v)
        if (legal(active[h].config, vocab.token(v), scheme)) cands.push_back({active[h].score + logp(v), h, v});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    if (cands.size() > static_cast<std::size_t>(beam)) cands.resize(beam);

    std::vector<detail::Hypothesis> next;
    for (const auto& c : cands) {
      detail::Hypothesis h = active[c.hyp];
      const Transition& tok = vocab.token(c.token);
      h.config = apply(h.config, tok, scheme);
      h.tracker.step(tok);
      h.tokens.push_back(tok);
      h.inputs.push_back(c.token);
      h.masks.push_back(h.tracker.masks());
      h.score = c.score;
      (is_terminal(h.config, scheme) ? finished : next).push_back(std::move(h));
    }
    if (next.empty()) {
      if (finished.empty()) active.erase(active.begin() + 1, active.end());  // dead end: keep the best partial
      break;
    }
    active = std::move(next);
    // Scores only decrease, so no open hypothesis can overtake the best finished one.
    if (static_cast<int>(finished.size()) >= beam) break;
    double best_finished = -std::numeric_limits<double>::infinity();
    for (const auto& f : finished) best_finished = std::max(best_finished, f.score);
    if (best_finished >= active.front().score) break;
  }

  const std::vector<detail::Hypothesis>& pool = finished.empty() ? active : finished;
  const auto best = std::max_element(pool.begin(), pool.end(),
                                     [](const auto& a, const auto& b) { return a.score < b.score; });
  return {best->tokens, best->score, !finished.empty()};
}

}  // namespace srseq::neural
