#pragma once

// Encoder-decoder transformer whose cross-attention has one head restricted
// to the words on the stack and one restricted to the words in the buffer.
// The encoder output gets a learned sentinel row at index 0; a specialized
// head whose set is empty attends only the sentinel. Pre-norm layers,
// sinusoidal positions, no attention biases.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "srseq/mask.hpp"
#include "srseq/neural/autodiff.hpp"
#include "srseq/oracle.hpp"
#include "srseq/transition.hpp"
#include "srseq/tree.hpp"

namespace srseq::neural {

struct ModelConfig {
  int d_model = 64;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int heads = 4;
  int d_ff = 128;
  int max_positions = 512;  // hard cap on predicted sequence length
  bool specialized_heads = true;
  double dropout = 0.0;
  double label_smoothing = 0.01;
  // Adam with linear warm-up from warmup_init_lr to lr, then lr * sqrt(warmup / step).
  double lr = 1e-3;
  double warmup_init_lr = 1e-7;
  double min_lr = 1e-9;
  int warmup = 100;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-8;
  int batch_size = 1;  // sentences per update
  int epochs = 100;
  int beam = 10;
  unsigned long long seed = 1;

  /// Hyper-parameters of the original large-scale setup, for reference.
  static ModelConfig large_preset() {
    ModelConfig c;
    c.d_model = 256;
    c.encoder_layers = c.decoder_layers = 6;
    c.heads = 4;
    c.d_ff = 1024;
    c.dropout = 0.33;
    c.lr = 5e-4;
    c.warmup = 4000;
    c.epochs = 80;
    return c;
  }

  void check() const {
    if (heads < 2) throw std::invalid_argument("need at least 2 heads (stack and buffer)");
    if (d_model % heads != 0) throw std::invalid_argument("heads must divide d_model");
    if (d_model < 1 || d_ff < 1 || encoder_layers < 0 || decoder_layers < 1)
      throw std::invalid_argument("bad model dimensions");
    if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("dropout must be in [0, 1)");
  }
};

/// Word and token inventories. Word id 0 is the unknown word; the decoder
/// input id tokens.size() is the start symbol.
struct Vocabulary {
  std::vector<std::string> words{"<unk>"};
  std::vector<std::string> tokens;

  static Vocabulary build(const std::vector<ConstituentTree>& trees, const Scheme& scheme) {
    std::set<std::string> w;
    for (const auto& t : trees) w.insert(t.words().begin(), t.words().end());
    Vocabulary v;
    v.words.insert(v.words.end(), w.begin(), w.end());
    const auto stats = vocab_stats(trees, scheme);
    v.tokens.assign(stats.dictionary.begin(), stats.dictionary.end());
    v.index();
    return v;
  }

  void index() {
    word_ids_.clear();
    token_ids_.clear();
    for (std::size_t i = 0; i < words.size(); ++i) word_ids_[words[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < tokens.size(); ++i) token_ids_[tokens[i]] = static_cast<int>(i);
    parsed_.clear();
    for (const auto& t : tokens) parsed_.push_back(parse_transition(t));
  }

  int word_id(const std::string& w) const {
    auto it = word_ids_.find(w);
    return it == word_ids_.end() ? 0 : it->second;
  }
  int token_id(const Transition& t) const {
    auto it = token_ids_.find(t.str());
    if (it == token_ids_.end()) throw std::out_of_range("token " + t.str() + " is not in the vocabulary");
    return it->second;
  }
  const Transition& token(int id) const { return parsed_.at(id); }
  int output_size() const { return static_cast<int>(tokens.size()); }
  int bos() const { return output_size(); }

  std::vector<int> word_ids(const std::vector<std::string>& sentence) const {
    std::vector<int> out;
    for (const auto& w : sentence) out.push_back(word_id(w));
    return out;
  }

 private:
  std::map<std::string, int> word_ids_;
  std::map<std::string, int> token_ids_;
  std::vector<Transition> parsed_;
};

/// Named parameter tensors in a fixed order.
class Parameters {
 public:
  void add(std::string name, Matrix value) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
    index_[name] = static_cast<int>(values_.size());
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
  }
  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Matrix& operator[](std::size_t i) { return values_[i]; }
  const Matrix& operator[](std::size_t i) const { return values_[i]; }
  int id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no parameter " + name);
    return it->second;
  }
  Matrix& at(const std::string& name) { return values_[id(name)]; }
  const Matrix& at(const std::string& name) const { return values_[id(name)]; }
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
    return n;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::map<std::string, int> index_;
};

namespace detail {

inline Matrix xavier(int rows, int cols, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

inline Matrix gaussian(int rows, int cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

inline void add_norm(Parameters& p, const std::string& prefix, int d) {
  p.add(prefix + ".g", Matrix::Ones(1, d));
  p.add(prefix + ".b", Matrix::Zero(1, d));
}

inline void add_attention(Parameters& p, const std::string& prefix, int d, std::mt19937_64& rng) {
  for (const char* w : {".wq", ".wk", ".wv", ".wo"}) p.add(prefix + w, xavier(d, d, rng));
}

inline void add_ffn(Parameters& p, const std::string& prefix, int d, int f, std::mt19937_64& rng) {
  p.add(prefix + ".w1", xavier(d, f, rng));
  p.add(prefix + ".b1", Matrix::Zero(1, f));
  p.add(prefix + ".w2", xavier(f, d, rng));
  p.add(prefix + ".b2", Matrix::Zero(1, d));
}

}  // namespace detail

inline Parameters init_parameters(const ModelConfig& cfg, const Vocabulary& vocab, unsigned long long seed) {
  cfg.check();
  std::mt19937_64 rng(seed);
  const int d = cfg.d_model;
  Parameters p;
  p.add("src.embed", detail::gaussian(static_cast<int>(vocab.words.size()), d, 1.0, rng));
  p.add("src.sentinel", detail::gaussian(1, d, 1.0, rng));
  p.add("tgt.embed", detail::gaussian(vocab.output_size() + 1, d, 1.0, rng));
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    const std::string e = "enc" + std::to_string(l);
    detail::add_norm(p, e + ".ln1", d);
    detail::add_attention(p, e + ".self", d, rng);
    detail::add_norm(p, e + ".ln2", d);
    detail::add_ffn(p, e + ".ffn", d, cfg.d_ff, rng);
  }
  detail::add_norm(p, "enc.ln", d);
  for (int l = 0; l < cfg.decoder_layers; ++l) {
    const std::string e = "dec" + std::to_string(l);
    detail::add_norm(p, e + ".ln1", d);
    detail::add_attention(p, e + ".self", d, rng);
    detail::add_norm(p, e + ".ln2", d);
    detail::add_attention(p, e + ".cross", d, rng);
    detail::add_norm(p, e + ".ln3", d);
    detail::add_ffn(p, e + ".ffn", d, cfg.d_ff, rng);
  }
  detail::add_norm(p, "dec.ln", d);
  p.add("out.w", detail::xavier(d, vocab.output_size(), rng));
  p.add("out.b", Matrix::Zero(1, vocab.output_size()));
  return p;
}

inline Matrix positional_encoding(int length, int d) {
  Matrix pe(length, d);
  for (int pos = 0; pos < length; ++pos)
    for (int i = 0; i < d; ++i) {
      const double angle = pos / std::pow(10000.0, 2.0 * (i / 2) / d);
      pe(pos, i) = i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  return pe;
}

/// Parameters bound to a tape, by reference.
class Bound {
 public:
  Bound(Tape& tape, const Parameters& params) : tape_(tape), params_(params) {
    vars_.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) vars_.push_back(tape.ref(&params[i]));
  }
  Var operator()(const std::string& name) const { return vars_[params_.id(name)]; }
  Var operator[](std::size_t i) const { return vars_[i]; }
  std::size_t size() const { return vars_.size(); }
  Tape& tape() const { return tape_; }

 private:
  Tape& tape_;
  const Parameters& params_;
  std::vector<Var> vars_;
};

/// Per-step cross-attention masks for the decoder: row t of each matrix
/// covers [sentinel, word 0, ..., word n-1] at decoding step t.
struct CrossMasks {
  Matrix stack;
  Matrix buffer;
};

inline CrossMasks cross_masks(const std::vector<MaskPair>& steps, int n) {
  const auto T = static_cast<Eigen::Index>(steps.size());
  CrossMasks m{Matrix::Constant(T, n + 1, kMasked), Matrix::Constant(T, n + 1, kMasked)};
  for (Eigen::Index t = 0; t < T; ++t) {
    const MaskPair& p = steps[t];
    if (static_cast<int>(p.stack.size()) != n || static_cast<int>(p.buffer.size()) != n)
      throw std::invalid_argument("mask width does not match the sentence");
    bool any_stack = false, any_buffer = false;
    for (int i = 0; i < n; ++i) {
      m.stack(t, i + 1) = p.stack[i];
      m.buffer(t, i + 1) = p.buffer[i];
      any_stack |= p.stack[i] == 0.0;
      any_buffer |= p.buffer[i] == 0.0;
    }
    if (!any_stack) m.stack(t, 0) = 0.0;
    if (!any_buffer) m.buffer(t, 0) = 0.0;
  }
  return m;
}

/// Attention weights and per-head outputs recorded during a forward pass.
struct ForwardTrace {
  std::vector<std::vector<Matrix>> cross_weights;  // [layer][head], T x (n + 1)
  std::vector<Matrix> cross_heads;                 // [layer], T x d, heads side by side before the output projection
};

struct ForwardOptions {
  std::mt19937_64* dropout_rng = nullptr;  // dropout applies only when set
  ForwardTrace* trace = nullptr;
};

namespace detail {

inline Var linear(const Bound& p, Var x, const std::string& w) { return p.tape().matmul(x, p(w)); }

inline Var norm(const Bound& p, Var x, const std::string& prefix) {
  return p.tape().layer_norm(x, p(prefix + ".g"), p(prefix + ".b"));
}

inline Var ffn(const Bound& p, Var x, const std::string& prefix) {
  Tape& t = p.tape();
  Var h = t.relu(t.add_row(linear(p, x, prefix + ".w1"), p(prefix + ".b1")));
  return t.add_row(linear(p, h, prefix + ".w2"), p(prefix + ".b2"));
}

inline Var drop(const ModelConfig& cfg, const ForwardOptions& opt, Tape& t, Var x) {
  return opt.dropout_rng ? t.dropout(x, cfg.dropout, *opt.dropout_rng) : x;
}

inline Matrix causal_mask(Eigen::Index T) {
  Matrix m = Matrix::Zero(T, T);
  for (Eigen::Index r = 0; r < T; ++r)
    for (Eigen::Index c = r + 1; c < T; ++c) m(r, c) = kMasked;
  return m;
}

}  // namespace detail

/// Encoder states with the sentinel prepended: (n + 1) x d.
inline Var encode_sentence(const Bound& p, const ModelConfig& cfg, const std::vector<int>& words,
                           const ForwardOptions& opt = {}) {
  if (words.empty()) throw std::invalid_argument("empty sentence");
  Tape& t = p.tape();
  const int n = static_cast<int>(words.size());
  Var h = t.add(t.gather(p("src.embed"), words), t.leaf(positional_encoding(n, cfg.d_model)));
  h = detail::drop(cfg, opt, t, h);
  for (int l = 0; l < cfg.encoder_layers; ++l) {
    const std::string e = "enc" + std::to_string(l);
    Var x = detail::norm(p, h, e + ".ln1");
    Var a = t.attention(detail::linear(p, x, e + ".self.wq"), detail::linear(p, x, e + ".self.wk"),
                        detail::linear(p, x, e + ".self.wv"), cfg.heads, {});
    h = t.add(h, detail::drop(cfg, opt, t, detail::linear(p, a, e + ".self.wo")));
    x = detail::norm(p, h, e + ".ln2");
    h = t.add(h, detail::drop(cfg, opt, t, detail::ffn(p, x, e + ".ffn")));
  }
  h = detail::norm(p, h, "enc.ln");
  return t.stack_rows(p("src.sentinel"), h);
}

/// Logits (T x V) for decoder inputs `inputs` (start symbol first) given
/// the mask state before each step.
inline Var decode_steps(const Bound& p, const ModelConfig& cfg, Var encoded, const std::vector<int>& inputs,
                        const std::vector<MaskPair>& masks, const ForwardOptions& opt = {}) {
  if (inputs.size() != masks.size()) throw std::invalid_argument("one mask pair per decoder step is required");
  Tape& t = p.tape();
  const auto T = static_cast<int>(inputs.size());
  const int n = static_cast<int>(t.value(encoded).rows()) - 1;
  std::vector<Matrix> cross(cfg.heads, Matrix());
  if (cfg.specialized_heads) {
    CrossMasks cm = cross_masks(masks, n);
    cross[0] = std::move(cm.stack);
    cross[1] = std::move(cm.buffer);
  }
  const std::vector<Matrix> causal(cfg.heads, detail::causal_mask(T));
  if (opt.trace) *opt.trace = {};

  Var y = t.add(t.gather(p("tgt.embed"), inputs), t.leaf(positional_encoding(T, cfg.d_model)));
  y = detail::drop(cfg, opt, t, y);
  for (int l = 0; l < cfg.decoder_layers; ++l) {
    const std::string e = "dec" + std::to_string(l);
    Var x = detail::norm(p, y, e + ".ln1");
    Var a = t.attention(detail::linear(p, x, e + ".self.wq"), detail::linear(p, x, e + ".self.wk"),
                        detail::linear(p, x, e + ".self.wv"), cfg.heads, causal);
    y = t.add(y, detail::drop(cfg, opt, t, detail::linear(p, a, e + ".self.wo")));

    x = detail::norm(p, y, e + ".ln2");
    std::vector<Matrix> weights;
    Var c = t.attention(detail::linear(p, x, e + ".cross.wq"), detail::linear(p, encoded, e + ".cross.wk"),
                        detail::linear(p, encoded, e + ".cross.wv"), cfg.heads, cross,
                        opt.trace ? &weights : nullptr);
    if (opt.trace) {
      opt.trace->cross_weights.push_back(std::move(weights));
      opt.trace->cross_heads.push_back(t.value(c));
    }
    y = t.add(y, detail::drop(cfg, opt, t, detail::linear(p, c, e + ".cross.wo")));

    x = detail::norm(p, y, e + ".ln3");
    y = t.add(y, detail::drop(cfg, opt, t, detail::ffn(p, x, e + ".ffn")));
  }
  y = detail::norm(p, y, "dec.ln");
  return t.add_row(detail::linear(p, y, "out.w"), p("out.b"));
}

/// A gold training pair in model ids.
struct Example {
  std::vector<int> words;
  std::vector<int> inputs;   // start symbol + gold[0..m-2]
  std::vector<int> targets;  // gold[0..m-1]
  std::vector<MaskPair> masks;  // state before each step
};

inline Example make_example(const ConstituentTree& tree, const Vocabulary& vocab, const Scheme& scheme) {
  const auto tokens = encode(tree, scheme).tokens;
  Example ex;
  ex.words = vocab.word_ids(tree.words());
  ex.inputs.push_back(vocab.bos());
  for (const auto& tok : tokens) ex.targets.push_back(vocab.token_id(tok));
  ex.inputs.insert(ex.inputs.end(), ex.targets.begin(), ex.targets.end() - 1);
  ex.masks = trace(static_cast<int>(tree.size()), tokens, scheme);
  ex.masks.pop_back();
  return ex;
}

/// Row-wise softmax of logits.
inline Matrix distributions(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const auto e = (logits.row(r).array() - logits.row(r).maxCoeff()).exp();
    p.row(r) = e / e.sum();
  }
  return p;
}

/// Loss of one example on a fresh recording tape; fills grads (aligned with
/// params) when non-null.
inline double example_loss(const Parameters& params, const ModelConfig& cfg, const Example& ex,
                           std::vector<Matrix>* grads = nullptr, std::mt19937_64* dropout_rng = nullptr) {
  Tape tape(grads != nullptr);
  Bound p(tape, params);
  ForwardOptions opt;
  opt.dropout_rng = dropout_rng;
  Var enc = encode_sentence(p, cfg, ex.words, opt);
  Var logits = decode_steps(p, cfg, enc, ex.inputs, ex.masks, opt);
  Var loss = tape.cross_entropy(logits, ex.targets, cfg.label_smoothing);
  if (grads) {
    tape.backward(loss);
    grads->resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Matrix& g = tape.grad(p[i]);
      (*grads)[i] = g.size() ? g : Matrix::Zero(params[i].rows(), params[i].cols());
    }
  }
  return tape.value(loss)(0, 0);
}

}  // namespace srseq::neural
