#pragma once

// Transition tokens and linearization schemes.
//
// Token text: SHIFT  SHIFT#k  SWAP  SWAP#k  NT(X)  REDUCE  REDUCE(X)  REDUCE#k(X)  FINISH

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srseq {

enum class Action { Shift, ShiftK, Swap, SwapK, NonTerminal, Reduce, ReduceLabeled, ReduceK, Finish };

class Transition {
 public:
  static Transition shift() { return {Action::Shift, 0, {}}; }
  static Transition shift_k(int k) {
    if (k < 0) throw std::invalid_argument("SHIFT#k needs k >= 0");
    return {Action::ShiftK, k, {}};
  }
  static Transition swap() { return {Action::Swap, 1, {}}; }
  static Transition swap_k(int k) {
    if (k < 1) throw std::invalid_argument("SWAP#k needs k >= 1");
    return {Action::SwapK, k, {}};
  }
  static Transition nt(std::string label) { return {Action::NonTerminal, 0, checked(std::move(label))}; }
  static Transition reduce() { return {Action::Reduce, 0, {}}; }
  static Transition reduce(std::string label) { return {Action::ReduceLabeled, 0, checked(std::move(label))}; }
  static Transition reduce_k(int k, std::string label) {
    if (k < 1) throw std::invalid_argument("REDUCE#k needs k >= 1");
    return {Action::ReduceK, k, checked(std::move(label))};
  }
  static Transition finish() { return {Action::Finish, 0, {}}; }

  Action action() const { return action_; }
  int k() const { return k_; }
  const std::string& label() const { return label_; }

  /// Semantic form: SHIFT#0 acts as SHIFT and SWAP#1 as SWAP. The surface
  /// form is kept so that token text round-trips.
  Transition normalized() const {
    if (action_ == Action::ShiftK && k_ == 0) return shift();
    if (action_ == Action::SwapK && k_ == 1) return swap();
    return *this;
  }

  bool is_shift() const { return action_ == Action::Shift || action_ == Action::ShiftK; }
  bool is_swap() const { return action_ == Action::Swap || action_ == Action::SwapK; }
  bool is_reduce() const {
    return action_ == Action::Reduce || action_ == Action::ReduceLabeled || action_ == Action::ReduceK;
  }

  /// Number of SWAP steps (1 for SWAP), buffer index for SHIFT#k.
  int count() const { return action_ == Action::Swap ? 1 : k_; }

  std::string str() const {
    switch (action_) {
      case Action::Shift: return "SHIFT";
      case Action::ShiftK: return "SHIFT#" + std::to_string(k_);
      case Action::Swap: return "SWAP";
      case Action::SwapK: return "SWAP#" + std::to_string(k_);
      case Action::NonTerminal: return "NT(" + label_ + ")";
      case Action::Reduce: return "REDUCE";
      case Action::ReduceLabeled: return "REDUCE(" + label_ + ")";
      case Action::ReduceK: return "REDUCE#" + std::to_string(k_) + "(" + label_ + ")";
      case Action::Finish: return "FINISH";
    }
    return {};
  }

  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition&, const Transition&) = default;

 private:
  Transition(Action a, int k, std::string label) : action_(a), k_(k), label_(std::move(label)) {}

  static std::string checked(std::string label) {
    if (label.empty()) throw std::invalid_argument("empty non-terminal label");
    for (char ch : label)
      if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '(' || ch == ')')
        throw std::invalid_argument("label '" + label + "' contains a reserved character");
    return label;
  }

  Action action_;
  int k_;
  std::string label_;
};

class TokenError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline int parse_count(std::string_view digits, std::string_view token) {
  if (digits.empty() || digits.size() > 6) throw TokenError("malformed token '" + std::string(token) + "'");
  int k = 0;
  for (char ch : digits) {
    if (ch < '0' || ch > '9') throw TokenError("malformed token '" + std::string(token) + "'");
    k = k * 10 + (ch - '0');
  }
  return k;
}

// "(X)" suffix → X
inline std::string parse_paren_label(std::string_view rest, std::string_view token) {
  if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')')
    throw TokenError("malformed token '" + std::string(token) + "'");
  return std::string(rest.substr(1, rest.size() - 2));
}

}  // namespace detail

inline Transition parse_transition(std::string_view tok) {
  auto starts = [&](std::string_view p) { return tok.substr(0, p.size()) == p; };
  try {
    if (tok == "SHIFT") return Transition::shift();
    if (tok == "SWAP") return Transition::swap();
    if (tok == "REDUCE") return Transition::reduce();
    if (tok == "FINISH") return Transition::finish();
    if (starts("SHIFT#")) return Transition::shift_k(detail::parse_count(tok.substr(6), tok));
    if (starts("SWAP#")) return Transition::swap_k(detail::parse_count(tok.substr(5), tok));
    if (starts("NT(")) return Transition::nt(detail::parse_paren_label(tok.substr(2), tok));
    if (starts("REDUCE#")) {
      const auto open = tok.find('(');
      if (open == std::string_view::npos) throw TokenError("malformed token '" + std::string(tok) + "'");
      const int k = detail::parse_count(tok.substr(7, open - 7), tok);
      return Transition::reduce_k(k, detail::parse_paren_label(tok.substr(open), tok));
    }
    if (starts("REDUCE(")) return Transition::reduce(detail::parse_paren_label(tok.substr(6), tok));
  } catch (const TokenError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw TokenError("malformed token '" + std::string(tok) + "': " + e.what());
  }
  throw TokenError("unknown token '" + std::string(tok) + "'");
}

/// Space-separated token line.
inline std::vector<Transition> parse_transitions(std::string_view line) {
  std::vector<Transition> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(parse_transition(line.substr(i, j - i)));
    i = j;
  }
  return out;
}

inline std::string format_transitions(const std::vector<Transition>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].str();
  }
  return out;
}

enum class Strategy { TopDown, InOrder, BottomUp };
enum class Reordering { None, Swap, SwapK, ShiftK };

/// One of the shipped linearization schemes. Construct through make() or
/// parse_scheme() so that unsupported combinations are rejected.
struct Scheme {
  Strategy strategy = Strategy::TopDown;
  Reordering reordering = Reordering::None;
  bool enriched = false;

  static Scheme make(Strategy s, Reordering r = Reordering::None, bool enriched = false) {
    if ((r == Reordering::SwapK || r == Reordering::ShiftK) && s != Strategy::InOrder)
      throw std::invalid_argument("SWAP#k and SHIFT#k are only shipped with the in-order strategy");
    if (enriched && (s == Strategy::BottomUp || r != Reordering::None))
      throw std::invalid_argument("enriched variants exist only for continuous top-down and in-order");
    return Scheme{s, r, enriched};
  }

  bool continuous_only() const { return reordering == Reordering::None; }
  bool has_finish() const { return strategy != Strategy::TopDown; }

  std::string name() const {
    std::string out = strategy == Strategy::TopDown ? "topdown" : strategy == Strategy::InOrder ? "inorder" : "bottomup";
    switch (reordering) {
      case Reordering::None: break;
      case Reordering::Swap: out += "+swap"; break;
      case Reordering::SwapK: out += "+swapk"; break;
      case Reordering::ShiftK: out += "+shiftk"; break;
    }
    if (enriched) out += ":enriched";
    return out;
  }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// `topdown`, `inorder`, `bottomup` with optional `+swap`, `+swapk`,
/// `+shiftk` and `:enriched` suffixes.
inline Scheme parse_scheme(std::string_view name) {
  bool enriched = false;
  if (const auto colon = name.find(':'); colon != std::string_view::npos) {
    if (name.substr(colon) != ":enriched") throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
    enriched = true;
    name = name.substr(0, colon);
  }
  Reordering r = Reordering::None;
  if (const auto plus = name.find('+'); plus != std::string_view::npos) {
    const auto suffix = name.substr(plus + 1);
    if (suffix == "swap") r = Reordering::Swap;
    else if (suffix == "swapk") r = Reordering::SwapK;
    else if (suffix == "shiftk") r = Reordering::ShiftK;
    else throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
    name = name.substr(0, plus);
  }
  Strategy s;
  if (name == "topdown") s = Strategy::TopDown;
  else if (name == "inorder") s = Strategy::InOrder;
  else if (name == "bottomup") s = Strategy::BottomUp;
  else throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
  return Scheme::make(s, r, enriched);
}

/// Every shipped scheme: eight base schemes plus the two enriched variants.
inline std::vector<Scheme> shipped_schemes() {
  return {
      Scheme::make(Strategy::TopDown),
      Scheme::make(Strategy::TopDown, Reordering::None, true),
      Scheme::make(Strategy::InOrder),
      Scheme::make(Strategy::InOrder, Reordering::None, true),
      Scheme::make(Strategy::BottomUp),
      Scheme::make(Strategy::TopDown, Reordering::Swap),
      Scheme::make(Strategy::InOrder, Reordering::Swap),
      Scheme::make(Strategy::BottomUp, Reordering::Swap),
      Scheme::make(Strategy::InOrder, Reordering::SwapK),
      Scheme::make(Strategy::InOrder, Reordering::ShiftK),
  };
}

}  // namespace srseq
