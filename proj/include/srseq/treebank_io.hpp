#pragma once

// Readers and writers for the two line-oriented tree formats:
//
//   bracketed     (S (NP John) (VP runs))           leaves numbered left to right
//   discbracket   (S (VP 0=a (PP 2=b)) 1=c)          leaves carry explicit positions
//
// Words containing '(' ')' '=' '\' or whitespace are backslash-escaped.

#include <zlib.h>

#include <cctype>
#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srseq/tree.hpp"

namespace srseq {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), message_(message), offset_(offset) {}

  const std::string& message() const { return message_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string message_;
  std::size_t offset_;
};

class TreebankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TreeFormat { Bracketed, Discbracket, Auto };

inline TreeFormat parse_tree_format(std::string_view name) {
  if (name == "bracketed") return TreeFormat::Bracketed;
  if (name == "discbracket") return TreeFormat::Discbracket;
  if (name == "auto") return TreeFormat::Auto;
  throw std::invalid_argument("unknown tree format '" + std::string(name) + "'");
}

inline std::string escape_word(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char ch : word) {
    switch (ch) {
      case '(': case ')': case '=': case '\\': case ' ':
        out += '\\';
        out += ch;
        break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += ch;
    }
  }
  return out;
}

namespace detail {

inline bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }

struct Token {
  enum Kind { Open, Close, Atom, End } kind;
  std::size_t offset;
  std::string text;                      // unescaped atom text
  std::size_t eq = std::string::npos;    // index of the first unescaped '=' in text
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ == text_.size()) return {Token::End, pos_, {}};
    const std::size_t start = pos_;
    if (text_[pos_] == '(') return ++pos_, Token{Token::Open, start, {}};
    if (text_[pos_] == ')') return ++pos_, Token{Token::Close, start, {}};
    Token tok{Token::Atom, start, {}};
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '(' || ch == ')' || is_space(ch)) break;
      if (ch == '\\') {
        if (pos_ + 1 == text_.size()) throw ParseError("dangling escape", pos_);
        const char esc = text_[pos_ + 1];
        tok.text += esc == 't' ? '\t' : esc == 'n' ? '\n' : esc == 'r' ? '\r' : esc;
        pos_ += 2;
        continue;
      }
      if (ch == '=' && tok.eq == std::string::npos) tok.eq = tok.text.size();
      tok.text += ch;
      ++pos_;
    }
    return tok;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

// Raw parse result before leaf numbering.
struct RawNode {
  std::string label;
  std::vector<RawNode> children;
  bool leaf = false;
  Token atom;
};

inline RawNode parse_raw(std::string_view text) {
  Lexer lex(text);
  Token tok = lex.next();
  if (tok.kind == Token::End) throw ParseError("empty input", tok.offset);
  if (tok.kind != Token::Open) throw ParseError("stray token at top level", tok.offset);

  auto parse_node = [&](auto&& self, std::size_t open_offset) -> RawNode {
    RawNode node;
    Token label = lex.next();
    if (label.kind == Token::End) throw ParseError("unbalanced parentheses", text.size());
    if (label.kind != Token::Atom) throw ParseError("missing label", label.offset);
    node.label = label.text;
    for (;;) {
      Token t = lex.next();
      switch (t.kind) {
        case Token::End:
          throw ParseError("unbalanced parentheses", text.size());
        case Token::Close:
          if (node.children.empty()) throw ParseError("empty constituent", open_offset);
          return node;
        case Token::Open:
          node.children.push_back(self(self, t.offset));
          break;
        case Token::Atom: {
          RawNode leaf;
          leaf.leaf = true;
          leaf.atom = std::move(t);
          node.children.push_back(std::move(leaf));
          break;
        }
      }
    }
  };
  RawNode root = parse_node(parse_node, tok.offset);
  Token rest = lex.next();
  if (rest.kind == Token::Close) throw ParseError("unbalanced parentheses", rest.offset);
  if (rest.kind != Token::End) throw ParseError("stray token at top level", rest.offset);
  return root;
}

inline bool raw_has_indexed_leaf(const RawNode& node) {
  if (node.leaf) {
    if (node.atom.eq == std::string::npos || node.atom.eq == 0) return false;
    for (std::size_t i = 0; i < node.atom.eq; ++i)
      if (!std::isdigit(static_cast<unsigned char>(node.atom.text[i]))) return false;
    return true;
  }
  for (const auto& c : node.children)
    if (raw_has_indexed_leaf(c)) return true;
  return false;
}

}  // namespace detail

/// Continuous bracketed tree; leaves are numbered left to right from 0.
inline ConstituentTree parse_bracketed(std::string_view text) {
  detail::RawNode raw = detail::parse_raw(text);
  std::vector<std::string> words;
  auto build = [&](auto&& self, detail::RawNode& r) -> Node {
    std::vector<Node> kids;
    kids.reserve(r.children.size());
    for (auto& c : r.children) {
      if (c.leaf) {
        kids.push_back(Node::leaf(static_cast<int>(words.size())));
        words.push_back(std::move(c.atom.text));
      } else {
        kids.push_back(self(self, c));
      }
    }
    return Node(std::move(r.label), std::move(kids));
  };
  Node root = build(build, raw);
  return ConstituentTree(std::move(words), std::move(root));
}

/// Discontinuous bracketed tree with `index=word` leaves; indices must be a
/// permutation of 0..n-1.
inline ConstituentTree parse_discbracket(std::string_view text) {
  detail::RawNode raw = detail::parse_raw(text);
  struct IndexedLeaf {
    int index;
    std::string word;
    std::size_t offset;
  };
  std::vector<IndexedLeaf> leaves;
  auto build = [&](auto&& self, detail::RawNode& r) -> Node {
    std::vector<Node> kids;
    kids.reserve(r.children.size());
    for (auto& c : r.children) {
      if (!c.leaf) {
        kids.push_back(self(self, c));
        continue;
      }
      const auto& atom = c.atom;
      if (atom.eq == std::string::npos || atom.eq == 0 || atom.eq > 9)
        throw ParseError("malformed leaf token", atom.offset);
      int index = 0;
      for (std::size_t i = 0; i < atom.eq; ++i) {
        const char ch = atom.text[i];
        if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("malformed leaf token", atom.offset);
        index = index * 10 + (ch - '0');
      }
      leaves.push_back({index, atom.text.substr(atom.eq + 1), atom.offset});
      kids.push_back(Node::leaf(index));
    }
    return Node(std::move(r.label), std::move(kids));
  };
  Node root = build(build, raw);

  const std::size_t n = leaves.size();
  std::vector<std::optional<std::string>> words(n);
  std::vector<int> seen_large;
  for (auto& leaf : leaves) {
    if (static_cast<std::size_t>(leaf.index) >= n) {
      for (int other : seen_large)
        if (other == leaf.index) throw ParseError("duplicate index " + std::to_string(leaf.index), leaf.offset);
      seen_large.push_back(leaf.index);
      continue;
    }
    if (words[leaf.index]) throw ParseError("duplicate index " + std::to_string(leaf.index), leaf.offset);
    words[leaf.index] = std::move(leaf.word);
  }
  std::vector<std::string> sentence;
  sentence.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!words[i]) throw ParseError("missing index " + std::to_string(i), text.size());
    sentence.push_back(std::move(*words[i]));
  }
  return ConstituentTree(std::move(sentence), std::move(root));
}

/// Picks discbracket when any leaf carries an explicit `index=` prefix.
inline ConstituentTree parse_tree(std::string_view text, TreeFormat format) {
  switch (format) {
    case TreeFormat::Bracketed: return parse_bracketed(text);
    case TreeFormat::Discbracket: return parse_discbracket(text);
    case TreeFormat::Auto: break;
  }
  return detail::raw_has_indexed_leaf(detail::parse_raw(text)) ? parse_discbracket(text) : parse_bracketed(text);
}

namespace detail {

inline void emit_node(const ConstituentTree& tree, const Node& node, bool indexed, std::string& out) {
  if (node.is_leaf()) {
    if (indexed) {
      out += std::to_string(node.position());
      out += '=';
    }
    out += escape_word(tree.words()[node.position()]);
    return;
  }
  out += '(';
  out += escape_word(node.label());
  for (const auto& c : node.children()) {
    out += ' ';
    emit_node(tree, c, indexed, out);
  }
  out += ')';
}

}  // namespace detail

/// Single-line canonical form; throws for discontinuous trees.
inline std::string emit_bracketed(const ConstituentTree& tree) {
  if (!is_continuous(tree)) throw std::invalid_argument("tree is discontinuous");
  std::string out;
  detail::emit_node(tree, tree.root(), false, out);
  return out;
}

inline std::string emit_discbracket(const ConstituentTree& tree) {
  std::string out;
  detail::emit_node(tree, tree.root(), true, out);
  return out;
}

inline std::string emit_tree(const ConstituentTree& tree, TreeFormat format) {
  return format == TreeFormat::Bracketed ? emit_bracketed(tree) : emit_discbracket(tree);
}

/// One sentence per line, words separated by single spaces (escaped).
inline std::vector<std::string> parse_sentence(std::string_view line) {
  std::vector<std::string> words;
  std::string cur;
  bool any = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '\\' && i + 1 < line.size()) {
      const char esc = line[++i];
      cur += esc == 't' ? '\t' : esc == 'n' ? '\n' : esc == 'r' ? '\r' : esc;
      any = true;
    } else if (detail::is_space(ch)) {
      if (any) words.push_back(std::move(cur));
      cur.clear();
      any = false;
    } else {
      cur += ch;
      any = true;
    }
  }
  if (any) words.push_back(std::move(cur));
  return words;
}

inline std::string emit_sentence(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += escape_word(words[i]);
  }
  return out;
}

/// Reads lines from a plain or gzip-compressed file, or from a stream.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : file_(gzopen(path.c_str(), "rb"), &gzclose) {
    if (!file_) throw TreebankError("cannot open '" + path + "'");
  }
  explicit LineReader(std::istream& in) : file_(nullptr, &gzclose), stream_(&in) {}

  /// False at end of input. Strips the trailing newline (and CR).
  bool next(std::string& line) {
    line.clear();
    if (stream_) {
      if (!std::getline(*stream_, line)) return false;
    } else {
      char buf[8192];
      bool got = false;
      while (gzgets(file_.get(), buf, sizeof buf) != nullptr) {
        got = true;
        line += buf;
        if (!line.empty() && line.back() == '\n') break;
      }
      int err = 0;
      gzerror(file_.get(), &err);
      if (err != Z_OK && err != Z_STREAM_END) throw TreebankError("read error");
      if (!got) return false;
      if (!line.empty() && line.back() == '\n') line.pop_back();
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
  }

  std::size_t line_number() const { return line_number_; }

 private:
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file_;
  std::istream* stream_ = nullptr;
  std::size_t line_number_ = 0;
};

inline bool is_blank(std::string_view line) {
  for (char ch : line)
    if (!detail::is_space(ch)) return false;
  return true;
}

struct LineError {
  std::size_t line;
  std::string message;
};

struct Treebank {
  std::vector<ConstituentTree> trees;
  std::string source;
  std::vector<LineError> errors;  // only populated by lenient loads
};

/// Parses and validates one line; throws ParseError / TreebankError.
inline ConstituentTree read_tree_line(std::string_view line, TreeFormat format) {
  ConstituentTree tree = parse_tree(line, format);
  if (auto v = validate(tree)) throw TreebankError(v->message + " (node " + v->node + ")");
  return tree;
}

/// One tree per line; blank lines are skipped. Under strict mode the first
/// bad line aborts with its line number; lenient mode collects errors.
inline Treebank load_treebank(LineReader& reader, const std::string& source, TreeFormat format,
                              bool lenient = false) {
  Treebank bank;
  bank.source = source;
  std::string line;
  while (reader.next(line)) {
    if (is_blank(line)) continue;
    try {
      bank.trees.push_back(read_tree_line(line, format));
    } catch (const std::exception& e) {
      const std::string msg = "line " + std::to_string(reader.line_number()) + ": " + e.what();
      if (!lenient) throw TreebankError(source + ": " + msg);
      bank.errors.push_back({reader.line_number(), e.what()});
    }
  }
  return bank;
}

inline Treebank load_treebank(const std::string& path, TreeFormat format, bool lenient = false) {
  LineReader reader(path);
  return load_treebank(reader, path, format, lenient);
}

}  // namespace srseq
