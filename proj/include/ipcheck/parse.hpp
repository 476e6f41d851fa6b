#pragma once

#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "formula.hpp"

namespace ipcheck {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), message_(what), position_(position) {}
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

struct ParsedFormula {
  Formula formula;
  SymbolTable names;  // identifier atoms; numerals are their own index
};

namespace detail {

// Syntax tree with unresolved atom names, resolved once all numerals are known.
struct RawFormula {
  Op op = Op::atom;
  std::string name;  // atom text
  bool numeral = false;
  std::vector<RawFormula> kids;
};

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  RawFormula parse() {
    RawFormula f = formula();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') fail("unbalanced ')'");
      fail("unexpected input '" + std::string(1, text_[pos_]) + "'");
    }
    return f;
  }

 private:
  enum class Tok { end, lparen, rparen, neg, conj, disj, imp, iff, ident, number, bad };

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  // Classifies the next token without consuming it; sets len_.
  Tok peek() {
    skip_ws();
    len_ = 0;
    if (pos_ >= text_.size()) return Tok::end;
    char c = text_[pos_];
    auto rest = text_.substr(pos_);
    if (c == '(') return len_ = 1, Tok::lparen;
    if (c == ')') return len_ = 1, Tok::rparen;
    if (c == '~') return len_ = 1, Tok::neg;
    if (c == '&') return len_ = 1, Tok::conj;
    if (rest.rfind("<->", 0) == 0) return len_ = 3, Tok::iff;
    if (rest.rfind("->", 0) == 0) return len_ = 2, Tok::imp;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 0;
      while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
      len_ = n;
      return Tok::number;
    }
    if (ident_start(c)) {
      std::size_t n = 0;
      while (n < rest.size() && ident_char(rest[n])) ++n;
      len_ = n;
      if (rest.substr(0, n) == "v") return Tok::disj;
      return Tok::ident;
    }
    return Tok::bad;
  }

  std::string_view take() {
    auto s = text_.substr(pos_, len_);
    pos_ += len_;
    return s;
  }

  static RawFormula node(Op op, RawFormula a, RawFormula b) {
    RawFormula r;
    r.op = op;
    r.kids.push_back(std::move(a));
    r.kids.push_back(std::move(b));
    return r;
  }

  RawFormula formula() { return iff(); }

  RawFormula iff() {
    RawFormula lhs = imp();
    if (peek() == Tok::iff) {
      take();
      return node(Op::iff, std::move(lhs), iff());
    }
    return lhs;
  }

  RawFormula imp() {
    RawFormula lhs = disj();
    if (peek() == Tok::imp) {
      take();
      return node(Op::imp, std::move(lhs), imp());
    }
    return lhs;
  }

  RawFormula disj() {
    RawFormula lhs = conj();
    if (peek() == Tok::disj) {
      take();
      return node(Op::disj, std::move(lhs), disj());
    }
    return lhs;
  }

  RawFormula conj() {
    RawFormula lhs = neg();
    if (peek() == Tok::conj) {
      take();
      return node(Op::conj, std::move(lhs), conj());
    }
    return lhs;
  }

  RawFormula neg() {
    Tok t = peek();
    switch (t) {
      case Tok::neg: {
        take();
        RawFormula r;
        r.op = Op::neg;
        r.kids.push_back(neg());
        return r;
      }
      case Tok::lparen: {
        std::size_t open = pos_;
        take();
        RawFormula inner = formula();
        if (peek() != Tok::rparen) {
          if (peek() == Tok::end) throw ParseError("unbalanced '('", open);
          fail("expected ')'");
        }
        take();
        return inner;
      }
      case Tok::number:
      case Tok::ident: {
        RawFormula r;
        r.name = std::string(take());
        if (t == Tok::ident && r.name == "false") {
          r.op = Op::falsum;
        } else {
          r.op = Op::atom;
          r.numeral = t == Tok::number;
        }
        return r;
      }
      case Tok::end:
        fail("unexpected end of input");
      case Tok::rparen:
        fail("unbalanced ')'");
      default:
        fail("expected a formula");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
};

inline void scan_numerals(const RawFormula& r, std::optional<AtomIndex>& max_numeral) {
  if (r.op == Op::atom && r.numeral) {
    unsigned long long v = 0;
    auto res = std::from_chars(r.name.data(), r.name.data() + r.name.size(), v);
    if (res.ec != std::errc() || v >= std::numeric_limits<AtomIndex>::max()) throw ParseError("numeral out of range", 0);
    auto a = static_cast<AtomIndex>(v);
    if (!max_numeral || a > *max_numeral) max_numeral = a;
  }
  for (const auto& k : r.kids) scan_numerals(k, max_numeral);
}

inline Formula resolve(const RawFormula& r, std::map<std::string, AtomIndex, std::less<>>& ids, AtomIndex& next_id,
                       SymbolTable& names) {
  switch (r.op) {
    case Op::atom: {
      if (r.numeral) return Formula::atom(static_cast<AtomIndex>(std::stoull(r.name)));
      auto it = ids.find(r.name);
      if (it == ids.end()) {
        it = ids.emplace(r.name, next_id++).first;
        names.set(it->second, r.name);
      }
      return Formula::atom(it->second);
    }
    case Op::falsum:
      return Formula::falsum();
    case Op::neg:
      return Formula::neg(resolve(r.kids[0], ids, next_id, names));
    default: {
      Formula a = resolve(r.kids[0], ids, next_id, names);
      Formula b = resolve(r.kids[1], ids, next_id, names);
      return Formula::binary(r.op, std::move(a), std::move(b));
    }
  }
}

}  // namespace detail

/// Parses the text format. Numerals denote their own atom index; identifiers
/// get indices above the largest numeral, in order of first occurrence.
inline ParsedFormula parse_formula_named(std::string_view text) {
  detail::RawFormula raw = detail::FormulaParser(text).parse();
  std::optional<AtomIndex> max_numeral;
  detail::scan_numerals(raw, max_numeral);
  AtomIndex next_id = max_numeral ? *max_numeral + 1 : 0;
  std::map<std::string, AtomIndex, std::less<>> ids;
  ParsedFormula out;
  out.formula = detail::resolve(raw, ids, next_id, out.names);
  return out;
}

inline Formula parse_formula(std::string_view text) { return parse_formula_named(text).formula; }

/// Corpus format: one formula per line; blank lines and `#` comments skipped.
template <typename F>
void for_each_corpus_line(std::istream& in, F&& on_formula) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      on_formula(parse_formula_named(line), line);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.message(), e.position());
    }
  }
}

}  // namespace ipcheck
