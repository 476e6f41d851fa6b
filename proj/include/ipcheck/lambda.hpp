#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parse.hpp"

namespace ipcheck {

/// Lambda term with de Bruijn indices (0 = innermost binder).
class LambdaTerm {
 public:
  enum class Kind : std::uint8_t { var, lam, app };

  LambdaTerm() = default;

  static LambdaTerm var(std::uint32_t index);
  static LambdaTerm lam(LambdaTerm body);
  static LambdaTerm app(LambdaTerm fun, LambdaTerm arg);

  bool empty() const { return !node_; }
  Kind kind() const;
  std::uint32_t index() const;
  const LambdaTerm& body() const;
  const LambdaTerm& fun() const;
  const LambdaTerm& arg() const;

  friend bool operator==(const LambdaTerm& x, const LambdaTerm& y) {
    if (x.node_ == y.node_) return true;
    if (!x.node_ || !y.node_ || x.kind() != y.kind()) return false;
    switch (x.kind()) {
      case Kind::var: return x.index() == y.index();
      case Kind::lam: return x.body() == y.body();
      case Kind::app: return x.fun() == y.fun() && x.arg() == y.arg();
    }
    return false;
  }
  friend bool operator!=(const LambdaTerm& x, const LambdaTerm& y) { return !(x == y); }

 private:
  struct Node;
  explicit LambdaTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct LambdaTerm::Node {
  Kind kind;
  std::uint32_t index;
  LambdaTerm a;
  LambdaTerm b;
};

inline LambdaTerm::Kind LambdaTerm::kind() const { return node_->kind; }
inline std::uint32_t LambdaTerm::index() const { return node_->index; }
inline const LambdaTerm& LambdaTerm::body() const { return node_->a; }
inline const LambdaTerm& LambdaTerm::fun() const { return node_->a; }
inline const LambdaTerm& LambdaTerm::arg() const { return node_->b; }
inline LambdaTerm LambdaTerm::var(std::uint32_t index) {
  return LambdaTerm(std::make_shared<const Node>(Node{Kind::var, index, {}, {}}));
}
inline LambdaTerm LambdaTerm::lam(LambdaTerm body) {
  return LambdaTerm(std::make_shared<const Node>(Node{Kind::lam, 0, std::move(body), {}}));
}
inline LambdaTerm LambdaTerm::app(LambdaTerm fun, LambdaTerm arg) {
  return LambdaTerm(std::make_shared<const Node>(Node{Kind::app, 0, std::move(fun), std::move(arg)}));
}

/// 0 per variable, 1 per abstraction, 2 per application.
inline std::uint64_t lambda_size(const LambdaTerm& t) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var: return 0;
    case LambdaTerm::Kind::lam: return 1 + lambda_size(t.body());
    case LambdaTerm::Kind::app: return 2 + lambda_size(t.fun()) + lambda_size(t.arg());
  }
  return 0;
}

inline bool is_closed(const LambdaTerm& t, std::uint32_t depth = 0) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var: return t.index() < depth;
    case LambdaTerm::Kind::lam: return is_closed(t.body(), depth + 1);
    case LambdaTerm::Kind::app: return is_closed(t.fun(), depth) && is_closed(t.arg(), depth);
  }
  return false;
}

/// No beta redex anywhere.
inline bool is_normal_form(const LambdaTerm& t) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var: return true;
    case LambdaTerm::Kind::lam: return is_normal_form(t.body());
    case LambdaTerm::Kind::app:
      return t.fun().kind() != LambdaTerm::Kind::lam && is_normal_form(t.fun()) && is_normal_form(t.arg());
  }
  return false;
}

namespace detail {

inline std::string binder_name(std::uint32_t depth) {
  std::string s(1, static_cast<char>('a' + depth % 26));
  if (depth >= 26) s += std::to_string(depth / 26);
  return s;
}

inline void print_lambda(std::ostream& os, const LambdaTerm& t, std::uint32_t depth) {
  using K = LambdaTerm::Kind;
  switch (t.kind()) {
    case K::var:
      if (t.index() >= depth) {
        os << '#' << (t.index() - depth);  // free variable
      } else {
        os << binder_name(depth - 1 - t.index());
      }
      return;
    case K::lam:
      os << '\\' << binder_name(depth) << '.';
      print_lambda(os, t.body(), depth + 1);
      return;
    case K::app: {
      bool fp = t.fun().kind() == K::lam;
      if (fp) os << '(';
      print_lambda(os, t.fun(), depth);
      if (fp) os << ')';
      os << ' ';
      bool ap = t.arg().kind() != K::var;
      if (ap) os << '(';
      print_lambda(os, t.arg(), depth);
      if (ap) os << ')';
    }
  }
}

}  // namespace detail

/// Named display form: `\a.\b.a`, binders named a, b, c, ... by depth.
inline std::string to_string(const LambdaTerm& t) {
  std::ostringstream os;
  detail::print_lambda(os, t, 0);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const LambdaTerm& t) { return os << to_string(t); }

namespace detail {

class LambdaParser {
 public:
  explicit LambdaParser(std::string_view text) : text_(text) {}

  LambdaTerm parse() {
    LambdaTerm t = term();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected input in lambda term", pos_);
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) throw ParseError("expected a variable name", pos_);
    return std::string(text_.substr(start, pos_ - start));
  }

  LambdaTerm term() {
    if (at('\\')) {
      ++pos_;
      std::string name = ident();
      if (!at('.')) throw ParseError("expected '.'", pos_);
      ++pos_;
      scope_.push_back(name);
      LambdaTerm body = term();
      scope_.pop_back();
      return LambdaTerm::lam(std::move(body));
    }
    LambdaTerm t = atom();
    while (true) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] == ')') return t;
      if (text_[pos_] == '\\') return LambdaTerm::app(std::move(t), term());
      t = LambdaTerm::app(std::move(t), atom());
    }
  }

  LambdaTerm atom() {
    if (at('(')) {
      ++pos_;
      LambdaTerm t = term();
      if (!at(')')) throw ParseError("unbalanced '('", pos_);
      ++pos_;
      return t;
    }
    std::size_t where = pos_;
    std::string name = ident();
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i] == name) return LambdaTerm::var(static_cast<std::uint32_t>(scope_.size() - 1 - i));
    throw ParseError("free variable '" + name + "'", where);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses `\x.body` with application by juxtaposition. Terms must be closed.
inline LambdaTerm parse_lambda(std::string_view text) { return detail::LambdaParser(text).parse(); }

/// Combinator tree over S and K.
class SKTree {
 public:
  enum class Kind : std::uint8_t { s, k, apply };

  SKTree() = default;
  static SKTree s();
  static SKTree k();
  static SKTree apply(SKTree l, SKTree r);

  Kind kind() const;
  const SKTree& left() const;
  const SKTree& right() const;

 private:
  struct Node;
  explicit SKTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct SKTree::Node {
  Kind kind;
  SKTree l, r;
};

inline SKTree::Kind SKTree::kind() const { return node_->kind; }
inline const SKTree& SKTree::left() const { return node_->l; }
inline const SKTree& SKTree::right() const { return node_->r; }
inline SKTree SKTree::s() { return SKTree(std::make_shared<const Node>(Node{Kind::s, {}, {}})); }
inline SKTree SKTree::k() { return SKTree(std::make_shared<const Node>(Node{Kind::k, {}, {}})); }
inline SKTree SKTree::apply(SKTree l, SKTree r) {
  return SKTree(std::make_shared<const Node>(Node{Kind::apply, std::move(l), std::move(r)}));
}

inline std::string to_string(const SKTree& t) {
  switch (t.kind()) {
    case SKTree::Kind::s: return "s";
    case SKTree::Kind::k: return "k";
    case SKTree::Kind::apply: return "(" + to_string(t.left()) + "*" + to_string(t.right()) + ")";
  }
  return "?";
}

}  // namespace ipcheck
