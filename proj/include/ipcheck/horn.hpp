#pragma once

#include <cctype>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "formula.hpp"
#include "parse.hpp"

namespace ipcheck {

/// Atom index used for `false` inside clause form.
inline constexpr AtomIndex kFalsumAtom = std::numeric_limits<AtomIndex>::max();

/// Nested Horn clause: an atom, or `head :- [body...]` with a non-empty body
/// whose elements are again nested clauses.
class NestedHorn {
 public:
  NestedHorn() = default;

  static NestedHorn atom(AtomIndex a) { return NestedHorn(std::make_shared<const Node>(Node{a, {}, 0})); }

  /// An empty body yields the bare atom.
  static NestedHorn rule(AtomIndex head, std::vector<NestedHorn> body) {
    if (body.empty()) return atom(head);
    std::uint32_t size = 0;
    for (const auto& b : body) size += 1 + b.horn_size();
    return NestedHorn(std::make_shared<const Node>(Node{head, std::move(body), size}));
  }

  bool empty() const { return !node_; }
  bool is_atom() const { return node_->body.empty(); }
  bool is_rule() const { return !node_->body.empty(); }
  AtomIndex head() const { return node_->head; }
  const std::vector<NestedHorn>& body() const { return node_->body; }

  /// Total number of body-element positions.
  std::uint32_t horn_size() const { return node_->size; }

 private:
  struct Node {
    AtomIndex head;
    std::vector<NestedHorn> body;
    std::uint32_t size;
  };
  explicit NestedHorn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Atoms before rules; atoms by index; rules by head, then bodies
/// lexicographically (a proper prefix sorts first).
inline int term_order(const NestedHorn& a, const NestedHorn& b) {
  if (a.is_atom() != b.is_atom()) return a.is_atom() ? -1 : 1;
  if (a.head() != b.head()) return a.head() < b.head() ? -1 : 1;
  if (a.is_atom()) return 0;
  const auto& x = a.body();
  const auto& y = b.body();
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (int c = term_order(x[i], y[i]); c != 0) return c;
  if (x.size() == y.size()) return 0;
  return x.size() < y.size() ? -1 : 1;
}

inline bool operator==(const NestedHorn& a, const NestedHorn& b) { return term_order(a, b) == 0; }
inline bool operator!=(const NestedHorn& a, const NestedHorn& b) { return !(a == b); }
inline bool operator<(const NestedHorn& a, const NestedHorn& b) { return term_order(a, b) < 0; }

/// Leaves in traversal order: head first, then body elements left to right.
inline void horn_leaves(const NestedHorn& h, std::vector<AtomIndex>& out) {
  out.push_back(h.head());
  for (const auto& b : h.body()) horn_leaves(b, out);
}

inline std::vector<AtomIndex> horn_leaves(const NestedHorn& h) {
  std::vector<AtomIndex> out;
  horn_leaves(h, out);
  return out;
}

/// Number of nested rule levels: 0 for an atom.
inline std::uint32_t horn_depth(const NestedHorn& h) {
  std::uint32_t d = 0;
  for (const auto& b : h.body()) d = std::max(d, horn_depth(b));
  return h.is_atom() ? 0 : d + 1;
}

/// Bodies strictly increasing under term_order, recursively.
inline bool is_sorted_horn(const NestedHorn& h) {
  const auto& body = h.body();
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (!is_sorted_horn(body[i])) return false;
    if (i > 0 && !(term_order(body[i - 1], body[i]) < 0)) return false;
  }
  return true;
}

namespace detail {
inline NestedHorn relabel_horn(const NestedHorn& h, const std::vector<AtomIndex>& labels, std::size_t& pos) {
  AtomIndex head = labels[pos++];
  if (h.is_atom()) return NestedHorn::atom(head);
  std::vector<NestedHorn> body;
  body.reserve(h.body().size());
  for (const auto& b : h.body()) body.push_back(relabel_horn(b, labels, pos));
  return NestedHorn::rule(head, std::move(body));
}
}  // namespace detail

/// Replaces the i-th leaf (traversal order) by labels[i].
inline NestedHorn label_leaves(const NestedHorn& h, const std::vector<AtomIndex>& labels) {
  std::size_t pos = 0;
  return detail::relabel_horn(h, labels, pos);
}

inline void print(std::ostream& os, const NestedHorn& h, const SymbolTable* names = nullptr) {
  auto atom = [&](AtomIndex a) {
    if (a == kFalsumAtom) os << "false";
    else if (names) os << names->name(a);
    else os << a;
  };
  if (h.is_atom()) {
    atom(h.head());
    return;
  }
  os << '(';
  atom(h.head());
  os << ":-[";
  for (std::size_t i = 0; i < h.body().size(); ++i) {
    if (i) os << ',';
    print(os, h.body()[i], names);
  }
  os << "])";
}

inline std::string to_string(const NestedHorn& h, const SymbolTable* names = nullptr) {
  std::ostringstream os;
  print(os, h, names);
  return os.str();
}

inline std::string to_string(const NestedHorn& h, const SymbolTable& names) { return to_string(h, &names); }

inline std::ostream& operator<<(std::ostream& os, const NestedHorn& h) {
  print(os, h);
  return os;
}

namespace detail {

class HornParser {
 public:
  explicit HornParser(std::string_view text) : text_(text) {}

  NestedHorn parse() {
    NestedHorn h = clause();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected input after clause", pos_);
    return h;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!eat(tok)) throw ParseError("expected '" + std::string(tok) + "'", pos_);
  }
  AtomIndex atom() {
    skip_ws();
    if (eat("false")) return kFalsumAtom;
    std::size_t start = pos_;
    AtomIndex v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<AtomIndex>(text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected an atom", pos_);
    return v;
  }
  NestedHorn clause() {
    if (!eat("(")) return NestedHorn::atom(atom());
    AtomIndex head = atom();
    expect(":-");
    expect("[");
    std::vector<NestedHorn> body;
    if (!eat("]")) {
      do body.push_back(clause());
      while (eat(","));
      expect("]");
    }
    expect(")");
    return NestedHorn::rule(head, std::move(body));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads the printed form back: `h` or `(h:-[b1,...,bn])`, atoms numerals or false.
inline NestedHorn parse_horn(std::string_view text) { return detail::HornParser(text).parse(); }

}  // namespace ipcheck
