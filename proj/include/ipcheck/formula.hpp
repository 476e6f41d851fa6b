#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ipcheck {

using AtomIndex = std::uint32_t;

enum class Op : std::uint8_t { atom, falsum, neg, conj, disj, imp, iff };

class Formula;
struct FormulaNode;

namespace detail {
inline std::size_t hash_mix(std::size_t h, std::size_t v) {
  // splitmix-style finalizer folded into a running hash
  std::uint64_t x = static_cast<std::uint64_t>(h) ^ (static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL +
                                                     (static_cast<std::uint64_t>(h) << 6) +
                                                     (static_cast<std::uint64_t>(h) >> 2));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  return static_cast<std::size_t>(x);
}
}  // namespace detail

/// Immutable propositional formula. Nodes are shared; copies are cheap.
class Formula {
 public:
  Formula() = default;

  static Formula atom(AtomIndex index);
  static Formula falsum();
  static Formula neg(Formula arg);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula imp(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula binary(Op op, Formula lhs, Formula rhs);

  /// Wraps a node owned by some other Formula.
  static Formula from_node(const FormulaNode* node);

  bool empty() const { return !node_; }
  const FormulaNode* node() const { return node_.get(); }

  Op op() const;
  AtomIndex atom_index() const;
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& arg() const { return lhs(); }
  std::uint32_t size() const;
  std::size_t hash() const;

  bool is_atom() const { return op() == Op::atom; }
  bool is_falsum() const { return op() == Op::falsum; }
  bool is_imp() const { return op() == Op::imp; }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode : std::enable_shared_from_this<FormulaNode> {
  Op op = Op::atom;
  AtomIndex atom = 0;
  std::uint32_t size = 0;  // internal connective nodes
  std::size_t hash = 0;
  Formula lhs;  // also the argument of a negation
  Formula rhs;
};

inline bool node_equal(const FormulaNode* a, const FormulaNode* b) {
  while (true) {
    if (a == b) return true;
    if (a->hash != b->hash || a->op != b->op || a->size != b->size) return false;
    switch (a->op) {
      case Op::atom:
        return a->atom == b->atom;
      case Op::falsum:
        return true;
      case Op::neg:
        a = a->lhs.node();
        b = b->lhs.node();
        continue;
      default:
        if (!node_equal(a->lhs.node(), b->lhs.node())) return false;
        a = a->rhs.node();
        b = b->rhs.node();
    }
  }
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (!a.node_ || !b.node_) return a.node_ == b.node_;
  return node_equal(a.node(), b.node());
}

inline Formula Formula::atom(AtomIndex index) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::atom;
  n->atom = index;
  n->hash = detail::hash_mix(0x51ed27, index);
  return Formula(std::move(n));
}

inline Formula Formula::falsum() {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::falsum;
  n->hash = 0x7f4a7c15;
  return Formula(std::move(n));
}

inline Formula Formula::neg(Formula arg) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::neg;
  n->size = arg.size() + 1;
  n->hash = detail::hash_mix(0x3c6ef372, arg.hash());
  n->lhs = std::move(arg);
  return Formula(std::move(n));
}

inline Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  if (op == Op::atom || op == Op::falsum || op == Op::neg) throw std::invalid_argument("binary: not a binary connective");
  auto n = std::make_shared<FormulaNode>();
  n->op = op;
  n->size = lhs.size() + rhs.size() + 1;
  n->hash = detail::hash_mix(detail::hash_mix(static_cast<std::size_t>(op) * 0x85ebca6bU, lhs.hash()), rhs.hash());
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

inline Formula Formula::conj(Formula lhs, Formula rhs) { return binary(Op::conj, std::move(lhs), std::move(rhs)); }
inline Formula Formula::disj(Formula lhs, Formula rhs) { return binary(Op::disj, std::move(lhs), std::move(rhs)); }
inline Formula Formula::imp(Formula lhs, Formula rhs) { return binary(Op::imp, std::move(lhs), std::move(rhs)); }
inline Formula Formula::iff(Formula lhs, Formula rhs) { return binary(Op::iff, std::move(lhs), std::move(rhs)); }

inline Formula Formula::from_node(const FormulaNode* node) { return Formula(node->shared_from_this()); }

inline Op Formula::op() const { return node_->op; }
inline AtomIndex Formula::atom_index() const { return node_->atom; }
inline const Formula& Formula::lhs() const { return node_->lhs; }
inline const Formula& Formula::rhs() const { return node_->rhs; }
inline std::uint32_t Formula::size() const { return node_->size; }
inline std::size_t Formula::hash() const { return node_->hash; }

inline bool is_binary(Op op) { return op == Op::conj || op == Op::disj || op == Op::imp || op == Op::iff; }

/// Atoms and implications only; `false` counts as atomic.
inline bool is_implicational(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return true;
    case Op::imp:
      return is_implicational(f.lhs()) && is_implicational(f.rhs());
    default:
      return false;
  }
}

inline bool contains_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  if (f.op() == Op::neg) return contains_op(f.arg(), op);
  if (is_binary(f.op())) return contains_op(f.lhs(), op) || contains_op(f.rhs(), op);
  return false;
}

inline std::optional<AtomIndex> max_atom(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
      return f.atom_index();
    case Op::falsum:
      return std::nullopt;
    case Op::neg:
      return max_atom(f.arg());
    default: {
      auto a = max_atom(f.lhs());
      auto b = max_atom(f.rhs());
      if (!a) return b;
      if (!b) return a;
      return std::max(*a, *b);
    }
  }
}

/// Hands out atoms strictly above every atom of the inputs it was seeded with.
class FreshAtomAllocator {
 public:
  FreshAtomAllocator() = default;
  explicit FreshAtomAllocator(const Formula& f) { reserve(f); }

  void reserve(const Formula& f) {
    if (auto m = max_atom(f)) reserve_index(*m);
  }
  void reserve_index(AtomIndex i) {
    if (i + 1 > next_) next_ = i + 1;
  }
  AtomIndex first() const { return first_.value_or(next_); }
  AtomIndex next() {
    if (!first_) first_ = next_;
    return next_++;
  }
  Formula next_atom() { return Formula::atom(next()); }

 private:
  AtomIndex next_ = 0;
  std::optional<AtomIndex> first_;
};

/// Total order: atoms (by index) < false < negation < binary; binary
/// connectives ordered & < -> < <-> < v, then arguments left to right.
inline int compare(const Formula& a, const Formula& b) {
  auto rank = [](Op op) {
    switch (op) {
      case Op::atom: return 0;
      case Op::falsum: return 1;
      case Op::neg: return 2;
      case Op::conj: return 3;
      case Op::imp: return 4;
      case Op::iff: return 5;
      case Op::disj: return 6;
    }
    return 7;
  };
  if (a.node() == b.node()) return 0;
  int ra = rank(a.op()), rb = rank(b.op());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.op()) {
    case Op::atom:
      return a.atom_index() == b.atom_index() ? 0 : (a.atom_index() < b.atom_index() ? -1 : 1);
    case Op::falsum:
      return 0;
    case Op::neg:
      return compare(a.arg(), b.arg());
    default:
      if (int c = compare(a.lhs(), b.lhs()); c != 0) return c;
      return compare(a.rhs(), b.rhs());
  }
}

inline bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

/// Renames atoms to 0,1,2,... by first occurrence, left to right.
inline Formula canonical_numbering(const Formula& f) {
  std::unordered_map<AtomIndex, AtomIndex> names;
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    switch (g.op()) {
      case Op::atom: {
        auto [it, inserted] = names.try_emplace(g.atom_index(), static_cast<AtomIndex>(names.size()));
        return Formula::atom(it->second);
      }
      case Op::falsum:
        return g;
      case Op::neg:
        return Formula::neg(go(g.arg()));
      default: {
        Formula l = go(g.lhs());
        Formula r = go(g.rhs());
        return Formula::binary(g.op(), std::move(l), std::move(r));
      }
    }
  };
  return go(f);
}

/// Replaces every ~A by A->false.
inline Formula negation_normalize(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::imp(negation_normalize(f.arg()), Formula::falsum());
    default:
      return Formula::binary(f.op(), negation_normalize(f.lhs()), negation_normalize(f.rhs()));
  }
}

/// Leaf atoms left to right (false excluded).
inline void collect_atoms(const Formula& f, std::vector<AtomIndex>& out) {
  switch (f.op()) {
    case Op::atom:
      out.push_back(f.atom_index());
      return;
    case Op::falsum:
      return;
    case Op::neg:
      collect_atoms(f.arg(), out);
      return;
    default:
      collect_atoms(f.lhs(), out);
      collect_atoms(f.rhs(), out);
  }
}

/// Replaces atom i by labels[i]. Atoms outside the label range are kept.
inline Formula relabel(const Formula& f, const std::vector<AtomIndex>& labels) {
  switch (f.op()) {
    case Op::atom:
      return f.atom_index() < labels.size() ? Formula::atom(labels[f.atom_index()]) : f;
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::neg(relabel(f.arg(), labels));
    default:
      return Formula::binary(f.op(), relabel(f.lhs(), labels), relabel(f.rhs(), labels));
  }
}

/// Optional display names for atoms; unnamed atoms print as their index.
class SymbolTable {
 public:
  void set(AtomIndex i, std::string name) { names_[i] = std::move(name); }
  const std::string* find(AtomIndex i) const {
    auto it = names_.find(i);
    return it == names_.end() ? nullptr : &it->second;
  }
  std::string name(AtomIndex i) const {
    if (auto* n = find(i)) return *n;
    return std::to_string(i);
  }
  bool empty() const { return names_.empty(); }

  /// Names atoms at or above `first` as nv1, nv2, ...
  static SymbolTable fresh_names(AtomIndex first, AtomIndex end) {
    SymbolTable t;
    for (AtomIndex i = first; i < end; ++i) t.set(i, "nv" + std::to_string(i - first + 1));
    return t;
  }

 private:
  std::unordered_map<AtomIndex, std::string> names_;
};

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::iff: return 0;
    case Op::imp: return 1;
    case Op::disj: return 2;
    case Op::conj: return 3;
    case Op::neg: return 4;
    default: return 5;
  }
}

inline const char* op_text(Op op) {
  switch (op) {
    case Op::iff: return "<->";
    case Op::imp: return "->";
    case Op::disj: return " v ";
    case Op::conj: return "&";
    default: return "?";
  }
}

inline void print(std::ostream& os, const Formula& f, const SymbolTable* names) {
  switch (f.op()) {
    case Op::atom:
      if (names) os << names->name(f.atom_index());
      else os << f.atom_index();
      return;
    case Op::falsum:
      os << "false";
      return;
    case Op::neg: {
      os << '~';
      bool paren = precedence(f.arg().op()) < precedence(Op::neg);
      if (paren) os << '(';
      print(os, f.arg(), names);
      if (paren) os << ')';
      return;
    }
    default: {
      // all binary connectives associate to the right
      int p = precedence(f.op());
      bool lp = precedence(f.lhs().op()) <= p;
      bool rp = precedence(f.rhs().op()) < p;
      if (lp) os << '(';
      print(os, f.lhs(), names);
      if (lp) os << ')';
      os << op_text(f.op());
      if (rp) os << '(';
      print(os, f.rhs(), names);
      if (rp) os << ')';
    }
  }
}

}  // namespace detail

inline std::string to_string(const Formula& f, const SymbolTable* names = nullptr) {
  std::ostringstream os;
  detail::print(os, f, names);
  return os.str();
}

inline std::string to_string(const Formula& f, const SymbolTable& names) { return to_string(f, &names); }

inline std::ostream& operator<<(std::ostream& os, const Formula& f) {
  detail::print(os, f, nullptr);
  return os;
}

}  // namespace ipcheck

template <>
struct std::hash<ipcheck::Formula> {
  std::size_t operator()(const ipcheck::Formula& f) const noexcept { return f.hash(); }
};
