#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "formula.hpp"
#include "lambda.hpp"

namespace ipcheck {

using TypeRef = std::uint32_t;

/// Type terms (metavariables and arrows) plus a backtrackable binding store.
/// Every binding is recorded on a trail; undo() restores any earlier mark
/// exactly, including discarding cells created after it.
class TypeStore {
 public:
  static constexpr TypeRef kUnbound = std::numeric_limits<TypeRef>::max();

  struct Mark {
    std::size_t cells;
    std::size_t trail;
  };

  TypeRef fresh() {
    cells_.push_back(Cell{true, kUnbound, 0});
    return static_cast<TypeRef>(cells_.size() - 1);
  }

  TypeRef arrow(TypeRef from, TypeRef to) {
    cells_.push_back(Cell{false, from, to});
    return static_cast<TypeRef>(cells_.size() - 1);
  }

  bool is_var(TypeRef t) const { return cells_[t].is_var; }
  TypeRef from(TypeRef t) const { return cells_[t].a; }
  TypeRef to(TypeRef t) const { return cells_[t].b; }

  /// Follows variable bindings to a representative.
  TypeRef resolve(TypeRef t) const {
    while (cells_[t].is_var && cells_[t].a != kUnbound) t = cells_[t].a;
    return t;
  }

  Mark mark() const { return Mark{cells_.size(), trail_.size()}; }

  void undo(Mark m) {
    while (trail_.size() > m.trail) {
      cells_[trail_.back()].a = kUnbound;
      trail_.pop_back();
    }
    cells_.resize(m.cells);
  }

  /// True if unbound variable `v` occurs in `t`.
  bool occurs(TypeRef v, TypeRef t) const {
    stack_.clear();
    stack_.push_back(t);
    while (!stack_.empty()) {
      TypeRef x = resolve(stack_.back());
      stack_.pop_back();
      if (x == v) return true;
      if (!cells_[x].is_var) {
        stack_.push_back(cells_[x].a);
        stack_.push_back(cells_[x].b);
      }
    }
    return false;
  }

  /// Unification with occurs check. On failure the store is left unchanged.
  bool unify(TypeRef a, TypeRef b) {
    Mark m = mark();
    pairs_.clear();
    pairs_.emplace_back(a, b);
    while (!pairs_.empty()) {
      auto [x, y] = pairs_.back();
      pairs_.pop_back();
      x = resolve(x);
      y = resolve(y);
      if (x == y) continue;
      if (cells_[x].is_var || cells_[y].is_var) {
        if (!cells_[x].is_var) std::swap(x, y);
        if (occurs(x, y)) {
          undo(m);
          return false;
        }
        bind(x, y);
        continue;
      }
      pairs_.emplace_back(cells_[x].b, cells_[y].b);
      pairs_.emplace_back(cells_[x].a, cells_[y].a);
    }
    return true;
  }

  /// Resolved term as a formula; metavariables numbered by first occurrence.
  Formula to_formula(TypeRef t) const {
    std::unordered_map<TypeRef, AtomIndex> names;
    return to_formula(t, names);
  }

  Formula to_formula(TypeRef t, std::unordered_map<TypeRef, AtomIndex>& names) const {
    t = resolve(t);
    if (cells_[t].is_var) {
      auto [it, inserted] = names.try_emplace(t, static_cast<AtomIndex>(names.size()));
      return Formula::atom(it->second);
    }
    Formula l = to_formula(cells_[t].a, names);
    Formula r = to_formula(cells_[t].b, names);
    return Formula::imp(std::move(l), std::move(r));
  }

  /// Builds a term for an implicational formula, one metavariable per atom.
  TypeRef from_formula(const Formula& f, std::unordered_map<AtomIndex, TypeRef>& vars) {
    if (f.op() == Op::atom) {
      auto it = vars.find(f.atom_index());
      if (it == vars.end()) it = vars.emplace(f.atom_index(), fresh()).first;
      return it->second;
    }
    if (f.op() != Op::imp) throw std::invalid_argument("from_formula: implicational formula expected");
    TypeRef l = from_formula(f.lhs(), vars);
    TypeRef r = from_formula(f.rhs(), vars);
    return arrow(l, r);
  }

  std::size_t cell_count() const { return cells_.size(); }
  std::size_t trail_size() const { return trail_.size(); }

  bool operator==(const TypeStore& o) const { return cells_ == o.cells_ && trail_ == o.trail_; }

  /// Every bound chain terminates and no term contains itself.
  bool acyclic() const {
    std::vector<std::uint8_t> state(cells_.size(), 0);  // 0 new, 1 on path, 2 done
    std::vector<std::pair<TypeRef, bool>> work;
    for (TypeRef root = 0; root < cells_.size(); ++root) {
      if (state[root]) continue;
      work.emplace_back(root, false);
      while (!work.empty()) {
        auto [t, leaving] = work.back();
        work.pop_back();
        if (leaving) {
          state[t] = 2;
          continue;
        }
        if (state[t] == 2) continue;
        if (state[t] == 1) return false;
        state[t] = 1;
        work.emplace_back(t, true);
        const Cell& c = cells_[t];
        if (c.is_var) {
          if (c.a != kUnbound) {
            if (state[c.a] == 1) return false;
            work.emplace_back(c.a, false);
          }
        } else {
          for (TypeRef k : {c.a, c.b}) {
            if (state[k] == 1) return false;
            work.emplace_back(k, false);
          }
        }
      }
    }
    return true;
  }

 private:
  struct Cell {
    bool is_var;
    TypeRef a;  // binding for variables, source for arrows
    TypeRef b;  // target for arrows
    bool operator==(const Cell&) const = default;
  };

  void bind(TypeRef var, TypeRef value) {
    cells_[var].a = value;
    trail_.push_back(var);
  }

  std::vector<Cell> cells_;
  std::vector<TypeRef> trail_;
  mutable std::vector<TypeRef> stack_;
  std::vector<std::pair<TypeRef, TypeRef>> pairs_;
};

/// Free-standing form of TypeStore::unify.
inline bool unify_occurs(TypeRef a, TypeRef b, TypeStore& store) { return store.unify(a, b); }

namespace detail {

inline std::optional<TypeRef> infer(const LambdaTerm& t, TypeStore& store, std::vector<TypeRef>& env) {
  switch (t.kind()) {
    case LambdaTerm::Kind::var:
      if (t.index() >= env.size()) throw std::invalid_argument("infer_type: open term");
      return env[env.size() - 1 - t.index()];
    case LambdaTerm::Kind::lam: {
      TypeRef x = store.fresh();
      env.push_back(x);
      auto body = infer(t.body(), store, env);
      env.pop_back();
      if (!body) return std::nullopt;
      return store.arrow(x, *body);
    }
    case LambdaTerm::Kind::app: {
      auto f = infer(t.fun(), store, env);
      if (!f) return std::nullopt;
      auto a = infer(t.arg(), store, env);
      if (!a) return std::nullopt;
      TypeRef r = store.fresh();
      if (!store.unify(*f, store.arrow(*a, r))) return std::nullopt;
      return r;
    }
  }
  return std::nullopt;
}

inline TypeRef s_type(TypeStore& st) {
  TypeRef a = st.fresh(), b = st.fresh(), c = st.fresh();
  TypeRef abc = st.arrow(a, st.arrow(b, c));
  TypeRef ab = st.arrow(a, b);
  TypeRef ac = st.arrow(a, c);
  return st.arrow(abc, st.arrow(ab, ac));
}

inline TypeRef k_type(TypeStore& st) {
  TypeRef a = st.fresh(), b = st.fresh();
  return st.arrow(a, st.arrow(b, a));
}

inline std::optional<TypeRef> sk_type(const SKTree& t, TypeStore& st) {
  switch (t.kind()) {
    case SKTree::Kind::s: return s_type(st);
    case SKTree::Kind::k: return k_type(st);
    case SKTree::Kind::apply: {
      auto f = sk_type(t.left(), st);
      if (!f) return std::nullopt;
      auto a = sk_type(t.right(), st);
      if (!a) return std::nullopt;
      TypeRef target = st.fresh();
      if (!st.unify(*f, st.arrow(*a, target))) return std::nullopt;
      return target;
    }
  }
  return std::nullopt;
}

// One-way matching: binds pattern variables to subformulas of `f`.
inline bool match(const TypeStore& st, TypeRef p, const Formula& f, std::unordered_map<TypeRef, Formula>& subst) {
  p = st.resolve(p);
  if (st.is_var(p)) {
    auto [it, inserted] = subst.try_emplace(p, f);
    return inserted || it->second == f;
  }
  if (f.op() != Op::imp) return false;
  return match(st, st.from(p), f.lhs(), subst) && match(st, st.to(p), f.rhs(), subst);
}

}  // namespace detail

/// Principal simple type, canonically numbered; nullopt if untypable.
/// Throws std::invalid_argument on open terms.
inline std::optional<Formula> infer_type(const LambdaTerm& t) {
  TypeStore store;
  std::vector<TypeRef> env;
  auto r = detail::infer(t, store, env);
  if (!r) return std::nullopt;
  return store.to_formula(*r);
}

/// Principal type of an SK combinator tree; nullopt if untypable.
inline std::optional<Formula> type_of_sk(const SKTree& t) {
  TypeStore store;
  auto r = detail::sk_type(t, store);
  if (!r) return std::nullopt;
  return store.to_formula(*r);
}

/// True iff `f` is a substitution instance of the principal type of `t`.
inline bool type_check(const LambdaTerm& t, const Formula& f) {
  if (!is_closed(t)) return false;
  TypeStore store;
  std::vector<TypeRef> env;
  auto r = detail::infer(t, store, env);
  if (!r) return false;
  std::unordered_map<TypeRef, Formula> subst;
  return detail::match(store, *r, f, subst);
}

}  // namespace ipcheck
