#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "formula.hpp"
#include "horn.hpp"

namespace ipcheck {

namespace detail {

inline AtomIndex horn_atom(const Formula& f) {
  if (f.op() == Op::falsum) return kFalsumAtom;
  if (f.op() == Op::atom) return f.atom_index();
  throw std::invalid_argument("to_horn: implicational formula expected");
}

inline Formula formula_atom(AtomIndex a) { return a == kFalsumAtom ? Formula::falsum() : Formula::atom(a); }

}  // namespace detail

/// Implication spine b1->...->bn->h becomes (h:-[b1',...,bn']).
inline NestedHorn to_horn(const Formula& f) {
  if (f.op() != Op::imp) return NestedHorn::atom(detail::horn_atom(f));
  std::vector<NestedHorn> body;
  const Formula* cur = &f;
  while (cur->op() == Op::imp) {
    body.push_back(to_horn(cur->lhs()));
    cur = &cur->rhs();
  }
  return NestedHorn::rule(detail::horn_atom(*cur), std::move(body));
}

inline Formula from_horn(const NestedHorn& h) {
  Formula r = detail::formula_atom(h.head());
  const auto& body = h.body();
  for (std::size_t i = body.size(); i-- > 0;) r = Formula::imp(from_horn(body[i]), std::move(r));
  return r;
}

namespace detail {

inline Formula expand_iff(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::neg(expand_iff(f.arg()));
    case Op::iff: {
      Formula a = expand_iff(f.lhs());
      Formula b = expand_iff(f.rhs());
      return Formula::conj(Formula::imp(a, b), Formula::imp(b, a));
    }
    default:
      return Formula::binary(f.op(), expand_iff(f.lhs()), expand_iff(f.rhs()));
  }
}

inline void head_clauses(const Formula& f, const std::vector<NestedHorn>& body, std::vector<NestedHorn>& out);

inline void body_elements(const Formula& f, std::vector<NestedHorn>& out) {
  switch (f.op()) {
    case Op::conj:
      body_elements(f.lhs(), out);
      body_elements(f.rhs(), out);
      return;
    case Op::atom:
    case Op::falsum:
      out.push_back(NestedHorn::atom(horn_atom(f)));
      return;
    case Op::imp:
      head_clauses(f, {}, out);
      return;
    default:
      throw std::invalid_argument("to_nested_horn_list: disjunction-free formula without negation expected");
  }
}

inline void head_clauses(const Formula& f, const std::vector<NestedHorn>& outer, std::vector<NestedHorn>& out) {
  std::vector<NestedHorn> body;
  const Formula* cur = &f;
  while (cur->op() == Op::imp) {
    body_elements(cur->lhs(), body);
    cur = &cur->rhs();
  }
  body.insert(body.end(), outer.begin(), outer.end());
  switch (cur->op()) {
    case Op::conj:
      head_clauses(cur->lhs(), body, out);
      head_clauses(cur->rhs(), body, out);
      return;
    case Op::atom:
    case Op::falsum:
      out.push_back(NestedHorn::rule(horn_atom(*cur), std::move(body)));
      return;
    default:
      throw std::invalid_argument("to_nested_horn_list: disjunction-free formula without negation expected");
  }
}

}  // namespace detail

/// Splits a disjunction-free formula into nested Horn clauses whose
/// conjunction is equiprovable with it. A clause mentioning false also gets
/// (p:-[false]) in its body for each of its atoms p, so that provability of
/// the clauses with false read as an ordinary atom matches the original.
inline std::vector<NestedHorn> to_nested_horn_list(const Formula& f) {
  if (contains_op(f, Op::disj)) throw std::invalid_argument("to_nested_horn_list: formula contains a disjunction");
  std::vector<NestedHorn> out;
  detail::head_clauses(detail::expand_iff(negation_normalize(f)), {}, out);
  for (auto& c : out) {
    std::vector<AtomIndex> atoms = horn_leaves(c);
    if (std::find(atoms.begin(), atoms.end(), kFalsumAtom) == atoms.end()) continue;
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    std::vector<NestedHorn> body = c.body();
    for (AtomIndex a : atoms)
      if (a != kFalsumAtom) body.push_back(NestedHorn::rule(a, {NestedHorn::atom(kFalsumAtom)}));
    c = NestedHorn::rule(c.head(), std::move(body));
  }
  return out;
}

namespace detail {

class MintsBuilder {
 public:
  explicit MintsBuilder(const Formula& f) : fresh_(f) {}

  Formula run(const Formula& f) {
    Formula goal = name(f);
    Formula r = goal;
    for (std::size_t i = backward_.size(); i-- > 0;) r = Formula::imp(backward_[i], std::move(r));
    for (std::size_t i = forward_.size(); i-- > 0;) r = Formula::imp(forward_[i], std::move(r));
    return r;
  }

  AtomIndex first_fresh() const { return fresh_.first(); }

 private:
  Formula name(const Formula& f) {
    using F = Formula;
    switch (f.op()) {
      case Op::atom:
      case Op::falsum:
        return f;
      case Op::neg:
        return name(F::imp(f.arg(), F::falsum()));
      default:
        break;
    }
    Formula p = fresh_.next_atom();
    if (f.op() == Op::iff) {
      Formula q1 = fresh_.next_atom();
      Formula q2 = fresh_.next_atom();
      std::size_t at = forward_.size();
      forward_.push_back(F::imp(p, q1));
      forward_.push_back(F::imp(p, q2));
      forward_.push_back(Formula());
      forward_.push_back(Formula());
      std::size_t bat = backward_.size();
      backward_.push_back(F::imp(q1, F::imp(q2, p)));
      backward_.push_back(Formula());
      backward_.push_back(Formula());
      Formula a = name(f.lhs());
      Formula b = name(f.rhs());
      forward_[at + 2] = F::imp(q1, F::imp(a, b));
      forward_[at + 3] = F::imp(q2, F::imp(b, a));
      backward_[bat + 1] = F::imp(F::imp(a, b), q1);
      backward_[bat + 2] = F::imp(F::imp(b, a), q2);
      return p;
    }
    // reserve slots so definitions stay in naming order
    std::size_t at = forward_.size();
    std::size_t nf = f.op() == Op::conj ? 2 : 1;
    std::size_t bat = backward_.size();
    std::size_t nb = f.op() == Op::disj ? 2 : 1;
    forward_.resize(at + nf);
    backward_.resize(bat + nb);
    Formula a = name(f.lhs());
    Formula b = name(f.rhs());
    switch (f.op()) {
      case Op::imp:
        forward_[at] = F::imp(p, F::imp(a, b));
        backward_[bat] = F::imp(F::imp(a, b), p);
        break;
      case Op::conj:
        forward_[at] = F::imp(p, a);
        forward_[at + 1] = F::imp(p, b);
        backward_[bat] = F::imp(a, F::imp(b, p));
        break;
      case Op::disj:
        forward_[at] = F::imp(p, F::disj(a, b));
        backward_[bat] = F::imp(a, p);
        backward_[bat + 1] = F::imp(b, p);
        break;
      default:
        break;
    }
    return p;
  }

  FreshAtomAllocator fresh_;
  std::vector<Formula> forward_;
  std::vector<Formula> backward_;
};

inline bool mints_atomic(const Formula& f) { return f.op() == Op::atom || f.op() == Op::falsum; }

}  // namespace detail

/// Mints-style flattening: a curried chain D1->...->Dk->g of flat defining
/// clauses over fresh atoms, equiprovable with `f`. Fresh atoms start above
/// the largest atom of `f`.
inline Formula mints(const Formula& f) { return detail::MintsBuilder(f).run(f); }

/// First atom index `mints(f)` may introduce.
inline AtomIndex mints_first_fresh(const Formula& f) {
  auto m = max_atom(f);
  return m ? *m + 1 : 0;
}

/// One of: p, p->q, (p->q)->r, p->(q->r), p->(q v r), with p, q, r atoms or false.
inline bool is_mints_clause(const Formula& f) {
  using detail::mints_atomic;
  if (mints_atomic(f)) return true;
  if (f.op() != Op::imp) return false;
  const Formula& l = f.lhs();
  const Formula& r = f.rhs();
  if (mints_atomic(l) && mints_atomic(r)) return true;
  if (l.op() == Op::imp && mints_atomic(l.lhs()) && mints_atomic(l.rhs()) && mints_atomic(r)) return true;
  if (!mints_atomic(l)) return false;
  if ((r.op() == Op::imp || r.op() == Op::disj) && mints_atomic(r.lhs()) && mints_atomic(r.rhs())) return true;
  return false;
}

/// Splits a curried chain into its premises and final atom.
inline std::vector<Formula> mints_clauses(const Formula& f, Formula* goal = nullptr) {
  std::vector<Formula> out;
  const Formula* cur = &f;
  while (cur->op() == Op::imp) {
    out.push_back(cur->lhs());
    cur = &cur->rhs();
  }
  if (goal) *goal = *cur;
  return out;
}

/// Rewrites -> and & using only v and <->; negation is kept.
inline Formula to_disj_bicond(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::neg(to_disj_bicond(f.arg()));
    default:
      break;
  }
  Formula x = to_disj_bicond(f.lhs());
  Formula y = to_disj_bicond(f.rhs());
  switch (f.op()) {
    case Op::imp:
      return Formula::iff(Formula::disj(x, y), y);
    case Op::conj:
      return Formula::iff(Formula::disj(x, y), Formula::iff(x, y));
    default:
      return Formula::binary(f.op(), std::move(x), std::move(y));
  }
}

/// Inverse rewrite: (X v Y)<->Y to X->Y and (X v Y)<->(X<->Y) to X&Y.
inline Formula from_disj_bicond(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::neg(from_disj_bicond(f.arg()));
    default:
      break;
  }
  if (f.op() == Op::iff && f.lhs().op() == Op::disj) {
    const Formula& x = f.lhs().lhs();
    const Formula& y = f.lhs().rhs();
    const Formula& r = f.rhs();
    if (r == y) return Formula::imp(from_disj_bicond(x), from_disj_bicond(y));
    if (r.op() == Op::iff && r.lhs() == x && r.rhs() == y) return Formula::conj(from_disj_bicond(x), from_disj_bicond(y));
  }
  return Formula::binary(f.op(), from_disj_bicond(f.lhs()), from_disj_bicond(f.rhs()));
}

/// True if `f` contains a subformula the reverse rewrite would fold.
inline bool has_disj_bicond_pattern(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return false;
    case Op::neg:
      return has_disj_bicond_pattern(f.arg());
    default:
      break;
  }
  if (f.op() == Op::iff && f.lhs().op() == Op::disj) {
    const Formula& x = f.lhs().lhs();
    const Formula& y = f.lhs().rhs();
    const Formula& r = f.rhs();
    if (r == y || (r.op() == Op::iff && r.lhs() == x && r.rhs() == y)) return true;
  }
  return has_disj_bicond_pattern(f.lhs()) || has_disj_bicond_pattern(f.rhs());
}

}  // namespace ipcheck
