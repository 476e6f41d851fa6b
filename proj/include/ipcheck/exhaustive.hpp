#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "formula.hpp"
#include "horn.hpp"
#include "lambda.hpp"
#include "provers.hpp"
#include "transforms.hpp"
#include "types.hpp"

namespace ipcheck {

/// Restricted-growth string: labels[i] is the block of element i.
using SetPartition = std::vector<AtomIndex>;

namespace detail {

// Visitors may return void (never stop) or bool (false stops the stream).
template <class F, class... A>
bool visit(F& f, A&&... args) {
  if constexpr (std::is_void_v<std::invoke_result_t<F&, A...>>) {
    f(std::forward<A>(args)...);
    return true;
  } else {
    return static_cast<bool>(f(std::forward<A>(args)...));
  }
}

inline std::vector<AtomIndex> iota_labels(std::size_t n) {
  std::vector<AtomIndex> v(n);
  std::iota(v.begin(), v.end(), AtomIndex{0});
  return v;
}

// Block of rest[0] absorbs any subset of the remaining elements; the element
// right after rest[0] varies fastest.
template <class F>
bool mpart(const std::vector<std::uint32_t>& rest, AtomIndex block, SetPartition& labels, F& f) {
  if (rest.empty()) return visit(f, static_cast<const SetPartition&>(labels));
  labels[rest[0]] = block;
  const std::size_t m = rest.size() - 1;
  std::vector<std::uint32_t> rs;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    rs.clear();
    for (std::size_t j = 0; j < m; ++j) {
      std::uint32_t x = rest[1 + j];
      if ((mask >> j) & 1U) rs.push_back(x);
      else labels[x] = block;
    }
    if (!mpart(rs, block + 1, labels, f)) return false;
  }
  return true;
}

inline Formula shift_atoms(const Formula& f, AtomIndex by) {
  switch (f.op()) {
    case Op::atom:
      return Formula::atom(f.atom_index() + by);
    case Op::falsum:
      return f;
    case Op::neg:
      return Formula::neg(shift_atoms(f.arg(), by));
    default:
      return Formula::binary(f.op(), shift_atoms(f.lhs(), by), shift_atoms(f.rhs(), by));
  }
}

inline std::uint32_t leaf_count(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return 1;
    case Op::neg:
      return leaf_count(f.arg());
    default:
      return leaf_count(f.lhs()) + leaf_count(f.rhs());
  }
}

// Implicational skeletons of size n, leaves numbered 0..n left to right.
inline const std::vector<Formula>& impl_shapes(std::size_t n) {
  static std::deque<std::vector<Formula>> memo;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (memo.size() <= n) {
    std::size_t m = memo.size();
    std::vector<Formula> out;
    if (m == 0) {
      out.push_back(Formula::atom(0));
    } else {
      for (std::size_t k = 0; k < m; ++k)
        for (const auto& l : memo[k])
          for (const auto& r : memo[m - 1 - k])
            out.push_back(Formula::imp(l, shift_atoms(r, static_cast<AtomIndex>(k + 1))));
    }
    memo.push_back(std::move(out));
  }
  return memo[n];
}

inline constexpr Op kFullBinaryOps[] = {Op::imp, Op::conj, Op::disj, Op::iff};

// Full-formula skeletons: unary negation and the four binary connectives.
inline const std::vector<Formula>& full_shapes(std::size_t n) {
  static std::deque<std::vector<Formula>> memo;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (memo.size() <= n) {
    std::size_t m = memo.size();
    std::vector<Formula> out;
    if (m == 0) {
      out.push_back(Formula::atom(0));
    } else {
      for (const auto& a : memo[m - 1]) out.push_back(Formula::neg(a));
      for (Op op : kFullBinaryOps)
        for (std::size_t k = 0; k < m; ++k)
          for (const auto& l : memo[k])
            for (const auto& r : memo[m - 1 - k]) out.push_back(Formula::binary(op, l, shift_atoms(r, leaf_count(l))));
    }
    memo.push_back(std::move(out));
  }
  return memo[n];
}

// Nested Horn shapes (all leaves 0) by size, and body sequences by cost.
struct HornShapes {
  std::vector<std::vector<NestedHorn>> trees;
  std::vector<std::vector<std::vector<NestedHorn>>> seqs;

  void grow(std::size_t n) {
    while (trees.size() <= n) {
      std::size_t m = trees.size();
      std::vector<NestedHorn> out;
      if (m == 0) {
        out.push_back(NestedHorn::atom(0));
        trees.push_back(std::move(out));
        seqs.push_back({{}});
        continue;
      }
      for (std::size_t k = 0; k < m; ++k)
        for (const auto& b : trees[k])
          for (const auto& rest : seqs[m - 1 - k]) {
            std::vector<NestedHorn> body;
            body.reserve(rest.size() + 1);
            body.push_back(b);
            body.insert(body.end(), rest.begin(), rest.end());
            out.push_back(NestedHorn::rule(0, std::move(body)));
          }
      trees.push_back(std::move(out));
      std::vector<std::vector<NestedHorn>> sq;
      for (std::size_t j = 0; j < m; ++j)
        for (const auto& e : trees[j])
          for (const auto& rest : seqs[m - 1 - j]) {
            std::vector<NestedHorn> s;
            s.reserve(rest.size() + 1);
            s.push_back(e);
            s.insert(s.end(), rest.begin(), rest.end());
            sq.push_back(std::move(s));
          }
      seqs.push_back(std::move(sq));
    }
  }
};

// Horn skeletons of size n with leaves numbered by traversal position.
inline const std::vector<NestedHorn>& horn_skeletons(std::size_t n) {
  static HornShapes shapes;
  static std::deque<std::vector<NestedHorn>> labeled;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  shapes.grow(n);
  while (labeled.size() <= n) {
    std::size_t m = labeled.size();
    std::vector<NestedHorn> out;
    out.reserve(shapes.trees[m].size());
    auto labels = iota_labels(m + 1);
    for (const auto& t : shapes.trees[m]) out.push_back(label_leaves(t, labels));
    labeled.push_back(std::move(out));
  }
  return labeled[n];
}

// Typable normal forms: the size-bounded search behind typed_nf/impl_taut.
class TypedNfSearch {
 public:
  static constexpr std::int32_t kLam = -1;
  static constexpr std::int32_t kApp = -2;

  // emit(store, root type, choices) -> bool
  template <class Emit>
  void run(int n, Emit&& emit) {
    TypeRef root = st_.fresh();
    std::function<bool(int)> done = [&](int b) {
      if (b != 0) return true;
      return visit(emit, static_cast<const TypeStore&>(st_), root, static_cast<const std::vector<std::int32_t>&>(choices_));
    };
    taut(root, nullptr, n, done);
  }

  static LambdaTerm decode(const std::vector<std::int32_t>& ch) {
    std::size_t pos = 0;
    return decode(ch, pos);
  }

 private:
  struct Env {
    TypeRef t;
    const Env* next;
  };
  using K = std::function<bool(int)>;

  static LambdaTerm decode(const std::vector<std::int32_t>& ch, std::size_t& pos) {
    std::int32_t c = ch[pos++];
    if (c == kLam) return LambdaTerm::lam(decode(ch, pos));
    if (c == kApp) {
      LambdaTerm f = decode(ch, pos);
      LambdaTerm a = decode(ch, pos);
      return LambdaTerm::app(std::move(f), std::move(a));
    }
    return LambdaTerm::var(static_cast<std::uint32_t>(c));
  }

  bool taut(TypeRef t, const Env* env, int b, const K& k) {
    if (b >= 1) {
      auto m = st_.mark();
      TypeRef p = st_.fresh();
      TypeRef q = st_.fresh();
      if (st_.unify(t, st_.arrow(p, q))) {
        choices_.push_back(kLam);
        Env e{p, env};
        bool ok = taut(q, &e, b - 1, k);
        choices_.pop_back();
        st_.undo(m);
        if (!ok) return false;
      } else {
        st_.undo(m);
      }
    }
    return neutral(t, env, b, k);
  }

  bool neutral(TypeRef t, const Env* env, int b, const K& k) {
    std::int32_t idx = 0;
    for (const Env* e = env; e; e = e->next, ++idx) {
      auto m = st_.mark();
      if (st_.unify(t, e->t)) {
        choices_.push_back(idx);
        bool ok = k(b);
        choices_.pop_back();
        st_.undo(m);
        if (!ok) return false;
      }
    }
    if (b >= 2 && env) {
      auto m = st_.mark();
      TypeRef p = st_.fresh();
      TypeRef f = st_.arrow(p, t);
      choices_.push_back(kApp);
      K arg = [&, p, env](int b2) { return taut(p, env, b2, k); };
      bool ok = neutral(f, env, b - 2, arg);
      choices_.pop_back();
      st_.undo(m);
      return ok;
    }
    return true;
  }

  TypeStore st_;
  std::vector<std::int32_t> choices_;
};

}  // namespace detail

inline std::uint64_t catalan(std::size_t n) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

/// Binary trees with n internal nodes as implicational formulas whose atoms
/// number the leaves 0..n left to right.
template <class F>
void for_each_impl_skeleton(std::size_t n, F&& f) {
  for (const auto& s : detail::impl_shapes(n))
    if (!detail::visit(f, s)) return;
}

/// Set partitions of n elements as restricted-growth strings.
template <class F>
void for_each_set_partition(std::size_t n, F&& f) {
  SetPartition labels(n, 0);
  std::vector<std::uint32_t> rest(n);
  std::iota(rest.begin(), rest.end(), 0U);
  detail::mpart(rest, 0, labels, f);
}

inline std::vector<SetPartition> set_partitions(std::size_t n) {
  std::vector<SetPartition> out;
  for_each_set_partition(n, [&](const SetPartition& p) { out.push_back(p); });
  return out;
}

/// Every implicational formula of size n up to renaming: skeleton-major,
/// then leaf labelings.
template <class F>
void for_each_impl_formula(std::size_t n, F&& f) {
  const auto parts = set_partitions(n + 1);
  for (const auto& s : detail::impl_shapes(n))
    for (const auto& p : parts)
      if (!detail::visit(f, relabel(s, p))) return;
}

/// Right-nested & and v chains with strictly increasing operands, and at
/// most three stacked negations.
inline bool is_canonical_full(const Formula& f) {
  switch (f.op()) {
    case Op::atom:
    case Op::falsum:
      return true;
    case Op::neg: {
      int depth = 0;
      const Formula* cur = &f;
      while (cur->op() == Op::neg) {
        ++depth;
        cur = &cur->arg();
      }
      return depth <= 3 && is_canonical_full(*cur);
    }
    case Op::conj:
    case Op::disj: {
      if (f.lhs().op() == f.op()) return false;
      const Formula& next = f.rhs().op() == f.op() ? f.rhs().lhs() : f.rhs();
      if (!(compare(f.lhs(), next) < 0)) return false;
      return is_canonical_full(f.lhs()) && is_canonical_full(f.rhs());
    }
    default:
      return is_canonical_full(f.lhs()) && is_canonical_full(f.rhs());
  }
}

/// Formulas over ~, &, v, ->, <-> with n internal nodes (negation counts
/// one), up to renaming of atoms.
template <class F>
void for_each_full_formula(std::size_t n, bool canonical, F&& f) {
  std::map<std::uint32_t, std::vector<SetPartition>> parts;
  for (const auto& s : detail::full_shapes(n)) {
    std::uint32_t leaves = detail::leaf_count(s);
    auto it = parts.find(leaves);
    if (it == parts.end()) it = parts.emplace(leaves, set_partitions(leaves)).first;
    for (const auto& p : it->second) {
      Formula g = relabel(s, p);
      if (canonical && !is_canonical_full(g)) continue;
      if (!detail::visit(f, g)) return;
    }
  }
}

/// Nested Horn skeletons of size n, leaves numbered by traversal position.
template <class F>
void for_each_horn_skeleton(std::size_t n, F&& f) {
  for (const auto& h : detail::horn_skeletons(n))
    if (!detail::visit(f, h)) return;
}

/// Sorted nested Horn clauses. Skeleton mode checks sortedness with leaves
/// ordered by position; labeled mode runs each canonical labeling and keeps
/// the labeled trees that are sorted.
template <class F>
void for_each_sorted_horn(std::size_t n, bool labeled, F&& f) {
  const auto& skels = detail::horn_skeletons(n);
  if (!labeled) {
    for (const auto& h : skels)
      if (is_sorted_horn(h) && !detail::visit(f, h)) return;
    return;
  }
  for_each_set_partition(n + 1, [&](const SetPartition& p) {
    for (const auto& h : skels) {
      NestedHorn t = label_leaves(h, p);
      if (is_sorted_horn(t) && !detail::visit(f, t)) return false;
    }
    return true;
  });
}

/// Closed typable beta-normal forms of the given lambda size with their
/// principal types.
template <class F>
void for_each_typed_nf(std::size_t n, F&& f) {
  detail::TypedNfSearch search;
  search.run(static_cast<int>(n), [&](const TypeStore& st, TypeRef root, const std::vector<std::int32_t>& ch) {
    return detail::visit(f, detail::TypedNfSearch::decode(ch), st.to_formula(root));
  });
}

/// The types of for_each_typed_nf, without building terms.
template <class F>
void for_each_impl_tautology(std::size_t n, F&& f) {
  detail::TypedNfSearch search;
  search.run(static_cast<int>(n), [&](const TypeStore& st, TypeRef root, const std::vector<std::int32_t>&) {
    return detail::visit(f, st.to_formula(root));
  });
}

namespace detail {
inline bool horn_provable(const NestedHorn& h) { return prove_horn(h).proved; }
}  // namespace detail

/// Sorted Horn skeletons that no leaf labeling makes provable.
template <class F>
void for_each_uninhabitable_tree(std::size_t n, F&& f) {
  const auto parts = set_partitions(n + 1);
  for (const auto& h : detail::horn_skeletons(n)) {
    if (!is_sorted_horn(h)) continue;
    bool inhabited = false;
    for (const auto& p : parts)
      if (detail::horn_provable(label_leaves(h, p))) {
        inhabited = true;
        break;
      }
    if (!inhabited && !detail::visit(f, h)) return;
  }
}

/// Labelings of n leaves under which no sorted Horn tree of size n-1 is
/// provable.
template <class F>
void for_each_uninhabitable_labeling(std::size_t n, F&& f) {
  if (n == 0) return;
  const auto& skels = detail::horn_skeletons(n - 1);
  for_each_set_partition(n, [&](const SetPartition& p) {
    for (const auto& h : skels) {
      NestedHorn t = label_leaves(h, p);
      if (is_sorted_horn(t) && detail::horn_provable(t)) return true;
    }
    return detail::visit(f, p);
  });
}

enum class Family {
  impl_skeletons,
  partitions,
  impl_all,
  impl_provable,
  impl_taut,
  horn,
  sorted_horn,
  horn3,
  sorted_horn3,
  uninhab_tree,
  uninhab_vars,
  full_all,
  full_canonical,
};

inline const std::vector<Family>& all_families() {
  static const std::vector<Family> v{Family::impl_skeletons, Family::partitions,   Family::impl_all,
                                     Family::impl_provable,  Family::impl_taut,    Family::horn,
                                     Family::sorted_horn,    Family::horn3,        Family::sorted_horn3,
                                     Family::uninhab_tree,   Family::uninhab_vars, Family::full_all,
                                     Family::full_canonical};
  return v;
}

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::impl_skeletons: return "impl-skeletons";
    case Family::partitions: return "partitions";
    case Family::impl_all: return "impl-all";
    case Family::impl_provable: return "impl-provable";
    case Family::impl_taut: return "impl-taut";
    case Family::horn: return "horn";
    case Family::sorted_horn: return "sorted-horn";
    case Family::horn3: return "horn3";
    case Family::sorted_horn3: return "sorted-horn3";
    case Family::uninhab_tree: return "uninhab-tree";
    case Family::uninhab_vars: return "uninhab-vars";
    case Family::full_all: return "full-all";
    case Family::full_canonical: return "full-canonical";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (Family f : all_families())
    if (family_name(f) == name) return f;
  return std::nullopt;
}

/// Maximum nesting depth for the horn3 families.
inline constexpr std::uint32_t kHorn3Depth = 3;

/// Families whose items are formulas (or Horn clauses read as formulas).
inline bool family_has_formulas(Family f) { return f != Family::partitions && f != Family::uninhab_vars; }

/// Items of a family as formulas; Horn families go through from_horn.
template <class F>
void for_each_family_formula(Family fam, std::size_t n, F&& f) {
  auto horn = [&](const NestedHorn& h) { return detail::visit(f, from_horn(h)); };
  switch (fam) {
    case Family::impl_skeletons: return for_each_impl_skeleton(n, f);
    case Family::impl_all: return for_each_impl_formula(n, f);
    case Family::impl_provable:
      return for_each_impl_formula(n, [&](const Formula& g) { return prove_oracle(g).proved ? detail::visit(f, g) : true; });
    case Family::impl_taut: return for_each_impl_tautology(n, f);
    case Family::horn: return for_each_horn_skeleton(n, horn);
    case Family::sorted_horn: return for_each_sorted_horn(n, false, horn);
    case Family::horn3:
      return for_each_horn_skeleton(n, [&](const NestedHorn& h) { return horn_depth(h) <= kHorn3Depth ? horn(h) : true; });
    case Family::sorted_horn3:
      return for_each_sorted_horn(n, false,
                                  [&](const NestedHorn& h) { return horn_depth(h) <= kHorn3Depth ? horn(h) : true; });
    case Family::uninhab_tree: return for_each_uninhabitable_tree(n, horn);
    case Family::full_all: return for_each_full_formula(n, false, f);
    case Family::full_canonical: return for_each_full_formula(n, true, f);
    default: throw std::invalid_argument(std::string(family_name(fam)) + ": items are not formulas");
  }
}

inline std::string partition_text(const SetPartition& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s;
}

/// Items of a family in their display form, one per call.
template <class F>
void for_each_family_line(Family fam, std::size_t n, F&& f) {
  auto horn = [&](const NestedHorn& h) { return detail::visit(f, to_string(h)); };
  switch (fam) {
    case Family::partitions:
      return for_each_set_partition(n, [&](const SetPartition& p) { return detail::visit(f, partition_text(p)); });
    case Family::uninhab_vars:
      return for_each_uninhabitable_labeling(n, [&](const SetPartition& p) { return detail::visit(f, partition_text(p)); });
    case Family::horn: return for_each_horn_skeleton(n, horn);
    case Family::sorted_horn: return for_each_sorted_horn(n, false, horn);
    case Family::horn3:
      return for_each_horn_skeleton(n, [&](const NestedHorn& h) { return horn_depth(h) <= kHorn3Depth ? horn(h) : true; });
    case Family::sorted_horn3:
      return for_each_sorted_horn(n, false,
                                  [&](const NestedHorn& h) { return horn_depth(h) <= kHorn3Depth ? horn(h) : true; });
    case Family::uninhab_tree: return for_each_uninhabitable_tree(n, horn);
    default:
      return for_each_family_formula(fam, n, [&](const Formula& g) { return detail::visit(f, to_string(g)); });
  }
}

struct CountSequence {
  Family family;
  std::vector<std::uint64_t> values;  // values[n] = count at size n
  bool truncated = false;
};

struct CountOptions {
  double seconds = 0;  // wall-clock budget; 0 means none
};

namespace detail {
struct CountTimeout {};
}  // namespace detail

/// Number of items of size n.
inline std::uint64_t count_items(Family fam, std::size_t n,
                                 std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt) {
  std::uint64_t c = 0;
  auto tick = [&](auto&&...) {
    if (deadline && (++c & 1023) == 0 && std::chrono::steady_clock::now() > *deadline) throw detail::CountTimeout{};
    if (!deadline) ++c;
  };
  switch (fam) {
    case Family::impl_skeletons: return catalan(n);
    case Family::horn: return catalan(n);
    case Family::partitions: for_each_set_partition(n, tick); break;
    case Family::uninhab_vars: for_each_uninhabitable_labeling(n, tick); break;
    case Family::horn3:
      for_each_horn_skeleton(n, [&](const NestedHorn& h) {
        if (horn_depth(h) <= kHorn3Depth) tick();
      });
      break;
    case Family::sorted_horn: for_each_sorted_horn(n, false, tick); break;
    case Family::sorted_horn3:
      for_each_sorted_horn(n, false, [&](const NestedHorn& h) {
        if (horn_depth(h) <= kHorn3Depth) tick();
      });
      break;
    case Family::uninhab_tree: for_each_uninhabitable_tree(n, tick); break;
    default: for_each_family_formula(fam, n, tick); break;
  }
  return c;
}

/// Exact counts for sizes 0..max_n. Sizes that do not finish within the
/// budget are dropped and the sequence is marked truncated.
inline CountSequence count_family(Family fam, std::size_t max_n, const CountOptions& opt = {}) {
  CountSequence seq{fam, {}, false};
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (opt.seconds > 0)
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(opt.seconds));
  for (std::size_t n = 0; n <= max_n; ++n) {
    try {
      seq.values.push_back(count_items(fam, n, deadline));
    } catch (const detail::CountTimeout&) {
      seq.truncated = true;
      break;
    }
    if (deadline && std::chrono::steady_clock::now() > *deadline && n < max_n) {
      seq.truncated = true;
      break;
    }
  }
  return seq;
}

}  // namespace ipcheck
