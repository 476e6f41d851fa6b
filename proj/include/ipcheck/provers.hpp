#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <functional>
#include <memory_resource>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "formula.hpp"
#include "horn.hpp"
#include "lambda.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace ipcheck {

/// Raised when a search exceeds its step budget. Distinct from "not proved".
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::uint64_t steps)
      : std::runtime_error("step budget exceeded after " + std::to_string(steps) + " steps"), steps_(steps) {}
  std::uint64_t steps() const { return steps_; }

 private:
  std::uint64_t steps_;
};

struct ProverStats {
  std::uint64_t nodes = 0;
  std::uint32_t max_context_size = 0;  // largest formula ever placed in a context
  // hudelmaier: every context element against the size bound
  std::uint64_t bound_checks = 0;
  std::uint64_t bound_violations = 0;
  std::uint32_t size_bound = 0;
  // horn: clauses added by the nested-implication step must have atomic heads
  std::uint64_t head_checks = 0;
  std::uint64_t head_violations = 0;
};

struct Verdict {
  bool proved = false;
  std::optional<LambdaTerm> proof_term;
  long double proof_term_size = 0;  // set even when the term itself is omitted
  ProverStats stats;
};

enum class ProverId { ljt, merged, horn, headfirst, term, hudelmaier, fullipc, oracle, bad_random, bad_fp };

struct ProveOptions {
  std::uint64_t budget = 200'000'000;
  std::uint64_t seed = 0;  // bad_random only
  long double max_term_size = 1'000'000;  // larger proof terms are not built
};

inline const std::vector<ProverId>& real_provers() {
  static const std::vector<ProverId> ids{ProverId::ljt,  ProverId::merged,     ProverId::horn,    ProverId::headfirst,
                                         ProverId::term, ProverId::hudelmaier, ProverId::fullipc, ProverId::oracle};
  return ids;
}

inline std::string_view prover_name(ProverId id) {
  switch (id) {
    case ProverId::ljt: return "ljt";
    case ProverId::merged: return "merged";
    case ProverId::horn: return "horn";
    case ProverId::headfirst: return "headfirst";
    case ProverId::term: return "term";
    case ProverId::hudelmaier: return "hudelmaier";
    case ProverId::fullipc: return "fullipc";
    case ProverId::oracle: return "oracle";
    case ProverId::bad_random: return "bad-random";
    case ProverId::bad_fp: return "bad-fp";
  }
  return "?";
}

inline std::optional<ProverId> parse_prover(std::string_view name) {
  for (ProverId id : {ProverId::ljt, ProverId::merged, ProverId::horn, ProverId::headfirst, ProverId::term,
                      ProverId::hudelmaier, ProverId::fullipc, ProverId::oracle, ProverId::bad_random, ProverId::bad_fp})
    if (prover_name(id) == name) return id;
  return std::nullopt;
}

/// Provers that accept every connective; the rest need implicational input.
inline bool accepts_full_formulas(ProverId id) { return id == ProverId::fullipc || id == ProverId::oracle; }

namespace detail {

using Ctx = std::vector<const FormulaNode*>;  // back() is the front of the list

inline bool member(const FormulaNode* a, const Ctx& vs) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it)
    if (node_equal(a, *it)) return true;
  return false;
}

inline Ctx without(const Ctx& vs, std::size_t i) {
  Ctx r;
  r.reserve(vs.size() + 3);
  r.insert(r.end(), vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(i));
  r.insert(r.end(), vs.begin() + static_cast<std::ptrdiff_t>(i) + 1, vs.end());
  return r;
}

inline const FormulaNode* spine_head(const FormulaNode* f) {
  while (f->op == Op::imp) f = f->rhs.node();
  return f;
}

inline void require_implicational(const Formula& f, ProverId id) {
  if (!is_implicational(f))
    throw std::invalid_argument(std::string(prover_name(id)) + ": implicational formula expected");
}

class SearchBase {
 public:
  explicit SearchBase(std::uint64_t budget) : budget_(budget) {}
  ProverStats stats;

 protected:
  void step() {
    if (++stats.nodes > budget_) throw BudgetExceeded(stats.nodes);
  }
  void push(Ctx& vs, const FormulaNode* f) {
    stats.max_context_size = std::max(stats.max_context_size, f->size);
    vs.push_back(f);
  }
  const FormulaNode* keep(Formula f) {
    keep_.push_back(std::move(f));
    return keep_.back().node();
  }
  const FormulaNode* make_imp(const FormulaNode* a, const FormulaNode* b) {
    auto [it, fresh] = imps_.try_emplace(PtrPair{a, b}, nullptr);
    if (fresh) it->second = keep(Formula::imp(Formula::from_node(a), Formula::from_node(b)));
    return it->second;
  }

  struct PtrPair {
    const FormulaNode* a;
    const FormulaNode* b;
    bool operator==(const PtrPair&) const = default;
  };
  struct PtrPairHash {
    std::size_t operator()(const PtrPair& p) const {
      return std::hash<const void*>{}(p.a) * 31 + std::hash<const void*>{}(p.b);
    }
  };

  std::uint64_t budget_;
  std::vector<Formula> keep_;
  std::unordered_map<PtrPair, const FormulaNode*, PtrPairHash> imps_;
};

// LJT_1..LJT_4, one clause per rule, committing after each guard.
class Ljt : SearchBase {
 public:
  using SearchBase::SearchBase;
  using SearchBase::stats;

  bool run(const FormulaNode* g, const Ctx& vs) {
    step();
    if (member(g, vs)) return true;
    if (g->op == Op::imp) {
      Ctx v2 = vs;
      push(v2, g->lhs.node());
      return run(g->rhs.node(), v2);
    }
    for (std::size_t i = vs.size(); i-- > 0;) {
      const FormulaNode* e = vs[i];
      if (e->op != Op::imp) continue;
      Ctx v2 = without(vs, i);
      if (member(e->lhs.node(), v2)) {
        push(v2, e->rhs.node());
        return run(g, v2);
      }
    }
    for (std::size_t i = vs.size(); i-- > 0;) {
      const FormulaNode* e = vs[i];
      if (e->op != Op::imp || e->lhs.op() != Op::imp) continue;
      const FormulaNode* cd = e->lhs.node();
      const FormulaNode* b = e->rhs.node();
      Ctx v2 = without(vs, i);
      Ctx v3 = v2;
      push(v3, make_imp(cd->rhs.node(), b));
      if (run(cd, v3)) {
        push(v2, b);
        return run(g, v2);
      }
    }
    return false;
  }
};

// Both reductions from a single scan of the context. With `head_first`, the
// scan only starts once some element's spine head matches the goal, and that
// element is moved to the front.
class Ljb : SearchBase {
 public:
  Ljb(std::uint64_t budget, bool head_first) : SearchBase(budget), head_first_(head_first) {}
  using SearchBase::stats;

  bool run(const FormulaNode* g, const Ctx& vs0) {
    step();
    if (member(g, vs0)) return true;
    if (g->op == Op::imp) {
      Ctx v2 = vs0;
      push(v2, g->lhs.node());
      return run(g->rhs.node(), v2);
    }
    const Ctx* vsp = &vs0;
    Ctx moved;
    if (head_first_) {
      std::size_t j = vs0.size();
      for (std::size_t i = vs0.size(); i-- > 0;)
        if (node_equal(spine_head(vs0[i]), g)) {
          j = i;
          break;
        }
      if (j == vs0.size()) return false;
      moved = without(vs0, j);
      moved.push_back(vs0[j]);
      vsp = &moved;
    }
    const Ctx& vs = *vsp;
    for (std::size_t i = vs.size(); i-- > 0;) {
      const FormulaNode* e = vs[i];
      if (e->op != Op::imp) continue;
      const FormulaNode* a = e->lhs.node();
      const FormulaNode* b = e->rhs.node();
      Ctx v2 = without(vs, i);
      bool ok;
      if (a->op == Op::imp) {
        Ctx v3 = v2;
        push(v3, make_imp(a->rhs.node(), b));
        ok = run(a, v3);
      } else {
        ok = member(a, v2);
      }
      if (ok) {
        push(v2, b);
        return run(g, v2);
      }
    }
    return false;
  }

 private:
  bool head_first_;
};

// Hudelmaier's variant: the nested-implication premise is proved through a
// fresh atom instead of duplicating D.
class Ljnv : SearchBase {
 public:
  Ljnv(std::uint64_t budget, AtomIndex first_fresh, std::uint32_t bound) : SearchBase(budget), next_(first_fresh) {
    stats.size_bound = bound;
  }
  using SearchBase::stats;

  bool run(const FormulaNode* g, const Ctx& vs) {
    step();
    if (member(g, vs)) return true;
    if (g->op == Op::imp) {
      Ctx v2 = vs;
      add(v2, g->lhs.node());
      return run(g->rhs.node(), v2);
    }
    for (std::size_t i = vs.size(); i-- > 0;) {
      const FormulaNode* e = vs[i];
      if (e->op != Op::imp) continue;
      const FormulaNode* a = e->lhs.node();
      const FormulaNode* b = e->rhs.node();
      Ctx v2 = without(vs, i);
      bool ok;
      if (a->op == Op::imp) {
        AtomIndex saved = next_;
        const FormulaNode* p = fresh_atom();
        Ctx v3 = v2;
        add(v3, make_imp(p, b));
        add(v3, make_imp(a->rhs.node(), p));
        add(v3, a->lhs.node());
        ok = run(p, v3);
        next_ = saved;
      } else {
        ok = member(a, v2);
      }
      if (ok) {
        add(v2, b);
        return run(g, v2);
      }
    }
    return false;
  }

 private:
  void add(Ctx& vs, const FormulaNode* f) {
    ++stats.bound_checks;
    if (f->size > stats.size_bound) ++stats.bound_violations;
    push(vs, f);
  }
  const FormulaNode* fresh_atom() {
    AtomIndex i = next_++;
    auto& slot = fresh_[i];
    if (!slot) slot = keep(Formula::atom(i));
    return slot;
  }
  AtomIndex next_;
  std::unordered_map<AtomIndex, const FormulaNode*> fresh_;
};

// Proof-term extraction. Terms use named variables while searching and are
// converted to de Bruijn form at the end.
class Ljs : SearchBase {
 public:
  using SearchBase::SearchBase;
  using SearchBase::stats;

  struct Entry {
    int term;
    const FormulaNode* type;
  };
  using SCtx = std::vector<Entry>;

  std::optional<int> run(const FormulaNode* g, const SCtx& vs) {
    std::size_t mark = pool_.size();
    auto r = search(g, vs);
    if (!r) pool_.resize(mark);
    return r;
  }

  std::optional<int> search(const FormulaNode* g, const SCtx& vs) {
    step();
    for (auto it = vs.rbegin(); it != vs.rend(); ++it)
      if (node_equal(it->type, g)) return it->term;
    if (g->op == Op::imp) {
      int x = fresh_var();
      SCtx v2 = vs;
      add(v2, var(x), g->lhs.node());
      auto e = run(g->rhs.node(), v2);
      if (!e) return std::nullopt;
      return lam(x, *e);
    }
    bool guard = false;
    for (const auto& en : vs)
      if (node_equal(spine_head(en.type), g)) {
        guard = true;
        break;
      }
    if (!guard) return std::nullopt;
    for (std::size_t i = vs.size(); i-- > 0;) {
      const Entry s = vs[i];
      if (s.type->op != Op::imp) continue;
      const FormulaNode* a = s.type->lhs.node();
      const FormulaNode* b = s.type->rhs.node();
      SCtx v2 = vs;
      v2.erase(v2.begin() + static_cast<std::ptrdiff_t>(i));
      std::optional<int> t;
      if (a->op == Op::imp) {
        // x : D->B stands for \d. s (\c. d)
        std::size_t mark = pool_.size();
        int x = fresh_var();
        SCtx v3 = v2;
        add(v3, var(x), make_imp(a->rhs.node(), b));
        auto e = run(a, v3);
        if (!e) pool_.resize(mark);
        if (e) {
          int d = fresh_var(), c = fresh_var();
          int witness = lam(d, app(s.term, lam(c, var(d))));
          t = app(lam(x, *e), witness);
        }
      } else {
        for (auto it = v2.rbegin(); it != v2.rend(); ++it)
          if (node_equal(it->type, a)) {
            t = it->term;
            break;
          }
      }
      if (t) {
        add(v2, app(s.term, *t), b);
        return run(g, v2);
      }
    }
    return std::nullopt;
  }

  // Size of the term once shared subterms are unfolded.
  long double tree_size(int t) const {
    std::vector<long double> memo(pool_.size(), -1);
    std::function<long double(int)> go = [&](int u) -> long double {
      auto& m = memo[static_cast<std::size_t>(u)];
      if (m >= 0) return m;
      const PNode& n = pool_[static_cast<std::size_t>(u)];
      long double r = 1;
      if (n.kind != LambdaTerm::Kind::var) r += go(n.a);
      if (n.kind == LambdaTerm::Kind::app) r += go(n.b);
      return m = r;
    };
    return go(t);
  }

  LambdaTerm to_lambda(int t) const {
    std::vector<int> env;
    return convert(t, env);
  }

 private:
  struct PNode {
    LambdaTerm::Kind kind;
    int var;
    int a;
    int b;
  };

  int fresh_var() { return next_var_++; }
  int var(int x) { return node({LambdaTerm::Kind::var, x, -1, -1}); }
  int lam(int x, int body) { return node({LambdaTerm::Kind::lam, x, body, -1}); }
  int app(int f, int a) { return node({LambdaTerm::Kind::app, 0, f, a}); }
  int node(PNode n) {
    pool_.push_back(n);
    return static_cast<int>(pool_.size() - 1);
  }
  void add(SCtx& vs, int term, const FormulaNode* type) {
    stats.max_context_size = std::max(stats.max_context_size, type->size);
    vs.push_back({term, type});
  }

  LambdaTerm convert(int t, std::vector<int>& env) const {
    const PNode& n = pool_[static_cast<std::size_t>(t)];
    switch (n.kind) {
      case LambdaTerm::Kind::var:
        for (std::size_t i = env.size(); i-- > 0;)
          if (env[i] == n.var) return LambdaTerm::var(static_cast<std::uint32_t>(env.size() - 1 - i));
        throw std::logic_error("proof term: unbound variable");
      case LambdaTerm::Kind::lam: {
        env.push_back(n.var);
        LambdaTerm body = convert(n.a, env);
        env.pop_back();
        return LambdaTerm::lam(std::move(body));
      }
      case LambdaTerm::Kind::app:
        return LambdaTerm::app(convert(n.a, env), convert(n.b, env));
    }
    throw std::logic_error("proof term: bad node");
  }

  std::vector<PNode> pool_;
  int next_var_ = 0;
};

// Nested Horn clauses in a per-call arena.
struct HNode {
  AtomIndex head;
  std::uint32_t n;
  const HNode* const* body;
  std::size_t hash;
  std::uint32_t size;
};

inline bool hnode_equal(const HNode* a, const HNode* b) {
  if (a == b) return true;
  if (a->hash != b->hash || a->head != b->head || a->n != b->n) return false;
  for (std::uint32_t i = 0; i < a->n; ++i)
    if (!hnode_equal(a->body[i], b->body[i])) return false;
  return true;
}

class Ljh {
 public:
  using HCtx = std::vector<const HNode*>;

  explicit Ljh(std::uint64_t budget) : budget_(budget), arena_(buffer_, sizeof(buffer_)) {}
  ProverStats stats;

  const HNode* make(AtomIndex head, const HNode* const* body, std::uint32_t n) {
    auto* nodes = n ? static_cast<const HNode**>(arena_.allocate(sizeof(const HNode*) * n, alignof(const HNode*)))
                    : nullptr;
    std::size_t h = hash_mix(0x2545f491, head);
    std::uint32_t size = n;
    for (std::uint32_t i = 0; i < n; ++i) {
      nodes[i] = body[i];
      h = hash_mix(h, body[i]->hash);
      size += body[i]->size;
    }
    auto* node = static_cast<HNode*>(arena_.allocate(sizeof(HNode), alignof(HNode)));
    *node = HNode{head, n, nodes, h, size};
    return node;
  }

  // b1->...->bn->h read directly as a clause
  const HNode* from(const FormulaNode* f) {
    const HNode* body[64];
    std::vector<const HNode*> big;
    std::uint32_t n = 0;
    while (f->op == Op::imp) {
      const HNode* b = from(f->lhs.node());
      if (n < 64) {
        body[n] = b;
      } else {
        if (big.empty()) big.assign(body, body + 64);
        big.push_back(b);
      }
      ++n;
      f = f->rhs.node();
    }
    AtomIndex head = f->op == Op::falsum ? kFalsumAtom : f->atom;
    if (n == 0) return atom(head);
    return make(head, big.empty() ? body : big.data(), n);
  }

  const HNode* from(const NestedHorn& h) {
    std::vector<const HNode*> body;
    body.reserve(h.body().size());
    for (const auto& b : h.body()) body.push_back(from(b));
    return make(h.head(), body.data(), static_cast<std::uint32_t>(body.size()));
  }

  bool run(const HNode* g, const HCtx& vs) {
    if (++stats.nodes > budget_) throw BudgetExceeded(stats.nodes);
    if (member(g, vs)) return true;
    if (g->n > 0) {
      HCtx v2 = vs;
      for (std::uint32_t i = g->n; i-- > 0;) push(v2, g->body[i]);
      return run(atom(g->head), v2);
    }
    bool guard = false;
    for (const HNode* e : vs)
      if (e->n > 0 && e->head == g->head) {
        guard = true;
        break;
      }
    if (!guard) return false;
    for (std::size_t i = vs.size(); i-- > 0;) {
      const HNode* e = vs[i];
      if (e->n == 0) continue;
      HCtx v2 = without(vs, i);
      for (std::uint32_t j = 0; j < e->n; ++j) {
        const HNode* a = e->body[j];
        bool ok;
        if (a->n > 0) {
          ++stats.head_checks;
          const HNode* d = atom(a->head);
          if (d->n != 0) ++stats.head_violations;
          const HNode* bd = make(e->head, &d, 1);
          HCtx v3 = v2;
          push(v3, bd);
          ok = run(a, v3);
        } else {
          ok = member(a, v2);
        }
        if (ok) {
          push(v2, without_body(e, j));
          return run(g, v2);
        }
      }
    }
    return false;
  }

 private:
  static std::size_t hash_mix(std::size_t h, std::size_t v) { return detail::hash_mix(h, v); }
  static bool member(const HNode* a, const HCtx& vs) {
    for (auto it = vs.rbegin(); it != vs.rend(); ++it)
      if (hnode_equal(a, *it)) return true;
    return false;
  }
  static HCtx without(const HCtx& vs, std::size_t i) {
    HCtx r;
    r.reserve(vs.size() + 2);
    r.insert(r.end(), vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(i));
    r.insert(r.end(), vs.begin() + static_cast<std::ptrdiff_t>(i) + 1, vs.end());
    return r;
  }
  void push(HCtx& vs, const HNode* h) {
    stats.max_context_size = std::max(stats.max_context_size, h->size);
    vs.push_back(h);
  }
  const HNode* without_body(const HNode* e, std::uint32_t j) {
    if (e->n == 1) return atom(e->head);
    auto* nodes = static_cast<const HNode**>(arena_.allocate(sizeof(const HNode*) * (e->n - 1), alignof(const HNode*)));
    std::size_t h = hash_mix(0x2545f491, e->head);
    std::uint32_t size = e->n - 1;
    for (std::uint32_t k = 0, o = 0; k < e->n; ++k) {
      if (k == j) continue;
      nodes[o++] = e->body[k];
      h = hash_mix(h, e->body[k]->hash);
      size += e->body[k]->size;
    }
    auto* node = static_cast<HNode*>(arena_.allocate(sizeof(HNode), alignof(HNode)));
    *node = HNode{e->head, e->n - 1, nodes, h, size};
    return node;
  }
  const HNode* atom(AtomIndex a) {
    if (a < atoms_.size() && atoms_[a]) return atoms_[a];
    const HNode* node = make(a, nullptr, 0);
    if (a < 4096) {
      if (atoms_.size() <= a) atoms_.resize(a + 1, nullptr);
      atoms_[a] = node;
    }
    return node;
  }

  std::uint64_t budget_;
  alignas(std::max_align_t) unsigned char buffer_[4096];
  std::pmr::monotonic_buffer_resource arena_;
  std::vector<const HNode*> atoms_;
};

// Full IPC: LJT/G4ip with the extra rules for <->.
class Ljfa : SearchBase {
 public:
  using SearchBase::SearchBase;
  using SearchBase::stats;

  bool run(const FormulaNode* g, const Ctx& vs) {
    step();
    if (member(g, vs)) return true;
    for (const FormulaNode* e : vs)
      if (e->op == Op::falsum) return true;
    switch (g->op) {
      case Op::iff: {
        Ctx a = vs;
        push(a, g->lhs.node());
        if (!run(g->rhs.node(), a)) return false;
        Ctx b = vs;
        push(b, g->rhs.node());
        return run(g->lhs.node(), b);
      }
      case Op::imp: {
        Ctx a = vs;
        push(a, g->lhs.node());
        return run(g->rhs.node(), a);
      }
      case Op::conj:
        return run(g->lhs.node(), vs) && run(g->rhs.node(), vs);
      default:
        break;
    }
    for (std::size_t i = vs.size(); i-- > 0;) {
      Ctx v2 = without(vs, i);
      if (reduce(vs[i], g, v2)) return run(g, v2);
    }
    if (g->op == Op::disj) return run(g->lhs.node(), vs) || run(g->rhs.node(), vs);
    return false;
  }

 private:
  // On success `vs` holds the rewritten context.
  bool reduce(const FormulaNode* red, const FormulaNode* g, Ctx& vs) {
    const FormulaNode* a = red->lhs.node();
    const FormulaNode* b = red->rhs.node();
    switch (red->op) {
      case Op::imp:
        return reduce_imp(a, b, vs);
      case Op::conj:
        push(vs, b);
        push(vs, a);
        return true;
      case Op::iff: {
        const FormulaNode* ab = make_imp(a, b);
        const FormulaNode* ba = make_imp(b, a);
        push(vs, ba);
        push(vs, ab);
        return true;
      }
      case Op::disj: {
        Ctx side = vs;
        push(side, a);
        if (!run(g, side)) return false;
        push(vs, b);
        return true;
      }
      default:
        return false;
    }
  }

  bool reduce_imp(const FormulaNode* a, const FormulaNode* b, Ctx& vs) {
    const FormulaNode* c = a->lhs.node();
    const FormulaNode* d = a->rhs.node();
    switch (a->op) {
      case Op::imp: {
        Ctx side = vs;
        push(side, make_imp(d, b));
        if (!run(a, side)) return false;
        push(vs, b);
        return true;
      }
      case Op::conj:
        push(vs, make_imp(c, make_imp(d, b)));
        return true;
      case Op::disj: {
        const FormulaNode* cb = make_imp(c, b);
        const FormulaNode* db = make_imp(d, b);
        push(vs, db);
        push(vs, cb);
        return true;
      }
      case Op::iff:
        push(vs, make_imp(make_imp(c, d), make_imp(make_imp(d, c), b)));
        return true;
      default:
        if (!member(a, vs)) return false;
        push(vs, b);
        return true;
    }
  }
};

// Reference decision procedure: LJ with sets as contexts, invertible rules
// applied eagerly, and a loop check on the current branch.
class Oracle {
 public:
  Oracle(const Formula& goal, std::uint64_t budget) : budget_(budget) {
    root_ = intern(goal);
    words_ = (forms_.size() + 63) / 64;
  }

  ProverStats stats;

  bool run() {
    Set empty(words_, 0);
    return prove(std::move(empty), root_, 0).ok;
  }

 private:
  using Set = std::vector<std::uint64_t>;
  struct Item {
    Op op;
    AtomIndex atom;
    int l = -1;
    int r = -1;
    int lr = -1;  // l -> r, for <->
    int rl = -1;  // r -> l
    std::uint32_t size;
  };
  struct Result {
    bool ok;
    int low;
  };
  struct KeyHash {
    std::size_t operator()(const std::pair<Set, int>& k) const {
      std::size_t h = static_cast<std::size_t>(k.second) * 0x9e3779b97f4a7c15ULL;
      for (auto w : k.first) h = detail::hash_mix(h, static_cast<std::size_t>(w));
      return h;
    }
  };

  int intern(const Formula& f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    Item item{f.op(), f.op() == Op::atom ? f.atom_index() : 0, -1, -1, -1, -1, f.size()};
    if (f.op() == Op::neg) {
      item.op = Op::imp;
      item.l = intern(f.arg());
      item.r = intern(Formula::falsum());
    } else if (is_binary(f.op())) {
      item.l = intern(f.lhs());
      item.r = intern(f.rhs());
      if (f.op() == Op::iff) {
        item.lr = intern(Formula::imp(f.lhs(), f.rhs()));
        item.rl = intern(Formula::imp(f.rhs(), f.lhs()));
      }
    }
    forms_.push_back(item);
    int id = static_cast<int>(forms_.size() - 1);
    index_.emplace(f, id);
    if (item.op == Op::falsum) falsum_ = id;
    return id;
  }

  static bool has(const Set& s, int i) { return (s[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1U; }
  static void put(Set& s, int i) { s[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63); }

  void saturate(Set& s) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < static_cast<int>(forms_.size()); ++i) {
        if (!has(s, i)) continue;
        const Item& it = forms_[static_cast<std::size_t>(i)];
        auto add = [&](int j) {
          if (!has(s, j)) {
            put(s, j);
            changed = true;
          }
        };
        switch (it.op) {
          case Op::conj:
            add(it.l);
            add(it.r);
            break;
          case Op::iff:
            add(it.lr);
            add(it.rl);
            break;
          case Op::imp:
            if (has(s, it.l)) add(it.r);
            break;
          default:
            break;
        }
      }
    }
  }

  Result prove(Set s, int g, int depth) {
    if (++stats.nodes > budget_) throw BudgetExceeded(stats.nodes);
    saturate(s);
    if (has(s, g) || (falsum_ >= 0 && has(s, falsum_))) return {true, INT_MAX};
    std::pair<Set, int> key{std::move(s), g};
    if (proved_.count(key)) return {true, INT_MAX};
    if (failed_.count(key)) return {false, INT_MAX};
    if (auto it = path_.find(key); it != path_.end()) return {false, it->second};
    path_.emplace(key, depth);
    Result r = expand(key.first, g, depth);
    path_.erase(key);
    if (r.ok) {
      proved_.insert(std::move(key));
      r.low = INT_MAX;
    } else if (r.low >= depth) {
      failed_.insert(std::move(key));
      r.low = INT_MAX;
    }
    return r;
  }

  Result expand(const Set& s, int g, int depth) {
    const Item& gi = forms_[static_cast<std::size_t>(g)];
    int low = INT_MAX;
    auto sub = [&](int goal, int extra) {
      Set t = s;
      if (extra >= 0) put(t, extra);
      Result r = prove(std::move(t), goal, depth + 1);
      low = std::min(low, r.low);
      return r.ok;
    };
    switch (gi.op) {
      case Op::imp:
        return {sub(gi.r, gi.l), low};
      case Op::conj: {
        bool ok = sub(gi.l, -1) && sub(gi.r, -1);
        return {ok, low};
      }
      case Op::iff: {
        bool ok = sub(gi.r, gi.l) && sub(gi.l, gi.r);
        return {ok, low};
      }
      default:
        break;
    }
    for (int i = 0; i < static_cast<int>(forms_.size()); ++i) {
      const Item& it = forms_[static_cast<std::size_t>(i)];
      if (it.op == Op::disj && has(s, i) && !has(s, it.l) && !has(s, it.r)) {
        bool ok = sub(g, it.l) && sub(g, it.r);
        return {ok, low};
      }
    }
    if (gi.op == Op::disj) {
      if (sub(gi.l, -1) || sub(gi.r, -1)) return {true, INT_MAX};
    }
    for (int i = 0; i < static_cast<int>(forms_.size()); ++i) {
      const Item& it = forms_[static_cast<std::size_t>(i)];
      if (it.op != Op::imp || !has(s, i) || has(s, it.r)) continue;
      if (sub(it.l, -1) && sub(g, it.r)) return {true, INT_MAX};
    }
    return {false, low};
  }

  std::uint64_t budget_;
  std::vector<Item> forms_;
  std::unordered_map<Formula, int> index_;
  int root_ = -1;
  int falsum_ = -1;
  std::size_t words_ = 1;
  std::unordered_set<std::pair<Set, int>, KeyHash> proved_;
  std::unordered_set<std::pair<Set, int>, KeyHash> failed_;
  std::unordered_map<std::pair<Set, int>, int, KeyHash> path_;
};

// Complete but unsound: "all premises provable" with success on an empty
// context.
class BadSolve : SearchBase {
 public:
  using SearchBase::SearchBase;
  using SearchBase::stats;

  bool solve(const FormulaNode* a, const Ctx& vs) {
    step();
    if (a->op != Op::imp) return member(a, vs);
    Ctx v2 = vs;
    push(v2, a->lhs.node());
    if (solve(a->rhs.node(), v2)) return true;
    return reduce(vs);
  }

  bool reduce(const Ctx& vs) {
    step();
    if (vs.empty()) return true;
    for (std::size_t i = vs.size(); i-- > 0;) {
      Ctx rest = without(vs, i);
      if (solve(vs[i], rest) && reduce(rest)) return true;
    }
    return false;
  }
};

inline std::uint32_t max_antecedent_size(const Formula& f) {
  std::uint32_t m = 0;
  const Formula* cur = &f;
  while (cur->op() == Op::imp) {
    m = std::max({m, cur->lhs().size(), max_antecedent_size(cur->lhs())});
    cur = &cur->rhs();
  }
  return m;
}

}  // namespace detail

inline Verdict prove_ljt(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::ljt);
  detail::Ljt p(opt.budget);
  Verdict v;
  v.proved = p.run(f.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_merged(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::merged);
  detail::Ljb p(opt.budget, false);
  Verdict v;
  v.proved = p.run(f.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_headfirst(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::headfirst);
  detail::Ljb p(opt.budget, true);
  Verdict v;
  v.proved = p.run(f.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_horn(const NestedHorn& h, const ProveOptions& opt = {}) {
  detail::Ljh p(opt.budget);
  Verdict v;
  v.proved = p.run(p.from(h), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_horn(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::horn);
  detail::Ljh p(opt.budget);
  Verdict v;
  v.proved = p.run(p.from(f.node()), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_with_term(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::term);
  detail::Ljs p(opt.budget);
  Verdict v;
  auto t = p.run(f.node(), {});
  v.proved = t.has_value();
  if (t) {
    v.proof_term_size = p.tree_size(*t);
    if (v.proof_term_size <= opt.max_term_size) v.proof_term = p.to_lambda(*t);
  }
  v.stats = p.stats;
  return v;
}

inline Verdict prove_hudelmaier(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::hudelmaier);
  auto m = max_atom(f);
  AtomIndex first = m ? *m + 1 : 0;
  detail::Ljnv p(opt.budget, first, detail::max_antecedent_size(f) + 2);
  Verdict v;
  v.proved = p.run(f.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_full_ipc(const Formula& f, const ProveOptions& opt = {}) {
  Formula g = negation_normalize(f);
  detail::Ljfa p(opt.budget);
  Verdict v;
  v.proved = p.run(g.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove_oracle(const Formula& f, const ProveOptions& opt = {}) {
  detail::Oracle p(negation_normalize(f), opt.budget);
  Verdict v;
  v.proved = p.run();
  v.stats = p.stats;
  return v;
}

/// A coin flip per formula, reproducible from (seed, formula).
inline Verdict bad_prover_random(const Formula& f, std::uint64_t seed = 0) {
  Verdict v;
  v.proved = (Rng::mix(seed ^ Rng::mix(static_cast<std::uint64_t>(f.hash()))) >> 63) != 0;
  return v;
}

inline Verdict bad_prover_fp(const Formula& f, const ProveOptions& opt = {}) {
  detail::require_implicational(f, ProverId::bad_fp);
  detail::BadSolve p(opt.budget);
  Verdict v;
  v.proved = p.solve(f.node(), {});
  v.stats = p.stats;
  return v;
}

inline Verdict prove(ProverId id, const Formula& f, const ProveOptions& opt = {}) {
  switch (id) {
    case ProverId::ljt: return prove_ljt(f, opt);
    case ProverId::merged: return prove_merged(f, opt);
    case ProverId::horn: return prove_horn(f, opt);
    case ProverId::headfirst: return prove_headfirst(f, opt);
    case ProverId::term: return prove_with_term(f, opt);
    case ProverId::hudelmaier: return prove_hudelmaier(f, opt);
    case ProverId::fullipc: return prove_full_ipc(f, opt);
    case ProverId::oracle: return prove_oracle(f, opt);
    case ProverId::bad_random: return bad_prover_random(f, opt.seed);
    case ProverId::bad_fp: return bad_prover_fp(f, opt);
  }
  throw std::invalid_argument("unknown prover");
}

}  // namespace ipcheck
