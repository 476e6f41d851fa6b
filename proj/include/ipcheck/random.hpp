#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bigcount.hpp"
#include "exhaustive.hpp"
#include "formula.hpp"
#include "lambda.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace ipcheck {

/// A rejection sampler ran out of attempts.
class RetryBudgetExhausted : public std::runtime_error {
 public:
  RetryBudgetExhausted(const std::string& what, std::uint64_t attempts)
      : std::runtime_error(what + ": no acceptable sample after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}
  std::uint64_t attempts() const { return attempts_; }

 private:
  std::uint64_t attempts_;
};

inline constexpr std::uint64_t kDefaultRetries = 1'000'000;

/// Knuth's Algorithm R: links of a uniform binary tree with n internal
/// nodes. Internal node 2k-1 has children links[2k-1] and links[2k]; even
/// indices are leaves; links[0] is the root.
inline std::vector<std::uint32_t> remy_links(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> l(2 * n + 1, 0);
  for (std::uint32_t m = 0; m < n;) {
    std::uint64_t x = rng.below(4 * std::uint64_t{m} + 2);
    ++m;
    std::uint32_t b = static_cast<std::uint32_t>(x & 1U);
    std::uint32_t k = static_cast<std::uint32_t>(x >> 1);
    l[2 * m - b] = 2 * m;
    l[2 * m - 1 + b] = l[k];
    l[k] = 2 * m - 1;
  }
  return l;
}

namespace detail {

template <class Leaf, class Node>
auto build_remy(const std::vector<std::uint32_t>& l, Leaf&& leaf, Node&& node) {
  // iterative post-order so deep trees do not exhaust the stack
  using T = decltype(leaf());
  std::vector<T> values;
  struct Frame {
    std::uint32_t v;
    bool expanded;
  };
  std::vector<Frame> stack{{l[0], false}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.v % 2 == 0) {
      values.push_back(leaf());
    } else if (!f.expanded) {
      stack.push_back({f.v, true});
      stack.push_back({l[f.v + 1], false});
      stack.push_back({l[f.v], false});
    } else {
      T r = std::move(values.back());
      values.pop_back();
      T lft = std::move(values.back());
      values.pop_back();
      values.push_back(node(std::move(lft), std::move(r)));
    }
  }
  return std::move(values.back());
}

}  // namespace detail

/// Uniform binary tree with n internal nodes, as an implication whose
/// leaves are numbered 0..n left to right.
inline Formula remy_tree(std::size_t n, Rng& rng) {
  auto l = remy_links(n, rng);
  AtomIndex next = 0;
  return detail::build_remy(
      l, [&] { return Formula::atom(next++); }, [](Formula a, Formula b) { return Formula::imp(std::move(a), std::move(b)); });
}

/// Exactly uniform set partition of n elements as a restricted-growth
/// string. The block count k is drawn with weight S(n,k); then, from the
/// last element down, element r opens the newest block with weight
/// S(r-1,k-1) or joins one of the k blocks with weight S(r-1,k) each.
inline SetPartition random_set_partition(std::size_t n, Rng& rng, const BigCountTable& table = shared_count_table()) {
  if (n == 0) return {};
  SetPartition labels(n, 0);
  std::vector<BigInt> top_copy;
  const std::vector<BigInt>* top = table.stored_row(n);
  if (!top) {
    top_copy = table.row(n);
    top = &top_copy;
  }
  BigInt bell = 0;
  for (const auto& v : *top) bell += v;
  BigInt x = rng.below(bell);
  std::size_t k = 0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (x < (*top)[j]) {
      k = j;
      break;
    }
    x -= (*top)[j];
  }
  // rows are visited from n-1 down to 0, one segment at a time past the
  // fully stored range
  std::vector<std::vector<BigInt>> segment;
  std::size_t seg_lo = n;  // segment covers rows [seg_lo, seg_lo + size)
  auto row_at = [&](std::size_t r) -> const std::vector<BigInt>& {
    if (const auto* s = table.stored_row(r)) return *s;
    if (r < seg_lo || r >= seg_lo + segment.size()) {
      std::size_t lo = r >= 32 ? r - 31 : 0;
      lo = std::max(lo, table.full_rows() + 1);
      segment = table.rows(lo, r);
      seg_lo = lo;
    }
    return segment[r - seg_lo];
  };
  BigInt weight = (*top)[k];  // S(r, k) for the current r
  for (std::size_t r = n; r >= 1; --r) {
    const std::vector<BigInt>& prev = row_at(r - 1);
    BigInt y = rng.below(weight);
    const BigInt& open = prev[k - 1];
    if (y < open) {
      labels[r - 1] = static_cast<AtomIndex>(k - 1);
      --k;
    } else {
      BigInt j = (y - open) / prev[k];
      labels[r - 1] = static_cast<AtomIndex>(j);
    }
    weight = prev[k];
  }
  return labels;
}

/// Uniform over (shape, labeling) pairs of size n.
inline Formula random_impl_formula(std::size_t n, Rng& rng) {
  Formula shape = remy_tree(n, rng);
  SetPartition p = random_set_partition(n + 1, rng);
  return relabel(shape, p);
}

/// Uniform SK tree with n internal nodes.
inline SKTree random_sk_tree(std::size_t n, Rng& rng) {
  auto l = remy_links(n, rng);
  return detail::build_remy(
      l, [&] { return rng.coin() ? SKTree::s() : SKTree::k(); },
      [](SKTree a, SKTree b) { return SKTree::apply(std::move(a), std::move(b)); });
}

/// Type of a random typable SK tree with n internal nodes whose type has at
/// least m connectives.
inline Formula random_sk_tautology(std::size_t n, std::size_t m, Rng& rng, std::uint64_t retries = kDefaultRetries) {
  for (std::uint64_t attempt = 1; attempt <= retries; ++attempt) {
    SKTree t = random_sk_tree(n, rng);
    auto ty = type_of_sk(t);
    if (ty && ty->size() >= m) return *ty;
  }
  throw RetryBudgetExhausted("random_sk_tautology", retries);
}

/// Counts of beta-normal forms by size with k variables in scope.
class NormalFormCounts {
 public:
  explicit NormalFormCounts(std::size_t max_size) : max_(max_size), kmax_(max_size + 2) {
    n_.assign((kmax_ + 1) * (max_ + 1), 0.0L);
    m_.assign((kmax_ + 1) * (max_ + 1), 0.0L);
    for (std::size_t s = 0; s <= max_; ++s)
      for (std::size_t k = 0; k <= kmax_; ++k) {
        long double mv = 0;
        if (s == 0) {
          mv = static_cast<long double>(k);
        } else if (s >= 2) {
          for (std::size_t a = 0; a + 2 <= s; ++a) mv += neutral(k, a) * all(k, s - 2 - a);
        }
        m_[at(k, s)] = mv;
        long double nv = mv;
        if (s >= 1 && k + 1 <= kmax_) nv += all(k + 1, s - 1);
        n_[at(k, s)] = nv;
      }
  }

  std::size_t max_size() const { return max_; }
  long double all(std::size_t k, std::size_t s) const { return k > kmax_ ? 0.0L : n_[at(k, s)]; }
  long double neutral(std::size_t k, std::size_t s) const { return k > kmax_ ? 0.0L : m_[at(k, s)]; }

 private:
  std::size_t at(std::size_t k, std::size_t s) const { return k * (max_ + 1) + s; }
  std::size_t max_;
  std::size_t kmax_;
  std::vector<long double> n_;
  std::vector<long double> m_;
};

namespace detail {

inline long double unit(Rng& rng) { return static_cast<long double>(rng.next() >> 11) * 0x1.0p-53L; }

class TypedNfSampler {
 public:
  TypedNfSampler(const NormalFormCounts& counts, Rng& rng) : c_(counts), rng_(rng) {}

  std::optional<std::pair<LambdaTerm, Formula>> sample(std::size_t size) {
    TypeStore st;
    st_ = &st;
    env_.clear();
    TypeRef root = st.fresh();
    auto t = term(root, size);
    if (!t) return std::nullopt;
    return std::make_pair(std::move(*t), st.to_formula(root));
  }

 private:
  std::optional<LambdaTerm> term(TypeRef t, std::size_t s) {
    std::size_t k = env_.size();
    long double total = c_.all(k, s);
    long double lam = s >= 1 ? c_.all(k + 1, s - 1) : 0.0L;
    if (unit(rng_) * total < lam) {
      TypeRef p = st_->fresh();
      TypeRef q = st_->fresh();
      if (!st_->unify(t, st_->arrow(p, q))) return std::nullopt;
      env_.push_back(p);
      auto body = term(q, s - 1);
      env_.pop_back();
      if (!body) return std::nullopt;
      return LambdaTerm::lam(std::move(*body));
    }
    return neutral(t, s);
  }

  std::optional<LambdaTerm> neutral(TypeRef t, std::size_t s) {
    std::size_t k = env_.size();
    if (s == 0) {
      if (k == 0) return std::nullopt;
      std::uint32_t idx = static_cast<std::uint32_t>(rng_.below(k));
      if (!st_->unify(t, env_[k - 1 - idx])) return std::nullopt;
      return LambdaTerm::var(idx);
    }
    if (s < 2) return std::nullopt;
    long double total = c_.neutral(k, s);
    long double u = unit(rng_) * total;
    std::size_t a = 0;
    for (; a + 2 < s; ++a) {
      long double w = c_.neutral(k, a) * c_.all(k, s - 2 - a);
      if (u < w) break;
      u -= w;
    }
    TypeRef p = st_->fresh();
    auto f = neutral(st_->arrow(p, t), a);
    if (!f) return std::nullopt;
    auto x = term(p, s - 2 - a);
    if (!x) return std::nullopt;
    return LambdaTerm::app(std::move(*f), std::move(*x));
  }

  const NormalFormCounts& c_;
  Rng& rng_;
  TypeStore* st_ = nullptr;
  std::vector<TypeRef> env_;
};

}  // namespace detail

/// Closed typable normal form with size in [0.9*target, 1.1*target], with
/// its principal type. Uniform among such terms: a size is drawn in
/// proportion to the number of closed normal forms, then a term of that
/// size uniformly, and untypable draws are rejected.
inline std::pair<LambdaTerm, Formula> random_typed_nf(std::size_t target, Rng& rng,
                                                      std::uint64_t retries = kDefaultRetries) {
  if (target == 0) throw std::invalid_argument("random_typed_nf: target must be positive");
  std::size_t lo = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(target) - 1e-9));
  std::size_t hi = static_cast<std::size_t>(std::floor(1.1 * static_cast<double>(target) + 1e-9));
  lo = std::max<std::size_t>(lo, 1);
  NormalFormCounts counts(hi);
  long double total = 0;
  for (std::size_t s = lo; s <= hi; ++s) total += counts.all(0, s);
  if (total <= 0) throw std::invalid_argument("random_typed_nf: no closed normal forms in the size window");
  detail::TypedNfSampler sampler(counts, rng);
  for (std::uint64_t attempt = 1; attempt <= retries; ++attempt) {
    long double u = detail::unit(rng) * total;
    std::size_t s = lo;
    for (; s < hi; ++s) {
      long double w = counts.all(0, s);
      if (u < w) break;
      u -= w;
    }
    if (auto r = sampler.sample(s)) return std::move(*r);
  }
  throw RetryBudgetExhausted("random_typed_nf", retries);
}

}  // namespace ipcheck
