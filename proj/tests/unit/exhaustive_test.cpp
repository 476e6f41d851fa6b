#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"

using namespace ipcheck;

TEST(Exhaustive, SkeletonCountsAreCatalan) {
  for (std::size_t n = 0; n <= 9; ++n) {
    std::uint64_t c = 0;
    for_each_impl_skeleton(n, [&](const Formula&) { ++c; });
    EXPECT_EQ(c, oracle::catalan_rec(n)) << n;
    EXPECT_EQ(catalan(n), oracle::catalan_rec(n));
  }
}

TEST(Exhaustive, SkeletonsOfSize3MatchListing) {
  std::vector<std::string> got;
  for_each_impl_skeleton(3, [&](const Formula& f) { got.push_back(to_string(f)); });
  EXPECT_EQ(got, (std::vector<std::string>{"0->1->2->3", "0->(1->2)->3", "(0->1)->2->3", "(0->1->2)->3",
                                           "((0->1)->2)->3"}));
}

TEST(Exhaustive, SetPartitionsAreDistinctRgsAndCountBell) {
  auto bell = oracle::bell_triangle(9);
  for (std::size_t n = 0; n <= 9; ++n) {
    std::set<SetPartition> seen;
    for_each_set_partition(n, [&](const SetPartition& p) {
      ASSERT_EQ(p.size(), n);
      AtomIndex next = 0;
      for (auto x : p) {
        ASSERT_LE(x, next);
        if (x == next) ++next;
      }
      seen.insert(p);
    });
    EXPECT_EQ(seen.size(), bell[n]) << n;
  }
}

TEST(Exhaustive, ImplFormulasMatchBruteForceUpToRenaming) {
  for (std::size_t n = 0; n <= 4; ++n) {
    std::set<std::string> got;
    std::size_t total = 0;
    for_each_impl_formula(n, [&](const Formula& f) {
      ++total;
      got.insert(to_string(f));
      ASSERT_EQ(f, canonical_numbering(f));
      ASSERT_EQ(f.size(), n);
    });
    EXPECT_EQ(total, got.size()) << "duplicates at size " << n;
    EXPECT_EQ(got, oracle::impl_formulas_brute(n)) << n;
  }
}

TEST(Exhaustive, ProvableCountAtSize2IsThreeByKripkeBruteForce) {
  std::uint64_t valid = 0;
  for (const auto& text : oracle::impl_formulas_brute(2))
    if (oracle::kripke_valid(parse_formula(text))) ++valid;
  EXPECT_EQ(valid, 3U);
  auto seq = count_family(Family::impl_provable, 2);
  EXPECT_EQ(seq.values[2], valid);
}

TEST(Exhaustive, ProvableCountsAgreeWithKripkeOracle) {
  for (std::size_t n = 0; n <= 4; ++n) {
    std::uint64_t valid = 0;
    for_each_impl_formula(n, [&](const Formula& f) { valid += oracle::kripke_valid(f); });
    EXPECT_EQ(count_items(Family::impl_provable, n), valid) << n;
  }
}

TEST(Exhaustive, TypedNormalFormsAreClosedNormalAndWellTyped) {
  for (std::size_t n = 1; n <= 7; ++n) {
    std::uint64_t c = 0;
    for_each_typed_nf(n, [&](const LambdaTerm& t, const Formula& ty) {
      ++c;
      ASSERT_EQ(lambda_size(t), n);
      ASSERT_TRUE(is_closed(t));
      ASSERT_TRUE(is_normal_form(t));
      ASSERT_TRUE(type_check(t, ty)) << to_string(t) << " : " << to_string(ty);
      auto inferred = infer_type(t);
      ASSERT_TRUE(inferred);
      ASSERT_EQ(canonical_numbering(*inferred), canonical_numbering(ty));
    });
    EXPECT_LE(c, oracle::closed_nf_count(n));
    EXPECT_EQ(c, count_items(Family::impl_taut, n));
  }
}

TEST(Exhaustive, TautologiesOfSize4MatchListing) {
  std::vector<std::string> got;
  for_each_impl_tautology(4, [&](const Formula& f) { got.push_back(to_string(f)); });
  EXPECT_EQ(got, (std::vector<std::string>{"0->1->2->3->3", "0->1->2->3->2", "0->1->2->3->1", "0->1->2->3->0",
                                           "0->(0->1)->1", "(0->1)->0->1", "((0->0)->1)->1"}));
}

TEST(Exhaustive, TautologiesAreKripkeValid) {
  for (std::size_t n = 1; n <= 6; ++n)
    for_each_impl_tautology(n, [&](const Formula& f) {
      if (f.size() <= 4) ASSERT_TRUE(oracle::kripke_valid(f)) << to_string(f);
    });
}

TEST(Exhaustive, ImplTautologyCountsMatchPublishedPrefix) {
  auto seq = count_family(Family::impl_taut, 9);
  std::vector<std::uint64_t> expect{1, 2, 3, 7, 17, 43, 129, 389, 1245};
  EXPECT_EQ(std::vector<std::uint64_t>(seq.values.begin() + 1, seq.values.end()), expect);
}

TEST(Exhaustive, HornSkeletonsRoundTripThroughFormulas) {
  for (std::size_t n = 0; n <= 7; ++n) {
    std::uint64_t c = 0;
    for_each_horn_skeleton(n, [&](const NestedHorn& h) {
      ++c;
      ASSERT_EQ(h.horn_size(), n);
      ASSERT_EQ(to_horn(from_horn(h)), h);
    });
    EXPECT_EQ(c, oracle::catalan_rec(n));
  }
}

TEST(Exhaustive, SortedHornCountsMatchPublishedPrefix) {
  auto seq = count_family(Family::sorted_horn, 7);
  std::vector<std::uint64_t> expect{1, 2, 4, 9, 22, 57, 154};
  EXPECT_EQ(std::vector<std::uint64_t>(seq.values.begin() + 1, seq.values.end()), expect);
}

TEST(Exhaustive, SortedHornTreesAreSorted) {
  for_each_sorted_horn(5, false, [&](const NestedHorn& h) { ASSERT_TRUE(is_sorted_horn(h)); });
  for_each_sorted_horn(3, true, [&](const NestedHorn& h) { ASSERT_TRUE(is_sorted_horn(h)); });
}

TEST(Exhaustive, UninhabitableCountsMatchPublishedPrefix) {
  auto tree = count_family(Family::uninhab_tree, 6);
  EXPECT_EQ(tree.values, (std::vector<std::uint64_t>{1, 0, 1, 1, 4, 7, 23}));
  auto vars = count_family(Family::uninhab_vars, 6);
  EXPECT_EQ(vars.values, (std::vector<std::uint64_t>{0, 1, 1, 4, 9, 30, 122}));
}

TEST(Exhaustive, UninhabitableTreesHaveNoProvableLabeling) {
  for_each_uninhabitable_tree(4, [&](const NestedHorn& h) {
    for_each_set_partition(5, [&](const SetPartition& p) {
      Formula f = from_horn(label_leaves(h, p));
      ASSERT_FALSE(oracle::kripke_valid(f)) << to_string(f);
    });
  });
}

TEST(Exhaustive, FullFormulasMatchBruteForceCountAtSmallSizes) {
  // every shape over ~ and the four binary connectives, every leaf labeling,
  // deduplicated up to renaming
  std::function<std::vector<Formula>(std::size_t)> shapes = [&](std::size_t n) {
    std::vector<Formula> out;
    if (n == 0) return std::vector<Formula>{Formula::atom(0)};
    for (const auto& a : shapes(n - 1)) out.push_back(Formula::neg(a));
    for (Op op : {Op::imp, Op::conj, Op::disj, Op::iff})
      for (std::size_t l = 0; l < n; ++l)
        for (const auto& a : shapes(l))
          for (const auto& b : shapes(n - 1 - l)) out.push_back(Formula::binary(op, a, b));
    return out;
  };
  std::function<Formula(const Formula&, const std::vector<AtomIndex>&, std::size_t&)> label =
      [&](const Formula& t, const std::vector<AtomIndex>& lab, std::size_t& pos) -> Formula {
    if (t.op() == Op::atom) return Formula::atom(lab[pos++]);
    if (t.op() == Op::neg) return Formula::neg(label(t.arg(), lab, pos));
    Formula a = label(t.lhs(), lab, pos);
    return Formula::binary(t.op(), a, label(t.rhs(), lab, pos));
  };
  for (std::size_t n = 0; n <= 2; ++n) {
    std::set<std::string> brute;
    for (const auto& s : shapes(n)) {
      std::vector<AtomIndex> leaves;
      collect_atoms(s, leaves);
      std::vector<AtomIndex> lab(leaves.size(), 0);
      for (;;) {
        std::size_t pos = 0;
        brute.insert(to_string(canonical_numbering(label(s, lab, pos))));
        std::size_t i = 0;
        while (i < lab.size() && ++lab[i] == lab.size()) lab[i++] = 0;
        if (i == lab.size()) break;
      }
    }
    std::set<std::string> got;
    for_each_full_formula(n, false, [&](const Formula& f) { got.insert(to_string(f)); });
    EXPECT_EQ(got, brute) << n;
  }
}

TEST(Exhaustive, CanonicalFullFormulasAreASubset) {
  std::uint64_t all = 0;
  std::uint64_t canon = 0;
  for_each_full_formula(3, false, [&](const Formula&) { ++all; });
  for_each_full_formula(3, true, [&](const Formula& f) {
    ++canon;
    ASSERT_TRUE(is_canonical_full(f));
  });
  EXPECT_LT(canon, all);
  EXPECT_GT(canon, 0U);
}

TEST(Exhaustive, VisitorCanStopEarly) {
  int seen = 0;
  for_each_impl_formula(5, [&](const Formula&) { return ++seen < 10; });
  EXPECT_EQ(seen, 10);
}

TEST(Exhaustive, FamilyNamesRoundTrip) {
  for (Family f : all_families()) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_FALSE(parse_family("nope"));
}

TEST(Exhaustive, CountBudgetTruncates) {
  CountOptions opt;
  opt.seconds = 1e-9;
  auto seq = count_family(Family::impl_all, 8, opt);
  EXPECT_TRUE(seq.truncated);
  EXPECT_LT(seq.values.size(), 9U);
}
