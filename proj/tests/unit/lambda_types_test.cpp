#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace ipcheck;

TEST(Lambda, ParsesAndPrintsDeBruijnTerms) {
  LambdaTerm t = parse_lambda("\\x.\\y.x");
  EXPECT_EQ(to_string(t), "\\a.\\b.a");
  EXPECT_EQ(lambda_size(t), 2U);
  EXPECT_TRUE(is_closed(t));
  EXPECT_TRUE(is_normal_form(t));
}

TEST(Lambda, RedexIsNotNormal) {
  EXPECT_FALSE(is_normal_form(parse_lambda("(\\x.x) (\\y.y)")));
  EXPECT_TRUE(is_normal_form(parse_lambda("\\f.\\x.f (f x)")));
}

TEST(Lambda, FreeVariableIsRejected) { EXPECT_THROW(parse_lambda("\\x.y"), ParseError); }

TEST(Lambda, PrintParseRoundTrip) {
  for (std::size_t n = 1; n <= 6; ++n)
    for_each_typed_nf(n, [&](const LambdaTerm& t, const Formula&) { ASSERT_EQ(parse_lambda(to_string(t)), t); });
}

TEST(Types, InfersCombinatorTypes) {
  auto i = infer_type(parse_lambda("\\x.x"));
  auto k = infer_type(parse_lambda("\\x.\\y.x"));
  auto s = infer_type(parse_lambda("\\x.\\y.\\z.x z (y z)"));
  ASSERT_TRUE(i && k && s);
  EXPECT_EQ(to_string(canonical_numbering(*i)), "0->0");
  EXPECT_EQ(to_string(canonical_numbering(*k)), "0->1->0");
  EXPECT_EQ(to_string(canonical_numbering(*s)), "(0->1->2)->(0->1)->0->2");
}

TEST(Types, SelfApplicationFailsOccursCheck) {
  EXPECT_FALSE(infer_type(parse_lambda("\\x.x x")));
  TypeStore st;
  TypeRef a = st.fresh();
  TypeRef b = st.fresh();
  EXPECT_FALSE(unify_occurs(a, st.arrow(a, b), st));
}

TEST(Types, TypeCheckAcceptsInstancesOnlyOfPrincipalType) {
  LambdaTerm k = parse_lambda("\\x.\\y.x");
  EXPECT_TRUE(type_check(k, parse_formula("0->1->0")));
  EXPECT_TRUE(type_check(k, parse_formula("(0->0)->1->0->0")));
  EXPECT_FALSE(type_check(k, parse_formula("0->1->1")));
  EXPECT_FALSE(type_check(k, parse_formula("0->0")));
}

TEST(Types, UndoRestoresStore) {
  TypeStore st;
  TypeRef a = st.fresh();
  TypeRef b = st.fresh();
  TypeStore before = st;
  auto m = st.mark();
  TypeRef c = st.fresh();
  ASSERT_TRUE(st.unify(a, st.arrow(b, c)));
  st.undo(m);
  EXPECT_EQ(st, before);
}

TEST(Types, RandomUnificationEpisodesStayAcyclic) {
  Rng rng(21);
  for (int episode = 0; episode < 300; ++episode) {
    TypeStore st;
    std::vector<TypeRef> refs;
    for (int i = 0; i < 6; ++i) refs.push_back(st.fresh());
    for (int step = 0; step < 40; ++step) {
      TypeRef x = refs[rng.below(refs.size())];
      TypeRef y = refs[rng.below(refs.size())];
      if (rng.coin()) {
        refs.push_back(st.arrow(x, y));
      } else {
        auto m = st.mark();
        if (!st.unify(x, y)) st.undo(m);
      }
      ASSERT_TRUE(st.acyclic());
    }
  }
}

TEST(Types, UnificationProducesCommonInstance) {
  TypeStore st;
  std::unordered_map<AtomIndex, TypeRef> va;
  std::unordered_map<AtomIndex, TypeRef> vb;
  TypeRef x = st.from_formula(parse_formula("0->1->0"), va);
  TypeRef y = st.from_formula(parse_formula("(2->2)->3"), vb);
  ASSERT_TRUE(st.unify(x, y));
  EXPECT_EQ(to_string(canonical_numbering(st.to_formula(x))), to_string(canonical_numbering(st.to_formula(y))));
  EXPECT_EQ(to_string(canonical_numbering(st.to_formula(x))), "(0->0)->1->0->0");
}
