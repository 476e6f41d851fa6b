#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "oracles.hpp"

using namespace ipcheck;

namespace {

Suspect kripke_gold() {
  return Suspect{"kripke", [](const Formula& f) { return oracle::kripke_valid(f) ? Outcome::proved : Outcome::not_proved; },
                 false};
}

}  // namespace

TEST(Harness, FalsePositiveProverOnlyReportsWrongSuccess) {
  FuzzReport rep = gold_test_upto(Family::impl_all, 4, kripke_gold(), builtin_suspect(ProverId::bad_fp));
  EXPECT_EQ(rep.tested, 1U + 2 + 10 + 75 + 728);
  EXPECT_GT(rep.count(DiscrepancyKind::wrong_success), 0U);
  EXPECT_EQ(rep.count(DiscrepancyKind::wrong_failure), 0U);
}

TEST(Harness, ClassificationMatchesIndependentRecheck) {
  ProveOptions opt;
  opt.seed = 99;
  Suspect bad = builtin_suspect(ProverId::bad_random, opt);
  FuzzReport rep = gold_test(Family::impl_all, 4, kripke_gold(), bad);
  EXPECT_GT(rep.count(DiscrepancyKind::wrong_success), 0U);
  EXPECT_GT(rep.count(DiscrepancyKind::wrong_failure), 0U);
  std::uint64_t expected = 0;
  for_each_impl_formula(4, [&](const Formula& f) {
    bool s = bad_prover_random(f, 99).proved;
    expected += s != oracle::kripke_valid(f);
  });
  EXPECT_EQ(rep.discrepancies.size(), expected);
  for (const auto& d : rep.discrepancies) {
    bool valid = oracle::kripke_valid(d.formula);
    EXPECT_EQ(d.kind == DiscrepancyKind::wrong_success, !valid);
    EXPECT_EQ(d.suspect, "bad-random");
    EXPECT_EQ(d.gold, "kripke");
  }
}

TEST(Harness, CorrectProverHasNoDiscrepancies) {
  FuzzReport rep = gold_test_upto(Family::impl_all, 4, kripke_gold(), builtin_suspect(ProverId::horn));
  EXPECT_TRUE(rep.discrepancies.empty());
  EXPECT_TRUE(rep.unknown.empty());
}

TEST(Harness, DiscrepanciesDoNotDependOnJobCount) {
  auto run = [](unsigned jobs) {
    FuzzOptions opt;
    opt.jobs = jobs;
    opt.chunk = 100;
    FuzzReport rep = gold_test(Family::impl_all, 5, builtin_suspect(ProverId::oracle), builtin_suspect(ProverId::bad_fp), opt);
    std::vector<std::string> lines;
    for (const auto& d : rep.discrepancies) lines.push_back(to_json_line(d));
    return lines;
  };
  auto one = run(1);
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(run(3), one);
}

TEST(Harness, JsonLineHasExpectedKeys) {
  Discrepancy d{parse_formula("0->1"), parse_formula("(0->1)->0->1"), DiscrepancyKind::wrong_success, "s", "g", 7};
  auto j = nlohmann::json::parse(to_json_line(d));
  EXPECT_EQ(j["formula"], "0->1");
  EXPECT_EQ(j["source_formula"], "(0->1)->0->1");
  EXPECT_EQ(j["kind"], "wrong_success");
  EXPECT_EQ(j["suspect"], "s");
  EXPECT_EQ(j["gold"], "g");
  EXPECT_EQ(j["seed"], 7);
  d.source_formula.reset();
  EXPECT_FALSE(nlohmann::json::parse(to_json_line(d)).contains("source_formula"));
}

TEST(Harness, RejectsFullFamilyForImplicationalSuspect) {
  EXPECT_THROW(gold_test(Family::full_canonical, 1, builtin_suspect(ProverId::oracle), builtin_suspect(ProverId::ljt)),
               std::invalid_argument);
}

TEST(Harness, BudgetExhaustionIsUnknown) {
  ProveOptions opt;
  opt.budget = 1;
  Suspect s = builtin_suspect(ProverId::ljt, opt);
  Rng rng(3);
  EXPECT_EQ(s.run(random_impl_formula(40, rng)), Outcome::unknown);
}

TEST(Harness, MinimizeFindsSmallestWitness) {
  Suspect gold = builtin_suspect(ProverId::oracle);
  Suspect bad = builtin_suspect(ProverId::bad_fp);
  FuzzReport rep = gold_test(Family::impl_all, 5, gold, bad);
  ASSERT_FALSE(rep.discrepancies.empty());
  const Discrepancy& d = rep.discrepancies.front();
  auto m = minimize(d, gold, bad);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->kind, d.kind);
  EXPECT_EQ(m->source_formula, d.formula);
  EXPECT_LE(m->formula.size(), d.formula.size());
  // nothing smaller disagrees the same way
  for (std::size_t n = 0; n < m->formula.size(); ++n)
    for_each_impl_formula(n, [&](const Formula& f) {
      ASSERT_FALSE(bad_prover_fp(f).proved && !oracle::kripke_valid(f)) << to_string(f);
    });
}

TEST(Harness, MintsFuzzOfCorrectProverIsClean) {
  FuzzReport rep = mints_harden_fuzz(builtin_suspect(ProverId::fullipc), 4);
  EXPECT_TRUE(rep.discrepancies.empty());
  EXPECT_GT(rep.tested, 0U);
}

TEST(Harness, MintsTautologyModeCatchesAlwaysNo) {
  Suspect no{"no", [](const Formula&) { return Outcome::not_proved; }, false};
  FuzzReport rep = mints_harden_fuzz(no, 4, MintsMode::tautologies);
  EXPECT_EQ(rep.count(DiscrepancyKind::wrong_failure), 1U + 2 + 3 + 7);
  for (const auto& d : rep.discrepancies) {
    ASSERT_TRUE(d.source_formula);
    EXPECT_EQ(d.formula, mints(*d.source_formula));
  }
}

TEST(Harness, ExternalProverReplies) {
  EXPECT_EQ(ExternalProver("echo PROVED").run("0->0"), Outcome::proved);
  EXPECT_EQ(ExternalProver("read l; echo NOT_PROVED").run("0"), Outcome::not_proved);
  EXPECT_EQ(ExternalProver("echo maybe").run("0"), Outcome::unknown);
  EXPECT_EQ(ExternalProver("exit 3").run("0"), Outcome::unknown);
}

TEST(Harness, ExternalProverSeesTheFormula) {
  ExternalProver p("read l; if [ \"$l\" = \"0->0\" ]; then echo PROVED; else echo NOT_PROVED; fi");
  EXPECT_EQ(p.run("0->0"), Outcome::proved);
  EXPECT_EQ(p.run("0->1"), Outcome::not_proved);
}

TEST(Harness, ExternalProverTimeoutIsUnknown) {
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(ExternalProver("sleep 5; echo PROVED", 0.3).run("0"), Outcome::unknown);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3.0);
}

TEST(Harness, VerifyCountsOnSmallSizes) {
  CountReport rep = verify_counts({{Family::impl_all, 5}, {Family::partitions, 6}, {Family::horn, 6}});
  EXPECT_TRUE(rep.all_match());
  EXPECT_EQ(rep.checks.size(), 6U + 6 + 6);
  std::ostringstream os;
  write_count_report(os, rep);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "family\tsize\texpected\tactual\tstatus");
}

TEST(Harness, KnownSequencesPrefixAgreesWithOracles) {
  const KnownSequence* bell = find_known_sequence(Family::partitions);
  ASSERT_TRUE(bell);
  auto b = oracle::bell_triangle(bell->start + bell->values.size());
  for (std::size_t i = 0; i < bell->values.size(); ++i) EXPECT_EQ(bell->values[i], b[bell->start + i]);
  const KnownSequence* cat = find_known_sequence(Family::impl_skeletons);
  ASSERT_TRUE(cat);
  for (std::size_t i = 0; i < cat->values.size(); ++i) EXPECT_EQ(cat->values[i], oracle::catalan_rec(cat->start + i));
}

TEST(Harness, BenchTableSchema) {
  auto rows = bench({ProverId::ljt, ProverId::horn}, {6});
  ASSERT_EQ(rows.size(), 2U);
  std::ostringstream os;
  write_bench_tsv(os, rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "Prover\tSize\tPositive\tMix\tTotal");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 4);
  }
  EXPECT_EQ(n, 2);
}

TEST(Harness, BenchWithNoProversIsEmpty) {
  auto rows = bench({}, {6});
  EXPECT_TRUE(rows.empty());
  std::ostringstream os;
  write_bench_tsv(os, rows);
  EXPECT_TRUE(os.str().empty());
}
