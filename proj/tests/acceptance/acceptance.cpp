// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "ipcheck/ipcheck.hpp"

using namespace ipcheck;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// Values of count_family(fam) at sizes first..first+expected.size()-1.
void expect_counts(Check& c, Family fam, std::size_t first, const std::vector<std::uint64_t>& expected) {
  std::size_t last = first + expected.size() - 1;
  CountSequence seq = count_family(fam, last);
  std::vector<std::uint64_t> got;
  for (std::size_t n = first; n <= last && n < seq.values.size(); ++n) got.push_back(seq.values[n]);
  c.expect(got == expected, std::string(family_name(fam)) + " gave " + join(got) + " expected " + join(expected));
}

Check criterion1() {
  Check c;
  expect_counts(c, Family::impl_skeletons, 1, {1, 2, 5, 14, 42, 132, 429, 1430, 4862});
  expect_counts(c, Family::impl_all, 0, {1, 2, 10, 75, 728, 8526, 115764});
  expect_counts(c, Family::impl_taut, 1, {1, 2, 3, 7, 17, 43, 129, 389, 1245, 4274, 14991, 55289});
  expect_counts(c, Family::sorted_horn, 1, {1, 2, 4, 9, 22, 57, 154});
  // the index offset of the provable sequence: size 2 (three implications)
  // has exactly 3 provable formulas, by direct enumeration
  std::uint64_t provable2 = 0;
  for_each_impl_formula(2, [&](const Formula& f) { provable2 += prove_ljt(f).proved; });
  c.expect(provable2 == 3, "size-2 provable count " + std::to_string(provable2));
  expect_counts(c, Family::impl_provable, 0, {0, 1, 3, 24, 201, 2201, 27406});
  expect_counts(c, Family::uninhab_tree, 0, {1, 0, 1, 1, 4, 7, 23, 53, 163});
  expect_counts(c, Family::uninhab_vars, 0, {0, 1, 1, 4, 9, 30, 122, 528});
  return c;
}

Check criterion2() {
  Check c;
  std::uint64_t top = 0;
  for (std::size_t n = 0; n <= 6; ++n)
    for_each_impl_formula(n, [&](const Formula& f) {
      top += n == 6;
      bool gold = prove_oracle(f).proved;
      for (ProverId id : real_provers())
        if (prove(id, f).proved != gold) {
          c.expect(false, std::string(prover_name(id)) + " disagrees on " + to_string(f));
          return false;
        }
      return true;
    });
  c.expect(top == 115764, "size-6 sweep covered " + std::to_string(top) + " formulas");
  for (std::size_t n = 0; n <= 4 && c.ok; ++n)
    for_each_full_formula(n, true, [&](const Formula& f) {
      if (prove_full_ipc(f).proved == prove_oracle(f).proved) return true;
      c.expect(false, "fullipc disagrees on " + to_string(f));
      return false;
    });
  return c;
}

Check criterion3() {
  Check c;
  std::vector<Formula> suite;
  for (std::size_t n = 1; n <= 9; ++n) for_each_impl_tautology(n, [&](const Formula& f) { suite.push_back(f); });
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    suite.push_back(random_sk_tautology(60, 40, rng));
  }
  ProveOptions opt;
  opt.budget = 20'000'000;
  std::string missed;
  for (ProverId id : real_provers()) {
    std::uint64_t refuted = 0;
    std::uint64_t over_budget = 0;
    for (const auto& f : suite) {
      try {
        refuted += !prove(id, f, opt).proved;
      } catch (const BudgetExceeded&) {
        ++over_budget;
      }
    }
    if (refuted + over_budget > 0)
      missed += std::string(missed.empty() ? "" : ", ") + std::string(prover_name(id)) + " " +
                std::to_string(refuted) + " refuted " + std::to_string(over_budget) + " over budget";
  }
  c.expect(missed.empty(), "of " + std::to_string(suite.size()) + " tautologies: " + missed);
  return c;
}

Check criterion4() {
  Check c;
  for (std::size_t n = 0; n <= 6; ++n)
    for_each_impl_formula(n, [&](const Formula& f) {
      Verdict v = prove_with_term(f);
      if (v.proved) c.expect(v.proof_term && type_check(*v.proof_term, f), "bad proof term for " + to_string(f));
    });
  std::vector<std::pair<const char*, const char*>> samples{
      {"(0->1->2)->(0->1)->0->2", "\\a.\\b.\\c.((a c)(b c))"},
      {"0->1->0", "\\a.\\b.a"},
      {"0->0", "\\a.a"},
  };
  for (auto [type, term] : samples) {
    Verdict v = prove_with_term(parse_formula(type));
    c.expect(v.proof_term && *v.proof_term == parse_lambda(term),
             std::string(type) + " gave " + (v.proof_term ? to_string(*v.proof_term) : std::string("nothing")));
  }
  return c;
}

Check criterion5() {
  Check c;
  for (std::size_t n = 0; n <= 5; ++n)
    for_each_impl_formula(n, [&](const Formula& f) {
      c.expect(prove_oracle(f).proved == prove_oracle(mints(f)).proved, "mints changes provability of " + to_string(f));
      c.expect(from_horn(to_horn(f)) == f, "horn round trip fails on " + to_string(f));
    });
  for (std::size_t n = 0; n <= 4; ++n)
    for_each_full_formula(n, true, [&](const Formula& f) {
      if (!contains_op(f, Op::disj)) {
        bool all = true;
        for (const auto& h : to_nested_horn_list(f)) all = all && prove_horn(h).proved;
        c.expect(all == prove_oracle(f).proved, "nested horn changes provability of " + to_string(f));
      }
      if (!has_disj_bicond_pattern(f))
        c.expect(from_disj_bicond(to_disj_bicond(f)) == f, "disjbicond round trip fails on " + to_string(f));
    });
  Formula h = parse_formula("(0->1->2->3->4)->(0->1->2)->0->2->3");
  c.expect(to_string(to_horn(h)) == "(3:-[(4:-[0,1,2,3]),(2:-[0,1]),0,2])", "horn example gave " + to_string(to_horn(h)));
  ParsedFormula p = parse_formula_named("a&b&(c&d->e)<->f&g");
  std::string list = "[";
  auto clauses = to_nested_horn_list(p.formula);
  for (std::size_t i = 0; i < clauses.size(); ++i) list += (i ? "," : "") + to_string(clauses[i], &p.names);
  list += "]";
  c.expect(list == "[(f:-[a,b,(e:-[c,d])]),(g:-[a,b,(e:-[c,d])]),(a:-[f,g]),(b:-[f,g]),(e:-[c,d,f,g])]",
           "nested horn example gave " + list);
  return c;
}

Check criterion6() {
  Check c;
  {
    Rng rng(2024);
    std::map<std::string, std::uint64_t> hist;
    const std::uint64_t draws = 100000;
    for (std::uint64_t i = 0; i < draws; ++i) ++hist[to_string(remy_tree(3, rng))];
    c.expect(hist.size() == 5, "remy produced " + std::to_string(hist.size()) + " shapes");
    for (const auto& [shape, k] : hist) {
      double f = static_cast<double>(k) / draws;
      c.expect(std::abs(f - 0.2) <= 0.01, "shape " + shape + " frequency " + std::to_string(f));
    }
  }
  {
    Rng rng(2025);
    std::map<SetPartition, std::uint64_t> hist;
    const std::uint64_t draws = 150000;
    for (std::uint64_t i = 0; i < draws; ++i) ++hist[random_set_partition(4, rng)];
    c.expect(hist.size() == 15, "partition sampler produced " + std::to_string(hist.size()) + " partitions");
    for (const auto& [part, k] : hist) {
      double f = static_cast<double>(k) / draws;
      c.expect(std::abs(f - 1.0 / 15) <= 0.005, partition_text(part) + " frequency " + std::to_string(f));
    }
  }
  auto stream = [](std::uint64_t seed) {
    Rng rng(seed);
    std::ostringstream os;
    for (int i = 0; i < 50; ++i) os << random_impl_formula(40, rng) << '\n';
    for (int i = 0; i < 20; ++i) os << partition_text(random_set_partition(30, rng)) << '\n';
    for (int i = 0; i < 5; ++i) os << random_sk_tautology(20, 10, rng) << '\n';
    for (int i = 0; i < 5; ++i) os << random_typed_nf(30, rng).second << '\n';
    return os.str();
  };
  c.expect(stream(7) == stream(7), "same seed produced different streams");
  c.expect(stream(7) != stream(8), "different seeds produced the same stream");
  return c;
}

Check criterion7() {
  Check c;
  Suspect gold = builtin_suspect(ProverId::oracle);
  ProveOptions ropt;
  ropt.seed = 1;
  FuzzReport r = gold_test(Family::impl_all, 6, gold, builtin_suspect(ProverId::bad_random, ropt));
  c.expect(r.count(DiscrepancyKind::wrong_success) > 0 && r.count(DiscrepancyKind::wrong_failure) > 0,
           "bad-random not caught both ways");
  FuzzReport fp = gold_test(Family::impl_all, 6, gold, builtin_suspect(ProverId::bad_fp));
  c.expect(fp.count(DiscrepancyKind::wrong_success) > 0, "bad-fp not caught");
  c.expect(fp.count(DiscrepancyKind::wrong_failure) == 0,
           "bad-fp produced " + std::to_string(fp.count(DiscrepancyKind::wrong_failure)) + " wrong_failure");
  FuzzReport m = mints_harden_fuzz(builtin_suspect(ProverId::fullipc), 5);
  c.expect(m.discrepancies.empty(), std::to_string(m.discrepancies.size()) + " discrepancies from the Mints fuzz");
  c.expect(m.unknown.empty(), "Mints fuzz hit the step budget");
  return c;
}

Check criterion8() {
  Check c;
  std::uint64_t bound_checks = 0;
  std::uint64_t head_checks = 0;
  for (std::size_t n = 0; n <= 6; ++n)
    for_each_impl_formula(n, [&](const Formula& f) {
      Verdict h = prove_hudelmaier(f);
      bound_checks += h.stats.bound_checks;
      c.expect(h.stats.bound_violations == 0, "hudelmaier bound violated on " + to_string(f));
      Verdict n2 = prove_horn(f);
      head_checks += n2.stats.head_checks;
      c.expect(n2.stats.head_violations == 0, "horn head invariant violated on " + to_string(f));
    });
  c.expect(bound_checks > 0 && head_checks > 0, "instrumentation never ran");
  return c;
}

Check criterion9() {
  Check c;
  BenchOptions opt;
  opt.repeats = 5;
  auto rows = bench({ProverId::ljt, ProverId::horn}, {13}, opt);
  double ljt = rows.at(0).total();
  double horn = rows.at(1).total();
  c.expect(rows[0].timeouts == 0 && rows[1].timeouts == 0, "size-13 suite hit the step budget");
  char buf[128];
  std::snprintf(buf, sizeof buf, "horn %.3fs vs ljt %.3fs", horn, ljt);
  c.expect(horn <= ljt, buf);
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(9);
  Formula f = random_impl_formula(1000, rng);
  double t = seconds_since(t0);
  c.expect(f.size() == 1000 && t < 10.0, "random_impl_formula(1000) took " + std::to_string(t) + "s");
  if (c.ok) c.detail = buf;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"count reproduction", criterion1},   {"prover cross-agreement", criterion2},
      {"tautology completeness", criterion3}, {"proof-term soundness", criterion4},
      {"transform equiprovability", criterion5}, {"sampler uniformity", criterion6},
      {"fuzzer efficacy", criterion7},      {"space instrumentation", criterion8},
      {"horn vs ljt ordering", criterion9},
  };
  // optional arguments select criteria by number
  std::vector<bool> wanted(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    std::size_t k = std::strtoul(argv[a], nullptr, 10);
    if (k >= 1 && k <= criteria.size()) wanted[k - 1] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!wanted[i]) continue;
    std::fflush(stdout);
    auto t0 = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid == 0) {
      Check c;
      try {
        c = criteria[i].second();
      } catch (const std::exception& e) {
        c.ok = false;
        c.detail = std::string("exception: ") + e.what();
      }
      std::printf("%s criterion %zu (%s) %.1fs%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                  seconds_since(t0), c.detail.empty() ? "" : ": ", c.detail.c_str());
      std::fflush(stdout);
      _exit(c.ok ? 0 : 1);
    }
    int status = 0;
    if (pid < 0 || waitpid(pid, &status, 0) < 0) status = -1;
    if (pid < 0 || !WIFEXITED(status)) {
      int sig = pid > 0 && WIFSIGNALED(status) ? WTERMSIG(status) : 0;
      std::printf("FAIL criterion %zu (%s) %.1fs: process ended abnormally, signal %d\n", i + 1, criteria[i].first,
                  seconds_since(t0), sig);
      ++failed;
    } else if (WEXITSTATUS(status) != 0) {
      ++failed;
    }
  }
  return failed ? 1 : 0;
}
