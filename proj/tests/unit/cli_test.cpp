#include <gtest/gtest.h>

#include <sstream>

#include "ipcheck/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "ipcheck");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  int code = ipcheck::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Cli, GenTautologiesOfSize4) {
  Result r = run_cli({"gen", "--family", "impl-taut", "--size", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 7U);
}

TEST(Cli, CountSkeletons) {
  Result r = run_cli({"count", "--family", "impl-skeletons", "--max", "6"});
  EXPECT_EQ(r.code, 0);
  auto l = lines(r.out);
  ASSERT_FALSE(l.empty());
  EXPECT_EQ(l.back(), "6\t132");
}

TEST(Cli, ProveWithProofTerm) {
  Result r = run_cli({"prove", "--prover", "term", "--proof-term"}, "0->0\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "PROVED \\a.a\n");
}

TEST(Cli, ProveSeveralLines) {
  Result r = run_cli({"prove", "--prover", "ljt"}, "0->1->0\n\n# comment\n((0->1)->0)->0\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "PROVED\nNOT_PROVED\n");
}

TEST(Cli, GenPipedIntoProve) {
  Result g = run_cli({"gen", "--family", "impl-all", "--size", "2"});
  Result p = run_cli({"prove", "--prover", "horn"}, g.out);
  auto l = lines(p.out);
  EXPECT_EQ(l.size(), 10U);
  EXPECT_EQ(std::count(l.begin(), l.end(), "PROVED"), 3);
}

TEST(Cli, UnknownFamilyIsUsageError) {
  Result r = run_cli({"gen", "--family", "nope", "--size", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ipcheck:"), std::string::npos);
}

TEST(Cli, MissingSubcommandAndBadInputAreUsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"prove"}, "0->\n").code, 2);
  EXPECT_EQ(run_cli({"prove", "--prover", "ljt"}, "0&1\n").code, 2);
  EXPECT_EQ(run_cli({"prove", "--prover", "ljt", "--proof-term"}, "0\n").code, 2);
}

TEST(Cli, FuzzWithDiscrepanciesExitsOne) {
  Result r = run_cli({"fuzz", "--size", "3", "--suspect", "bad-fp"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.out.empty());
  Result ok = run_cli({"fuzz", "--size", "3", "--suspect", "ljt", "--upto"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(ok.out.empty());
}

TEST(Cli, TransformHornAndBack) {
  Result h = run_cli({"transform", "--kind", "horn"}, "(0->1->2->3->4)->(0->1->2)->0->2->3\n");
  EXPECT_EQ(h.out, "(3:-[(4:-[0,1,2,3]),(2:-[0,1]),0,2])\n");
  Result u = run_cli({"transform", "--kind", "unhorn"}, h.out);
  EXPECT_EQ(u.out, "(0->1->2->3->4)->(0->1->2)->0->2->3\n");
}

TEST(Cli, RandomIsReproducible) {
  Result a = run_cli({"random", "--kind", "impl", "--size", "20", "--seed", "4", "--count", "3"});
  Result b = run_cli({"random", "--kind", "impl", "--size", "20", "--seed", "4", "--count", "3"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(lines(a.out).size(), 3U);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli({"--help"}).code, 0); }
