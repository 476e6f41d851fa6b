#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ipcheck.hpp"

namespace ipcheck {

struct CliConfig {
  std::string family;
  std::string prover = "oracle";
  std::string gold = "oracle";
  std::string suspect;
  std::string external;
  std::string kind;
  std::string mode = "gold";
  std::string mints_mode = "both";
  std::size_t size = 0;
  std::size_t max = 0;
  std::size_t count = 1;
  std::size_t min_type_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t retries = kDefaultRetries;
  std::uint64_t budget = ProveOptions{}.budget;
  double timeout = 60.0;
  double seconds = 0;
  unsigned jobs = 1;
  unsigned repeats = 1;
  bool proof_term = false;
  bool with_term = false;
  bool horn_text = false;
  bool upto = false;
  bool minimize = false;
  std::vector<std::string> families;
  std::vector<std::string> provers;
  std::vector<std::size_t> sizes;
  std::string input;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> selector_names(const std::vector<Family>& fams) {
  std::vector<std::string> v;
  for (Family f : fams) v.emplace_back(family_name(f));
  return v;
}

inline std::vector<std::string> prover_names(bool with_bad) {
  std::vector<std::string> v;
  for (ProverId id : real_provers()) v.emplace_back(prover_name(id));
  if (with_bad) {
    v.emplace_back(prover_name(ProverId::bad_random));
    v.emplace_back(prover_name(ProverId::bad_fp));
  }
  return v;
}

inline Family need_family(const std::string& flag, const std::string& name) {
  auto f = parse_family(name);
  if (!f) throw UsageError(flag + ": unknown family '" + name + "'");
  return *f;
}

inline ProverId need_prover(const std::string& flag, const std::string& name) {
  auto p = parse_prover(name);
  if (!p) throw UsageError(flag + ": unknown prover '" + name + "'");
  return *p;
}

class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path.empty() || path == "-") {
      in_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_) throw UsageError("cannot open input '" + path + "'");
    in_ = file_.get();
  }
  std::istream& get() { return *in_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* in_ = nullptr;
};

// Non-blank lines that are not comments.
template <class F>
void for_each_input_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    f(line, lineno);
  }
}

inline ParsedFormula parse_line(const std::string& line, std::size_t lineno) {
  try {
    return parse_formula_named(line);
  } catch (const ParseError& e) {
    throw ParseError("line " + std::to_string(lineno) + ": " + e.message(), e.position());
  }
}

inline int cmd_gen(const CliConfig& c, std::ostream& out) {
  Family fam = need_family("--family", c.family);
  if (c.horn_text || !family_has_formulas(fam)) {
    for_each_family_line(fam, c.size, [&](const std::string& s) { out << s << '\n'; });
  } else {
    for_each_family_formula(fam, c.size, [&](const Formula& f) { out << f << '\n'; });
  }
  return 0;
}

inline int cmd_count(const CliConfig& c, std::ostream& out, std::ostream& err) {
  Family fam = need_family("--family", c.family);
  CountOptions opt;
  opt.seconds = c.seconds;
  CountSequence seq = count_family(fam, c.max, opt);
  for (std::size_t n = 0; n < seq.values.size(); ++n) out << n << '\t' << seq.values[n] << '\n';
  if (seq.truncated) err << "count: stopped after size " << seq.values.size() - 1 << " (time budget)\n";
  return 0;
}

inline int cmd_random(const CliConfig& c, std::ostream& out) {
  Rng rng(c.seed);
  for (std::size_t i = 0; i < c.count; ++i) {
    if (c.kind == "impl") {
      out << random_impl_formula(c.size, rng) << '\n';
    } else if (c.kind == "tree") {
      out << remy_tree(c.size, rng) << '\n';
    } else if (c.kind == "partition") {
      out << partition_text(random_set_partition(c.size, rng)) << '\n';
    } else if (c.kind == "sk-tree") {
      out << to_string(random_sk_tree(c.size, rng)) << '\n';
    } else if (c.kind == "sk-taut") {
      out << random_sk_tautology(c.size, c.min_type_size, rng, c.retries) << '\n';
    } else if (c.kind == "typed-nf") {
      auto [term, type] = random_typed_nf(c.size, rng, c.retries);
      if (c.with_term) out << to_string(term) << '\t';
      out << type << '\n';
    } else {
      throw UsageError("--kind: unknown random kind '" + c.kind + "'");
    }
  }
  return 0;
}

inline int cmd_prove(const CliConfig& c, std::istream& in, std::ostream& out, std::ostream& err) {
  ProverId id = need_prover("--prover", c.prover);
  if (c.proof_term && id != ProverId::term) throw UsageError("--proof-term: only the term prover builds proof terms");
  ProveOptions opt;
  opt.budget = c.budget;
  opt.seed = c.seed;
  Input src(c.input, in);
  for_each_input_line(src.get(), [&](const std::string& line, std::size_t lineno) {
    Formula f = parse_line(line, lineno).formula;
    if (!accepts_full_formulas(id) && !is_implicational(f))
      throw UsageError("line " + std::to_string(lineno) + ": prover '" + c.prover + "' needs an implicational formula");
    try {
      Verdict v = prove(id, f, opt);
      out << (v.proved ? "PROVED" : "NOT_PROVED");
      if (c.proof_term && v.proof_term) out << ' ' << to_string(*v.proof_term);
      out << '\n';
      if (c.proof_term && v.proved && !v.proof_term)
        err << "ipcheck: line " << lineno << ": proof term omitted, " << static_cast<double>(v.proof_term_size)
            << " nodes\n";
    } catch (const BudgetExceeded&) {
      out << "UNKNOWN\n";
    }
  });
  return 0;
}

inline int cmd_transform(const CliConfig& c, std::istream& in, std::ostream& out) {
  static const std::vector<std::string> kinds{"horn", "unhorn", "nested-horn", "mints", "disjbicond", "undisjbicond"};
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw UsageError("--kind: unknown transform '" + c.kind + "'");
  Input src(c.input, in);
  for_each_input_line(src.get(), [&](const std::string& line, std::size_t lineno) {
    if (c.kind == "unhorn") {
      try {
        out << from_horn(parse_horn(line)) << '\n';
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.message(), e.position());
      }
      return;
    }
    ParsedFormula p = parse_line(line, lineno);
    const SymbolTable* names = p.names.empty() ? nullptr : &p.names;
    if (c.kind == "horn") {
      if (!is_implicational(p.formula))
        throw UsageError("line " + std::to_string(lineno) + ": horn needs an implicational formula");
      out << to_string(to_horn(p.formula), names) << '\n';
    } else if (c.kind == "nested-horn") {
      auto clauses = to_nested_horn_list(p.formula);
      out << '[';
      for (std::size_t i = 0; i < clauses.size(); ++i) out << (i ? "," : "") << to_string(clauses[i], names);
      out << "]\n";
    } else if (c.kind == "mints") {
      Formula m = mints(p.formula);
      auto top = max_atom(m);
      SymbolTable t = SymbolTable::fresh_names(mints_first_fresh(p.formula), top ? *top + 1 : 0);
      for (AtomIndex a = 0; a < mints_first_fresh(p.formula); ++a)
        if (auto* n = p.names.find(a)) t.set(a, *n);
      out << to_string(m, &t) << '\n';
    } else if (c.kind == "disjbicond") {
      out << to_string(to_disj_bicond(p.formula), names) << '\n';
    } else {
      out << to_string(from_disj_bicond(p.formula), names) << '\n';
    }
  });
  return 0;
}

inline void report_fuzz(const FuzzReport& rep, std::ostream& out, std::ostream& err) {
  for (const auto& d : rep.discrepancies) out << to_json_line(d) << '\n';
  err << "tested " << rep.tested << ", wrong_success " << rep.count(DiscrepancyKind::wrong_success) << ", wrong_failure "
      << rep.count(DiscrepancyKind::wrong_failure) << ", unknown " << rep.unknown.size() << '\n';
  for (const auto& u : rep.unknown) {
    err << "unknown: " << u.prover << " on " << u.formula;
    if (u.source_formula) err << " (source " << *u.source_formula << ")";
    err << '\n';
  }
}

inline int cmd_fuzz(const CliConfig& c, std::ostream& out, std::ostream& err) {
  ProveOptions popt;
  popt.budget = c.budget;
  popt.seed = c.seed;
  std::optional<Suspect> suspect;
  if (!c.external.empty()) {
    if (!c.suspect.empty()) throw UsageError("--external: give either --suspect or --external");
    suspect = external_suspect(ExternalProver(c.external, c.timeout));
  } else {
    if (c.suspect.empty()) throw UsageError("--suspect: a prover or --external command is required");
    suspect = builtin_suspect(need_prover("--suspect", c.suspect), popt);
  }
  FuzzOptions fopt;
  fopt.jobs = std::max(1U, c.jobs);
  fopt.seed = c.seed;
  FuzzReport rep;
  if (c.mode == "mints") {
    MintsMode m = c.mints_mode == "taut"   ? MintsMode::tautologies
                  : c.mints_mode == "self" ? MintsMode::self_check
                  : c.mints_mode == "both" ? MintsMode::both
                                           : throw UsageError("--mints-mode: unknown mode '" + c.mints_mode + "'");
    rep = mints_harden_fuzz(*suspect, c.size, m, fopt);
  } else {
    Suspect gold = builtin_suspect(need_prover("--gold", c.gold), popt);
    if (c.mode == "gold") {
      Family fam = need_family("--family", c.family.empty() ? "impl-all" : c.family);
      if (!family_has_formulas(fam)) throw UsageError("--family: '" + c.family + "' does not produce formulas");
      try {
        rep = c.upto ? gold_test_upto(fam, c.size, gold, *suspect, fopt) : gold_test(fam, c.size, gold, *suspect, fopt);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    } else if (c.mode == "random") {
      rep = random_gold_test(c.size, c.count, gold, *suspect, fopt);
    } else {
      throw UsageError("--mode: unknown fuzz mode '" + c.mode + "'");
    }
    if (c.minimize) {
      std::vector<Discrepancy> small;
      for (const auto& d : rep.discrepancies) {
        auto m = minimize(d, gold, *suspect);
        small.push_back(m ? *m : d);
      }
      rep.discrepancies = std::move(small);
    }
  }
  report_fuzz(rep, out, err);
  return rep.discrepancies.empty() ? 0 : 1;
}

inline int cmd_verify(const CliConfig& c, std::ostream& out) {
  std::map<Family, std::size_t> sizes;
  if (c.families.empty()) {
    for (Family f : default_verify_families()) sizes[f] = c.max ? c.max : default_verify_size(f);
  } else {
    for (const auto& name : c.families) {
      Family f = need_family("--family", name);
      if (!find_known_sequence(f)) throw UsageError("--family: no published sequence for '" + name + "'");
      sizes[f] = c.max ? c.max : default_verify_size(f);
    }
  }
  CountOptions opt;
  opt.seconds = c.seconds;
  CountReport rep = verify_counts(sizes, opt);
  write_count_report(out, rep);
  bool mismatch = std::any_of(rep.checks.begin(), rep.checks.end(), [](const CountCheck& k) { return k.actual && !k.match(); });
  return mismatch ? 1 : 0;
}

inline int cmd_bench(const CliConfig& c, std::ostream& out) {
  std::vector<ProverId> ids;
  for (const auto& p : c.provers) ids.push_back(need_prover("--prover", p));
  BenchOptions opt;
  opt.budget = c.budget;
  opt.repeats = std::max(1U, c.repeats);
  opt.jobs = std::max(1U, c.jobs);
  write_bench_tsv(out, bench(ids, c.sizes.empty() ? std::vector<std::size_t>{13} : c.sizes, opt));
  return 0;
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::istream& in = std::cin, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Generators, transforms and provers for intuitionistic propositional logic", "ipcheck"};
  app.require_subcommand(1);
  CliConfig c;

  auto* gen = app.add_subcommand("gen", "All formulas of a family at one size");
  gen->add_option("--family", c.family, "Family")->required();
  gen->add_option("--size", c.size, "Size")->required();
  gen->add_flag("--horn", c.horn_text, "Print Horn families in clause form");

  auto* count = app.add_subcommand("count", "Count sequence of a family, size<TAB>count");
  count->add_option("--family", c.family, "Family")->required();
  count->add_option("--max", c.max, "Largest size")->required();
  count->add_option("--seconds", c.seconds, "Wall-clock budget");

  auto* random = app.add_subcommand("random", "Random formulas, trees, partitions or typed terms");
  random->add_option("--kind", c.kind, "impl, tree, partition, sk-tree, sk-taut or typed-nf")->required();
  random->add_option("--size", c.size, "Size (internal nodes, elements or target lambda size)")->required();
  random->add_option("--seed", c.seed, "Seed");
  random->add_option("--count", c.count, "Number of samples");
  random->add_option("--min-type-size", c.min_type_size, "Smallest accepted type size for sk-taut");
  random->add_option("--retries", c.retries, "Rejection sampling budget");
  random->add_flag("--with-term", c.with_term, "Print the term before the type for typed-nf");

  auto* prove = app.add_subcommand("prove", "Prove one formula per input line");
  prove->add_option("--prover", c.prover, "Prover");
  prove->add_flag("--proof-term", c.proof_term, "Print the proof term (term prover)");
  prove->add_option("--budget", c.budget, "Search step budget per formula");
  prove->add_option("--seed", c.seed, "Seed for bad-random");
  prove->add_option("input", c.input, "Input file (default stdin)");

  auto* transform = app.add_subcommand("transform", "Rewrite one formula per input line");
  transform->add_option("--kind", c.kind, "horn, unhorn, nested-horn, mints, disjbicond or undisjbicond")->required();
  transform->add_option("input", c.input, "Input file (default stdin)");

  auto* fuzz = app.add_subcommand("fuzz", "Differential testing, JSON lines on stdout");
  fuzz->add_option("--mode", c.mode, "gold, random or mints");
  fuzz->add_option("--family", c.family, "Family for gold mode (default impl-all)");
  fuzz->add_option("--size", c.size, "Size; the largest size for mints mode")->required();
  fuzz->add_flag("--upto", c.upto, "Gold mode: every size up to --size");
  fuzz->add_option("--count", c.count, "Random mode: number of formulas");
  fuzz->add_option("--gold", c.gold, "Reference prover");
  fuzz->add_option("--suspect", c.suspect, "Prover under test");
  fuzz->add_option("--external", c.external, "Shell command of an external prover under test");
  fuzz->add_option("--timeout", c.timeout, "External prover timeout in seconds");
  fuzz->add_option("--mints-mode", c.mints_mode, "taut, self or both");
  fuzz->add_option("--seed", c.seed, "Seed");
  fuzz->add_option("--budget", c.budget, "Search step budget per formula");
  fuzz->add_option("--jobs", c.jobs, "Worker threads");
  fuzz->add_flag("--minimize", c.minimize, "Replace each discrepancy by a smallest one of the same kind");

  auto* verify = app.add_subcommand("verify-counts", "Compare counts with the published sequences");
  verify->add_option("--family", c.families, "Families (default: all with matching definitions)");
  verify->add_option("--max", c.max, "Largest size for every family");
  verify->add_option("--seconds", c.seconds, "Wall-clock budget per family");

  auto* bench = app.add_subcommand("bench", "Timing table, TSV");
  bench->add_option("--prover", c.provers, "Provers")->default_val(detail::prover_names(false));
  bench->add_option("--size", c.sizes, "Sizes");
  bench->add_option("--repeats", c.repeats, "Best of this many runs");
  bench->add_option("--budget", c.budget, "Search step budget per formula");
  bench->add_option("--jobs", c.jobs, "Provers timed concurrently");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ipcheck: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*gen) return detail::cmd_gen(c, out);
    if (*count) return detail::cmd_count(c, out, err);
    if (*random) return detail::cmd_random(c, out);
    if (*prove) return detail::cmd_prove(c, in, out, err);
    if (*transform) return detail::cmd_transform(c, in, out);
    if (*fuzz) return detail::cmd_fuzz(c, out, err);
    if (*verify) return detail::cmd_verify(c, out);
    if (*bench) return detail::cmd_bench(c, out);
  } catch (const UsageError& e) {
    err << "ipcheck: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "ipcheck: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "ipcheck: " << e.what() << '\n';
    return 2;
  } catch (const RetryBudgetExhausted& e) {
    err << "ipcheck: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ipcheck
