#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <exception>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "exhaustive.hpp"
#include "formula.hpp"
#include "provers.hpp"
#include "random.hpp"
#include "transforms.hpp"

namespace ipcheck {

enum class Outcome { proved, not_proved, unknown };

inline std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::proved: return "PROVED";
    case Outcome::not_proved: return "NOT_PROVED";
    case Outcome::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

/// A prover seen from the harness: a name and a verdict per formula.
struct Suspect {
  std::string name;
  std::function<Outcome(const Formula&)> run;
  bool implicational_only = true;
};

inline Suspect builtin_suspect(ProverId id, ProveOptions opt = {}) {
  Suspect s;
  s.name = std::string(prover_name(id));
  s.implicational_only = !accepts_full_formulas(id);
  s.run = [id, opt](const Formula& f) {
    try {
      return prove(id, f, opt).proved ? Outcome::proved : Outcome::not_proved;
    } catch (const BudgetExceeded&) {
      return Outcome::unknown;
    }
  };
  return s;
}

/// A prover in another process. Each formula gets its own subprocess, which
/// reads one line and answers PROVED, NOT_PROVED or UNKNOWN.
class ExternalProver {
 public:
  explicit ExternalProver(std::string command, double timeout_seconds = 60.0)
      : command_(std::move(command)), timeout_(timeout_seconds) {}

  const std::string& command() const { return command_; }
  double timeout() const { return timeout_; }

  Outcome run(const std::string& line) const {
    int in[2];
    int out[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in) != 0) return Outcome::unknown;
    if (pipe2(out, O_CLOEXEC) != 0) {
      close(in[0]);
      close(in[1]);
      return Outcome::unknown;
    }
    pid_t pid = fork();
    if (pid < 0) {
      close(in[0]);
      close(in[1]);
      close(out[0]);
      close(out[1]);
      return Outcome::unknown;
    }
    if (pid == 0) {
      setpgid(0, 0);
      dup2(in[1], STDIN_FILENO);
      dup2(out[1], STDOUT_FILENO);
      int devnull = open("/dev/null", O_WRONLY);
      if (devnull >= 0) dup2(devnull, STDERR_FILENO);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    setpgid(pid, pid);
    close(in[1]);
    close(out[1]);
    std::string msg = line + "\n";
    const char* p = msg.data();
    std::size_t left = msg.size();
    while (left > 0) {
      ssize_t w = send(in[0], p, left, MSG_NOSIGNAL);
      if (w < 0 && errno == EINTR) continue;
      if (w <= 0) break;
      p += w;
      left -= static_cast<std::size_t>(w);
    }
    shutdown(in[0], SHUT_WR);

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(timeout_));
    std::string reply;
    bool timed_out = false;
    for (;;) {
      auto rest = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
      if (rest <= 0) {
        timed_out = true;
        break;
      }
      pollfd pfd{out[0], POLLIN, 0};
      int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(rest, 1 << 30)));
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) {
        timed_out = true;
        break;
      }
      if (r < 0) break;
      char buf[512];
      ssize_t n = read(out[0], buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      reply.append(buf, static_cast<std::size_t>(n));
      if (reply.find('\n') != std::string::npos) break;
    }
    kill(-pid, SIGKILL);
    close(in[0]);
    close(out[0]);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (timed_out) return Outcome::unknown;
    return parse_reply(reply);
  }

  static Outcome parse_reply(const std::string& reply) {
    std::string first = reply.substr(0, reply.find('\n'));
    auto b = first.find_first_not_of(" \t\r");
    auto e = first.find_last_not_of(" \t\r");
    first = b == std::string::npos ? "" : first.substr(b, e - b + 1);
    if (first == "PROVED") return Outcome::proved;
    if (first == "NOT_PROVED") return Outcome::not_proved;
    return Outcome::unknown;
  }

 private:
  std::string command_;
  double timeout_;
};

inline Suspect external_suspect(const ExternalProver& ext, bool implicational_only = false) {
  Suspect s;
  s.name = "external:" + ext.command();
  s.implicational_only = implicational_only;
  s.run = [ext](const Formula& f) { return ext.run(to_string(f)); };
  return s;
}

enum class DiscrepancyKind { wrong_success, wrong_failure };

inline std::string_view kind_name(DiscrepancyKind k) {
  return k == DiscrepancyKind::wrong_success ? "wrong_success" : "wrong_failure";
}

struct Discrepancy {
  Formula formula;
  std::optional<Formula> source_formula;
  DiscrepancyKind kind;
  std::string suspect;
  std::string gold;
  std::uint64_t seed = 0;
};

inline std::string to_json_line(const Discrepancy& d) {
  nlohmann::ordered_json j;
  j["formula"] = to_string(d.formula);
  if (d.source_formula) j["source_formula"] = to_string(*d.source_formula);
  j["kind"] = kind_name(d.kind);
  j["suspect"] = d.suspect;
  j["gold"] = d.gold;
  j["seed"] = d.seed;
  return j.dump();
}

/// A formula on which a prover gave no verdict.
struct UnknownOutcome {
  Formula formula;
  std::optional<Formula> source_formula;
  std::string prover;
};

struct FuzzReport {
  std::vector<Discrepancy> discrepancies;
  std::vector<UnknownOutcome> unknown;
  std::uint64_t tested = 0;

  std::size_t count(DiscrepancyKind k) const {
    return static_cast<std::size_t>(
        std::count_if(discrepancies.begin(), discrepancies.end(), [k](const Discrepancy& d) { return d.kind == k; }));
  }
};

struct FuzzOptions {
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::size_t chunk = 8192;
};

namespace detail {

/// Applies `fn` to every index, on up to `jobs` threads; results keep the
/// input order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned jobs, Fn&& fn) {
  std::vector<T> out(count);
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mu;
  unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  for (unsigned w = 0; w < n; ++w)
    workers.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count || failed) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct PairOutcome {
  Outcome suspect = Outcome::unknown;
  Outcome gold = Outcome::unknown;
};

inline void classify(const Formula& f, const std::optional<Formula>& source, const PairOutcome& o, const Suspect& s,
                     const Suspect& g, std::uint64_t seed, FuzzReport& rep) {
  ++rep.tested;
  if (o.suspect == Outcome::unknown) rep.unknown.push_back({f, source, s.name});
  if (o.gold == Outcome::unknown) rep.unknown.push_back({f, source, g.name});
  if (o.suspect == Outcome::unknown || o.gold == Outcome::unknown || o.suspect == o.gold) return;
  auto kind = o.suspect == Outcome::proved ? DiscrepancyKind::wrong_success : DiscrepancyKind::wrong_failure;
  rep.discrepancies.push_back({f, source, kind, s.name, g.name, seed});
}

inline void check_language(const Suspect& s, bool full) {
  if (full && s.implicational_only)
    throw std::invalid_argument(s.name + ": prover only accepts implicational formulas");
}

inline bool family_is_full(Family fam) { return fam == Family::full_all || fam == Family::full_canonical; }

}  // namespace detail

/// Runs both provers on a batch and classifies each disagreement.
inline void gold_test_batch(const std::vector<Formula>& batch, const Suspect& gold, const Suspect& suspect,
                            const FuzzOptions& opt, FuzzReport& rep) {
  auto outs = detail::parallel_map<detail::PairOutcome>(batch.size(), opt.jobs, [&](std::size_t i) {
    return detail::PairOutcome{suspect.run(batch[i]), gold.run(batch[i])};
  });
  for (std::size_t i = 0; i < batch.size(); ++i)
    detail::classify(batch[i], std::nullopt, outs[i], suspect, gold, opt.seed, rep);
}

/// Every formula of a family at one size, compared between two provers.
inline FuzzReport gold_test(Family fam, std::size_t size, const Suspect& gold, const Suspect& suspect,
                            const FuzzOptions& opt = {}) {
  bool full = detail::family_is_full(fam);
  detail::check_language(gold, full);
  detail::check_language(suspect, full);
  FuzzReport rep;
  std::vector<Formula> batch;
  batch.reserve(opt.chunk);
  for_each_family_formula(fam, size, [&](const Formula& f) {
    batch.push_back(f);
    if (batch.size() >= opt.chunk) {
      gold_test_batch(batch, gold, suspect, opt, rep);
      batch.clear();
    }
  });
  gold_test_batch(batch, gold, suspect, opt, rep);
  return rep;
}

/// Sizes 0..max_size of a family.
inline FuzzReport gold_test_upto(Family fam, std::size_t max_size, const Suspect& gold, const Suspect& suspect,
                                 const FuzzOptions& opt = {}) {
  FuzzReport all;
  for (std::size_t n = 0; n <= max_size; ++n) {
    FuzzReport r = gold_test(fam, n, gold, suspect, opt);
    all.tested += r.tested;
    all.discrepancies.insert(all.discrepancies.end(), r.discrepancies.begin(), r.discrepancies.end());
    all.unknown.insert(all.unknown.end(), r.unknown.begin(), r.unknown.end());
  }
  return all;
}

/// `count` random implicational formulas of the given size drawn from `opt.seed`.
inline FuzzReport random_gold_test(std::size_t size, std::size_t count, const Suspect& gold, const Suspect& suspect,
                                   const FuzzOptions& opt = {}) {
  Rng rng(opt.seed);
  std::vector<Formula> batch;
  batch.reserve(count);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(random_impl_formula(size, rng));
  FuzzReport rep;
  gold_test_batch(batch, gold, suspect, opt, rep);
  return rep;
}

/// Smallest formula, by exhaustive search upward from size 0, on which the
/// two provers disagree the same way as in `d`. Searches implicational
/// formulas up to `max_size`, or canonical full formulas when `d` is not
/// implicational. The original formula is kept as the source.
inline std::optional<Discrepancy> minimize(const Discrepancy& d, const Suspect& gold, const Suspect& suspect,
                                           std::size_t max_size = 6) {
  bool full = !is_implicational(d.formula);
  Family fam = full ? Family::full_canonical : Family::impl_all;
  std::size_t limit = std::min<std::size_t>(max_size, d.formula.size());
  for (std::size_t n = 0; n <= limit; ++n) {
    std::optional<Discrepancy> found;
    for_each_family_formula(fam, n, [&](const Formula& f) {
      Outcome s = suspect.run(f);
      if (s == Outcome::unknown) return true;
      Outcome g = gold.run(f);
      if (g == Outcome::unknown || s == g) return true;
      auto kind = s == Outcome::proved ? DiscrepancyKind::wrong_success : DiscrepancyKind::wrong_failure;
      if (kind != d.kind) return true;
      found = Discrepancy{f, d.source_formula ? d.source_formula : std::optional<Formula>(d.formula), kind,
                          suspect.name, gold.name, d.seed};
      return false;
    });
    if (found) return found;
  }
  return std::nullopt;
}

enum class MintsMode { tautologies, self_check, both };

/// Feeds Mints-transformed formulas to a prover. In tautology mode every
/// type of a closed normal form up to `max_size` is transformed and must be
/// proved. In self-check mode the prover's verdict on each implicational
/// formula up to `max_size` is the reference for its verdict on the
/// transformed formula.
inline FuzzReport mints_harden_fuzz(const Suspect& suspect, std::size_t max_size, MintsMode mode = MintsMode::both,
                                    const FuzzOptions& opt = {}) {
  FuzzReport rep;
  if (mode != MintsMode::self_check) {
    Suspect gold{"impl-taut", [](const Formula&) { return Outcome::proved; }, false};
    for (std::size_t n = 1; n <= max_size; ++n) {
      std::vector<Formula> src;
      for_each_impl_tautology(n, [&](const Formula& f) { src.push_back(f); });
      auto outs = detail::parallel_map<Outcome>(src.size(), opt.jobs, [&](std::size_t i) { return suspect.run(mints(src[i])); });
      for (std::size_t i = 0; i < src.size(); ++i)
        detail::classify(mints(src[i]), src[i], {outs[i], Outcome::proved}, suspect, gold, opt.seed, rep);
    }
  }
  if (mode != MintsMode::tautologies) {
    Suspect self{suspect.name + ":source", suspect.run, suspect.implicational_only};
    for (std::size_t n = 0; n <= max_size; ++n) {
      std::vector<Formula> src;
      for_each_impl_formula(n, [&](const Formula& f) { src.push_back(f); });
      auto outs = detail::parallel_map<detail::PairOutcome>(src.size(), opt.jobs, [&](std::size_t i) {
        return detail::PairOutcome{suspect.run(mints(src[i])), suspect.run(src[i])};
      });
      for (std::size_t i = 0; i < src.size(); ++i)
        detail::classify(mints(src[i]), src[i], outs[i], suspect, self, opt.seed, rep);
    }
  }
  return rep;
}

/// A published count sequence; values[i] is the count at size start + i.
struct KnownSequence {
  Family family;
  std::size_t start;
  std::vector<std::uint64_t> values;
};

inline const std::vector<KnownSequence>& known_sequences() {
  static const std::vector<KnownSequence> v{
      {Family::impl_skeletons, 1, {1, 2, 5, 14, 42, 132, 429, 1430, 4862}},
      {Family::partitions, 1, {1, 2, 5, 15, 52, 203, 877, 4140, 21147}},
      {Family::impl_all, 0, {1, 2, 10, 75, 728, 8526, 115764, 1776060, 30240210}},
      {Family::impl_provable, 0, {0, 1, 3, 24, 201, 2201, 27406, 391379, 6215192}},
      {Family::impl_taut, 1, {1, 2, 3, 7, 17, 43, 129, 389, 1245, 4274, 14991, 55289}},
      {Family::horn, 1, {1, 2, 5, 14, 42, 132, 429, 1430, 4862}},
      {Family::sorted_horn, 1, {1, 2, 4, 9, 22, 57, 154, 429, 1223, 3550, 10455, 31160, 93802, 284789}},
      {Family::horn3, 0, {1, 1, 2, 5, 13, 37, 109, 331, 1027, 3241, 10367, 33531, 109463}},
      {Family::sorted_horn3, 1, {1, 2, 4, 8, 20, 47, 122, 316, 845, 2284, 6264, 17337, 48424, 136196, 385548}},
      {Family::uninhab_tree, 0, {1, 0, 1, 1, 4, 7, 23, 53, 163, 432, 1306}},
      {Family::uninhab_vars, 0, {0, 1, 1, 4, 9, 30, 122, 528, 2517, 12951, 71455}},
  };
  return v;
}

inline const KnownSequence* find_known_sequence(Family fam) {
  for (const auto& s : known_sequences())
    if (s.family == fam) return &s;
  return nullptr;
}

/// Largest size checked by default.
inline std::size_t default_verify_size(Family fam) {
  switch (fam) {
    case Family::impl_skeletons: return 9;
    case Family::partitions: return 9;
    case Family::impl_all: return 6;
    case Family::impl_provable: return 6;
    case Family::impl_taut: return 12;
    case Family::horn: return 9;
    case Family::sorted_horn: return 7;
    case Family::horn3: return 8;
    case Family::sorted_horn3: return 8;
    case Family::uninhab_tree: return 8;
    case Family::uninhab_vars: return 7;
    default: return 0;
  }
}

/// Families checked when none are named: those whose definition agrees
/// with the published sequences.
inline std::vector<Family> default_verify_families() {
  return {Family::impl_skeletons, Family::partitions,   Family::impl_all,     Family::impl_provable, Family::impl_taut,
          Family::horn,           Family::sorted_horn,  Family::uninhab_tree, Family::uninhab_vars};
}

struct CountCheck {
  Family family;
  std::size_t size;
  std::uint64_t expected;
  std::optional<std::uint64_t> actual;  // empty when the budget ran out
  bool match() const { return actual && *actual == expected; }
};

struct CountReport {
  std::vector<CountCheck> checks;
  bool all_match() const {
    return std::all_of(checks.begin(), checks.end(), [](const CountCheck& c) { return c.match(); });
  }
};

/// Compares count_family against the published sequences.
inline CountReport verify_counts(const std::map<Family, std::size_t>& max_sizes, const CountOptions& opt = {}) {
  CountReport rep;
  for (const auto& [fam, max_n] : max_sizes) {
    const KnownSequence* known = find_known_sequence(fam);
    if (!known) continue;
    std::size_t last = std::min(max_n, known->start + known->values.size() - 1);
    if (last < known->start) continue;
    CountSequence seq = count_family(fam, last, opt);
    for (std::size_t n = known->start; n <= last; ++n) {
      CountCheck c{fam, n, known->values[n - known->start], std::nullopt};
      if (n < seq.values.size()) c.actual = seq.values[n];
      rep.checks.push_back(c);
    }
  }
  return rep;
}

inline void write_count_report(std::ostream& os, const CountReport& rep) {
  os << "family\tsize\texpected\tactual\tstatus\n";
  for (const auto& c : rep.checks) {
    os << family_name(c.family) << '\t' << c.size << '\t' << c.expected << '\t';
    if (c.actual)
      os << *c.actual;
    else
      os << '-';
    os << '\t' << (c.match() ? "match" : c.actual ? "mismatch" : "timeout") << '\n';
  }
}

struct BenchRow {
  std::string prover;
  std::size_t size;
  double positive = 0;  // seconds over the tautologies of this size
  double mix = 0;       // seconds over all implicational formulas of half the size
  std::uint64_t timeouts = 0;
  double total() const { return positive + mix; }
};

struct BenchOptions {
  std::uint64_t budget = 50'000'000;  // per formula
  unsigned repeats = 1;               // best of this many runs
  unsigned jobs = 1;                  // provers timed concurrently
};

namespace detail {

inline double time_suite(ProverId id, const std::vector<Formula>& suite, const ProveOptions& popt,
                         std::uint64_t& timeouts) {
  auto t0 = std::chrono::steady_clock::now();
  for (const auto& f : suite) {
    try {
      prove(id, f, popt);
    } catch (const BudgetExceeded&) {
      ++timeouts;
    }
  }
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Wall-clock time per prover and size: the tautologies of that size, and
/// all implicational formulas of half that size.
inline std::vector<BenchRow> bench(const std::vector<ProverId>& provers, const std::vector<std::size_t>& sizes,
                                   const BenchOptions& opt = {}) {
  std::vector<BenchRow> rows;
  if (provers.empty()) return rows;
  ProveOptions popt;
  popt.budget = opt.budget;
  for (std::size_t n : sizes) {
    std::vector<Formula> positive;
    std::vector<Formula> mix;
    for_each_impl_tautology(n, [&](const Formula& f) { positive.push_back(f); });
    for_each_impl_formula(n / 2, [&](const Formula& f) { mix.push_back(f); });
    std::vector<BenchRow> these;
    for (ProverId id : provers) these.push_back({std::string(prover_name(id)), n});
    for (unsigned r = 0; r < std::max(1U, opt.repeats); ++r) {
      auto runs = detail::parallel_map<BenchRow>(provers.size(), opt.jobs, [&](std::size_t i) {
        BenchRow b{these[i].prover, n};
        b.positive = detail::time_suite(provers[i], positive, popt, b.timeouts);
        b.mix = detail::time_suite(provers[i], mix, popt, b.timeouts);
        return b;
      });
      for (std::size_t i = 0; i < provers.size(); ++i)
        if (r == 0 || runs[i].total() < these[i].total()) these[i] = runs[i];
    }
    rows.insert(rows.end(), these.begin(), these.end());
  }
  return rows;
}

inline void write_bench_tsv(std::ostream& os, const std::vector<BenchRow>& rows) {
  if (rows.empty()) return;
  os << "Prover\tSize\tPositive\tMix\tTotal\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.prover << '\t' << r.size;
    for (double v : {r.positive, r.mix, r.total()}) {
      std::snprintf(buf, sizeof buf, "\t%.3f", v);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace ipcheck
