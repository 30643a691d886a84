// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mspace/exponential.hpp"
#include "mspace/finite_frame.hpp"
#include "mspace/mspace.hpp"
#include "schema_check.hpp"
#include "testutil.hpp"

using namespace mspace;
using testutil::Rng;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %d [%s]: %s (%s)\n", criterion, name.c_str(), ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

// ---------------------------------------------------------------- criterion 1

std::optional<std::uint64_t> branch_family_slot(const Space& sp, const FormalMachine& n) {
  IndexFamily fam;
  for (const auto& b : n.branches()) {
    IndexSet f;
    for (const auto& g : b.generators()) {
      const auto i = sp.generator_index(g);
      if (!i) return std::nullopt;
      f.push_back(static_cast<std::uint32_t>(*i));
    }
    fam.push_back(std::move(f));
  }
  return family_slot(sp, fam);
}

void criterion1() {
  const auto start = Clock::now();
  std::uint64_t mismatches = 0, covered = 0, total = 0;
  for (const auto kind :
       {SpaceKind::CantorDigits, SpaceKind::CantorPrefix, SpaceKind::UnitInterval}) {
    Space sp(kind);
    Rng rng(0xA11CE + static_cast<int>(kind));
    for (int i = 0; i < 1000; ++i) {
      const FormalMachine m = testutil::random_machine(sp, rng, 4, 4, 3);
      const FormalMachine n = normalize(m);
      ++total;
      if (sp.covers(m)) {
        ++covered;
        const auto slot = branch_family_slot(sp, n);
        if (!slot) { ++mismatches; continue; }
        const Fuel bound = forall_fuel_bound(sp, n.branches().size(), *slot);
        const auto r = forall_run(sp, compile(m), bound);
        if (!r.halted_at || *r.halted_at > bound) ++mismatches;
      } else {
        if (forall_run(sp, compile(m), 1'000'000).halted_at) ++mismatches;
      }
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << total << " machines, " << covered << " covers, " << mismatches << " mismatches, "
    << t << " s";
  report(1, "algorithm-1 correctness", mismatches == 0 && t < 60.0, d.str());
}

// ---------------------------------------------------------------- criterion 2

void criterion2() {
  const auto start = Clock::now();
  std::uint64_t mismatches = 0, checked = 0;

  // digits over the pairs {0,1}: deterministic sample of the 2^16 branch-set
  // combinations over the 16 subsets of {z0,u0,z1,u1}
  {
    Space sp(SpaceKind::CantorDigits);
    std::vector<FormalMeet> subsets;
    std::vector<GeneratorId> gens{GeneratorId::digit(0, false), GeneratorId::digit(0, true),
                                  GeneratorId::digit(1, false), GeneratorId::digit(1, true)};
    for (std::uint32_t m = 0; m < 16; ++m) {
      std::vector<GeneratorId> gs;
      for (std::uint32_t b = 0; b < 4; ++b)
        if (m >> b & 1) gs.push_back(gens[b]);
      subsets.push_back(FormalMeet(std::move(gs)));
    }
    std::uint64_t taken = 0;
    for (std::uint32_t code = 0; code < 65536 && taken < 5000; code += 13, ++taken) {
      std::vector<FormalMeet> branches;
      for (std::uint32_t b = 0; b < 16; ++b)
        if (code >> b & 1) branches.push_back(subsets[b]);
      const FormalMachine m{branches};
      ++checked;
      if (sp.covers(m) != testutil::oracle_covers_digits(m)) ++mismatches;
    }
  }

  // digits at one pair: full agreement with the frame-quotient top test
  {
    Space sp(SpaceKind::CantorDigits);
    const GeneratorId z0g = GeneratorId::digit(0, false), u0g = GeneratorId::digit(0, true);
    const FreeFiniteFrame ff({z0g, u0g});
    const std::vector<std::pair<std::size_t, std::size_t>> rels{
        {ff.denote(meet(FormalMachine::of(z0g), FormalMachine::of(u0g))), ff.frame().bottom()},
        {ff.denote(join(FormalMachine::of(z0g), FormalMachine::of(u0g))), ff.frame().top()}};
    const Congruence c = congruence_closure(ff.frame(), rels);
    const std::vector<FormalMeet> subsets{FormalMeet(), FormalMeet({z0g}), FormalMeet({u0g}),
                                          FormalMeet({z0g, u0g})};
    for (std::uint32_t code = 0; code < 16; ++code) {
      std::vector<FormalMeet> branches;
      for (std::uint32_t b = 0; b < 4; ++b)
        if (code >> b & 1) branches.push_back(subsets[b]);
      const FormalMachine m{branches};
      ++checked;
      if (sp.covers(m) != c.same(ff.denote(m), ff.frame().top())) ++mismatches;
    }
  }

  // prefix machines over words of length <= 2, sampled deterministically
  {
    Space sp(SpaceKind::CantorPrefix);
    Rng rng(0xBEEF);
    for (int i = 0; i < 5000; ++i) {
      std::vector<FormalMeet> branches;
      const auto nb = testutil::pick(rng, 0, 5);
      for (std::uint64_t b = 0; b < nb; ++b) {
        std::vector<GeneratorId> gs;
        const auto sz = testutil::pick(rng, 1, 3);
        for (std::uint64_t s = 0; s < sz; ++s)
          gs.push_back(sp.generator(testutil::pick(rng, 0, 6)));
        branches.push_back(FormalMeet(std::move(gs)));
      }
      const FormalMachine m{branches};
      ++checked;
      if (sp.covers(m) != testutil::oracle_covers_prefix(m)) ++mismatches;
    }
  }

  // all 2^8 subsets of a fixed pool of eight rational intervals
  {
    Space sp(SpaceKind::UnitInterval);
    auto mk = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
      return GeneratorId::interval(make_rational(a, b), make_rational(c, d));
    };
    const std::vector<GeneratorId> pool{mk(0, 1, 1, 2), mk(1, 2, 1, 1), mk(0, 1, 1, 3),
                                        mk(1, 4, 3, 4), mk(2, 3, 1, 1), mk(1, 3, 2, 3),
                                        mk(0, 1, 1, 1), mk(3, 4, 7, 8)};
    for (std::uint32_t code = 0; code < 256; ++code) {
      std::vector<FormalMeet> branches;
      for (std::uint32_t b = 0; b < 8; ++b)
        if (code >> b & 1) branches.push_back(FormalMeet({pool[b]}));
      const FormalMachine m{branches};
      ++checked;
      if (sp.covers(m) != testutil::oracle_covers_interval(m)) ++mismatches;
    }
  }

  const double t = seconds_since(start);
  std::ostringstream d;
  d << checked << " machines, " << mismatches << " mismatches, " << t << " s";
  report(2, "cover-decider cross-validation", mismatches == 0 && t < 30.0, d.str());
}

// ---------------------------------------------------------------- criterion 3

void criterion3() {
  const auto start = Clock::now();
  bool ok = true;
  std::ostringstream d;

  // fixture values (hand enumeration, committed)
  std::map<std::string, std::string> fixture;
  {
    const std::string path =
        env_or("MSPACE_FIXTURES", std::string(PROJECT_SOURCE_DIR) + "/tests/fixtures") +
        "/frames.txt";
    std::ifstream in(path);
    if (!in.good()) {
      report(3, "finite-frame oracle sizes", false, "missing fixture " + path);
      return;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq != std::string::npos) fixture[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }

  auto families_csv = [](const FreeFiniteFrame& ff) {
    std::string out;
    for (std::size_t i = 0; i < ff.families().size(); ++i) {
      if (i) out += ",";
      out += std::to_string(ff.families()[i]);
    }
    return out;
  };

  const FreeFiniteFrame f1({GeneratorId::opaque(0)});
  const FreeFiniteFrame f2({GeneratorId::opaque(0), GeneratorId::opaque(1)});
  ok = ok && f1.frame().size() == 3 && fixture["free1_size"] == "3";
  ok = ok && families_csv(f1) == fixture["free1_families"];
  ok = ok && f2.frame().size() == 6 && fixture["free2_size"] == "6";
  ok = ok && families_csv(f2) == fixture["free2_families"];

  auto quotient_size = [](std::size_t pairs) {
    std::vector<GeneratorId> gens;
    for (std::size_t i = 0; i < pairs; ++i) {
      gens.push_back(GeneratorId::digit(i, false));
      gens.push_back(GeneratorId::digit(i, true));
    }
    const FreeFiniteFrame ff(gens);
    std::vector<std::pair<std::size_t, std::size_t>> rels;
    for (std::size_t i = 0; i < pairs; ++i) {
      const auto z = FormalMachine::of(gens[2 * i]);
      const auto u = FormalMachine::of(gens[2 * i + 1]);
      rels.emplace_back(ff.denote(meet(z, u)), ff.frame().bottom());
      rels.emplace_back(ff.denote(join(z, u)), ff.frame().top());
    }
    return quotient_frame(ff.frame(), congruence_closure(ff.frame(), rels)).size();
  };
  const auto q1 = quotient_size(1), q2 = quotient_size(2);
  ok = ok && std::to_string(q1) == fixture["cantor_quotient_pairs1"];
  ok = ok && std::to_string(q2) == fixture["cantor_quotient_pairs2"];
  ok = ok && q1 == 4 && q2 == 16;

  d << "free sizes 3/6, quotients " << q1 << "/" << q2 << ", " << seconds_since(start) << " s";
  report(3, "finite-frame oracle sizes", ok, d.str());
}

// ---------------------------------------------------------------- criterion 4

void criterion4() {
  const auto start = Clock::now();
  Rng rng(0xC0FFEE);
  int cases = 0, bad = 0;
  while (cases < 200) {
    std::vector<std::string> accepted;
    for (const auto& w : testutil::all_words(3))
      if (testutil::pick(rng, 0, 2) == 0) accepted.push_back(w);
    const OpenPredicate u = [accepted](const PartialFunctionPoint& f) {
      for (const auto& w : accepted) {
        bool all = true;
        for (std::size_t i = 0; i < w.size(); ++i) {
          const auto v = f.at(i);
          if (!v || *v != (w[i] == '1')) { all = false; break; }
        }
        if (all) return SemiDecider::halts_at(w.size());
      }
      return SemiDecider::never();
    };
    std::vector<ConcretePoint> pts;
    for (int s = 0; s < 3; ++s)
      pts.push_back(testutil::word_point(testutil::all_words(5)[testutil::pick(rng, 0, 31)]));
    const auto rep = check_section_laws(u, pts, 2500);
    if (!rep.all_ok) ++bad;
    cases += static_cast<int>(pts.size());
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << cases << " cases, " << bad << " failures, " << t << " s";
  report(4, "section laws", bad == 0 && t < 30.0, d.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
  const auto start = Clock::now();
  Rng rng(0x5EED);
  std::uint64_t mismatches = 0, cases = 0;
  double worst_d12 = 0;
  for (std::uint64_t d = 1; d <= 12; ++d) {
    const int trials = d <= 8 ? 10 : 4;
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t seed = rng();
      const std::uint64_t density = testutil::pick(rng, 0, 4);
      auto pred = [seed, density](const std::string& w) {
        std::uint64_t h = seed;
        for (char c : w) h = h * 1099511628211ull + static_cast<std::uint64_t>(c);
        return (h >> 7) % 97 < density;
      };
      const auto t0 = Clock::now();
      const auto found = cantor_search(pred, d);
      const double dt = seconds_since(t0);
      if (d == 12) worst_d12 = std::max(worst_d12, dt);
      std::optional<std::string> brute;
      for (const auto& w : testutil::all_words(d))
        if (pred(w)) { brute = w; break; }
      ++cases;
      if (found.has_value() != brute.has_value()) ++mismatches;
      if (found && !pred(*found)) ++mismatches;
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << cases << " searches, " << mismatches << " mismatches, worst d=12 case " << worst_d12
    << " s, total " << t << " s";
  report(5, "stream-search equivalence", mismatches == 0 && worst_d12 < 10.0, d.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
  const auto start = Clock::now();
  Space sp(SpaceKind::CantorDigits);
  Rng rng(0xFA1100);
  int mono_violations = 0, sched_violations = 0;
  for (int i = 0; i < 500; ++i) {
    const FormalMachine m = testutil::random_machine(sp, rng, 6, 4, 3);
    const std::size_t depth = testutil::digit_depth(m);
    const auto w =
        testutil::all_words(depth).at(testutil::pick(rng, 0, (std::uint64_t{1} << depth) - 1));
    const auto sd = evaluate(compile(m), sp.point_embed(testutil::word_point(w)));
    const Fuel f1 = testutil::pick(rng, 0, 12);
    const Fuel f2 = f1 + testutil::pick(rng, 0, 12);
    const auto r1 = sd.run(f1), r2 = sd.run(f2), r1b = sd.run(f1);
    if (r1 && (!r2 || *r2 != *r1)) ++mono_violations;
    if (r1.has_value() != r1b.has_value()) ++mono_violations;
  }
  for (int i = 0; i < 500; ++i) {
    const FormalMachine m = normalize(testutil::random_machine(sp, rng, 6, 4, 3));
    const auto mp = compile(m);
    const std::size_t k = mp.finite_branches()->size();
    std::vector<GeneratorId> f;
    for (std::uint64_t g = 0; g < 6; ++g)
      if (testutil::pick(rng, 0, 1)) f.push_back(sp.generator(g));
    const auto point = GeneralizedPoint::finite(FormalMeet{f});
    std::vector<std::uint32_t> order(k);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
    const Fuel bound = sufficient_box_fuel(k);
    if (evaluate(mp, point).run(bound).has_value() !=
        evaluate_with_order(mp, point, order).run(bound).has_value())
      ++sched_violations;
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << "monotonicity violations " << mono_violations << ", schedule violations "
    << sched_violations << ", " << t << " s";
  report(6, "runtime invariants", mono_violations == 0 && sched_violations == 0, d.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion7() {
  const auto start = Clock::now();
  Rng rng(0x5C077);
  int checked = 0, failuresHere = 0;
  while (checked < 500) {
    // random poset, its downset frame, a random congruence
    const std::size_t k = testutil::pick(rng, 1, 4);
    std::vector<std::vector<bool>> leq(k, std::vector<bool>(k));
    for (std::size_t a = 0; a < k; ++a) leq[a][a] = true;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (testutil::pick(rng, 0, 2) == 0) leq[a][b] = true;
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          if (leq[a][c] && leq[c][b]) leq[a][b] = true;
    bool anti = true;
    for (std::size_t a = 0; a < k && anti; ++a)
      for (std::size_t b = 0; b < k && anti; ++b)
        if (a != b && leq[a][b] && leq[b][a]) anti = false;
    if (!anti) continue;
    const FiniteFrame fr = FiniteFrame::downset_frame(leq);
    if (fr.size() > 12) continue;
    std::vector<std::pair<std::size_t, std::size_t>> rels;
    const auto nrel = testutil::pick(rng, 0, 2);
    for (std::uint64_t r = 0; r < nrel; ++r)
      rels.emplace_back(testutil::pick(rng, 0, fr.size() - 1),
                        testutil::pick(rng, 0, fr.size() - 1));
    const Congruence c = congruence_closure(fr, rels);
    if (!check_scott_quotient(fr, c)) ++failuresHere;
    ++checked;
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << checked << " frame/congruence pairs, " << failuresHere << " failures, " << t << " s";
  report(7, "scott-quotient finite check", failuresHere == 0, d.str());
}

// ---------------------------------------------------------------- criterion 8

struct BinRun {
  int exit_code = -1;
  std::string out;
};

BinRun run_binary(const std::string& cmdline) {
  BinRun r;
  FILE* p = popen((cmdline + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion8() {
  const auto start = Clock::now();
  const std::string bin = env_or("MSPACE_BIN", std::string(PROJECT_SOURCE_DIR) + "/build/tools/mspace");
  const std::string dir =
      env_or("MSPACE_GOLDEN_DIR", std::string(PROJECT_SOURCE_DIR) + "/tests/golden");
  const std::string schema_path =
      env_or("MSPACE_SCHEMA", std::string(PROJECT_SOURCE_DIR) + "/schema/cli-output.schema.json");

  nlohmann::json schema;
  {
    std::ifstream in(schema_path);
    if (!in.good()) {
      report(8, "cli golden corpus", false, "missing schema " + schema_path);
      return;
    }
    in >> schema;
  }

  bool ok = true;
  std::string why;
  int json_lines = 0;
  for (const auto* space : {"cantor-digits", "cantor-prefix", "interval"}) {
    std::ifstream in(dir + "/corpus_" + space + ".txt");
    if (!in.good()) { ok = false; why = "missing corpus"; break; }
    std::vector<std::array<std::string, 3>> corpus;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto t1 = line.find('\t'), t2 = line.find('\t', line.find('\t') + 1);
      corpus.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                        line.substr(t2 + 1)});
    }
    for (const bool json_mode : {false, true}) {
      auto transcript = [&]() {
        std::string out;
        for (const auto& c : corpus) {
          const auto r = run_binary(bin + " " + c[0] + " --space " + c[1] + " --fuel 20000" +
                                    (json_mode ? " --json" : "") + " '" + c[2] + "'");
          out += std::to_string(r.exit_code) + "\t" + r.out;
          if (out.back() != '\n') out += "\n";
        }
        return out;
      };
      const std::string t1 = transcript();
      const std::string t2 = transcript();
      if (t1 != t2) { ok = false; why = "transcripts differ between runs"; }
      const std::string expected_path = dir + "/expected_" + std::string(space) +
                                        (json_mode ? ".json.txt" : ".txt");
      std::ifstream exp(expected_path);
      if (!exp.good()) { ok = false; why = "missing " + expected_path; }
      else {
        std::ostringstream ss;
        ss << exp.rdbuf();
        if (ss.str() != t1) { ok = false; why = "transcript differs from " + expected_path; }
      }
      if (json_mode) {
        std::istringstream lines(t1);
        std::string l;
        while (std::getline(lines, l)) {
          const auto tab = l.find('\t');
          if (tab == std::string::npos || l.substr(0, tab) != "0") continue;
          ++json_lines;
          if (!schema_check::validate(schema, nlohmann::json::parse(l.substr(tab + 1)))) {
            ok = false;
            why = "schema violation: " + l;
          }
        }
      }
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << json_lines << " json lines validated, " << t << " s";
  if (!ok) d << "; " << why;
  report(8, "cli golden corpus", ok, d.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all criteria PASS\n");
  return 0;
}
