#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "mspace/cli.hpp"
#include "schema_check.hpp"
#include "testutil.hpp"

using namespace mspace;
using testutil::Rng;
using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_binary(const std::string& cmdline) {
  RunResult r;
  FILE* p = popen((cmdline + " 2>&1").c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct CorpusLine {
  std::string command, space, expr;
};

std::vector<CorpusLine> load_corpus(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<CorpusLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    REQUIRE(t1 != std::string::npos);
    REQUIRE(t2 != std::string::npos);
    lines.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string transcript(const std::string& bin, const std::vector<CorpusLine>& corpus,
                       bool json) {
  std::string out;
  for (const auto& c : corpus) {
    const std::string cmd = bin + " " + c.command + " --space " + c.space +
                            " --fuel 20000" + (json ? " --json" : "") + " '" + c.expr + "'";
    const auto r = run_binary(cmd);
    out += std::to_string(r.exit_code) + "\t" + r.out;
    if (out.empty() || out.back() != '\n') out += "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("parse: named cases") {
  const auto m = parse_machine("(z0 & u1) | u2");
  REQUIRE(m.branches().size() == 2);
  CHECK(m.branches()[0].size() == 2);
  CHECK(m.branches()[1].size() == 1);

  const auto mi = parse_machine("i(1/3,2/3) | i(0,1/2)");
  CHECK(mi.branches().size() == 2);

  CHECK_THROWS_AS(parse_machine("z0 &"), ParseError);
  CHECK_THROWS_AS(parse_machine("z0 | | u0"), ParseError);
  CHECK_THROWS_AS(parse_machine("i(1/2,1/3)"), ParseError);
  CHECK_THROWS_AS(parse_machine("l\"012\""), ParseError);
  CHECK_THROWS_AS(parse_machine(""), ParseError);

  CHECK(parse_machine("T") == FormalMachine::top());
  CHECK(parse_machine("F") == FormalMachine::bottom());

  // '&' distributes over '|'
  const auto d = parse_machine("(z0 | u0) & z1");
  CHECK(d == FormalMachine({FormalMeet({GeneratorId::digit(0, false), GeneratorId::digit(1, false)}),
                            FormalMeet({GeneratorId::digit(0, true), GeneratorId::digit(1, false)})}));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_machine("z0 &\n& u0");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 1);
  }
}

TEST_CASE("print-parse round trip on normal forms", "[property]") {
  Rng rng(20240825);
  for (const auto kind :
       {SpaceKind::CantorDigits, SpaceKind::CantorPrefix, SpaceKind::UnitInterval}) {
    Space sp(kind);
    for (int i = 0; i < 300; ++i) {
      const FormalMachine m = normalize(testutil::random_machine(sp, rng, 8, 4, 3));
      CHECK(parse_machine(to_dsl(m)) == m);
    }
  }
  CHECK(parse_machine(to_dsl(FormalMachine::bottom())) == FormalMachine::bottom());
  CHECK(parse_machine(to_dsl(FormalMachine::top())) == FormalMachine::top());
}

TEST_CASE("run_command: named cases and exit codes") {
  RunConfig cfg;
  cfg.space = SpaceKind::CantorDigits;

  auto covers = run_command("covers", cfg, "z0 | u0");
  CHECK(covers.exit_code == kExitOk);
  CHECK(covers.output == "true");

  cfg.fuel = 1000;
  auto fa = run_command("forall", cfg, "z0");
  CHECK(fa.exit_code == kExitOk);
  CHECK(fa.output == "SUSPENDED(fuel-exhausted, 1000)");

  cfg.space = SpaceKind::UnitInterval;
  auto ci = run_command("covers", cfg, "i(0,1/2) | i(1/2,1)");
  CHECK(ci.exit_code == kExitOk);
  CHECK(ci.output == "false");

  auto mismatch = run_command("covers", cfg, "z0 | u0");
  CHECK(mismatch.exit_code == kExitMismatch);

  auto syntax = run_command("covers", cfg, "z0 &");
  CHECK(syntax.exit_code == kExitSyntax);

  cfg.space = SpaceKind::CantorDigits;
  auto norm = run_command("normalize", cfg, "z0 | (z0 & u1)");
  CHECK(norm.exit_code == kExitOk);
  CHECK(norm.output == "z0");

  auto search = run_command("search", cfg, "z0 & u0");
  CHECK(search.exit_code == kExitOk);
  CHECK(search.output == "none");

  auto search2 = run_command("search", cfg, "(z0 & u0) | z1");
  CHECK(search2.exit_code == kExitOk);
  CHECK(search2.output.substr(0, 9) == "witness: ");
}

TEST_CASE("json outputs validate against the checked-in schema") {
  const json schema = json::parse(read_file(env_or(
      "MSPACE_SCHEMA", std::string(PROJECT_SOURCE_DIR) + "/schema/cli-output.schema.json")));
  RunConfig cfg;
  cfg.json = true;
  cfg.fuel = 2000;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"covers", "z0 | u0"}, {"forall", "z0"},         {"exists", "z0 & u1"},
      {"normalize", "T"},    {"search", "(z0 & u0) | z1"}, {"search", "z0 & u0"},
  };
  for (const auto& [cmd, expr] : cases) {
    const auto out = run_command(cmd, cfg, expr);
    REQUIRE(out.exit_code == kExitOk);
    const json j = json::parse(out.output);
    INFO(cmd << " " << expr << " -> " << out.output);
    CHECK(schema_check::validate(schema, j));
    CHECK(j["command"] == cmd);
    CHECK(j["input"] == expr);
  }
}

TEST_CASE("cli covers output equals library covers over the golden corpus") {
  const std::string dir = env_or("MSPACE_GOLDEN_DIR", "tests/golden");
  for (const auto* name : {"corpus_cantor-digits.txt", "corpus_cantor-prefix.txt",
                           "corpus_interval.txt"}) {
    const auto corpus = load_corpus(dir + "/" + name);
    std::size_t covers_lines = 0;
    for (const auto& c : corpus) {
      if (c.command != "covers") continue;
      ++covers_lines;
      RunConfig cfg;
      cfg.space = *space_from_name(c.space);
      const auto out = run_command("covers", cfg, c.expr);
      REQUIRE(out.exit_code == kExitOk);
      const bool lib = Space(cfg.space).covers(parse_machine(c.expr));
      CHECK(out.output == (lib ? "true" : "false"));
    }
    CHECK(covers_lines >= 50);
  }
}

TEST_CASE("golden transcripts are deterministic and match the committed files") {
  const std::string bin = env_or("MSPACE_BIN", "./build/tools/mspace");
  const std::string dir = env_or("MSPACE_GOLDEN_DIR", "tests/golden");
  const json schema = json::parse(read_file(env_or(
      "MSPACE_SCHEMA", std::string(PROJECT_SOURCE_DIR) + "/schema/cli-output.schema.json")));

  for (const auto* space : {"cantor-digits", "cantor-prefix", "interval"}) {
    const auto corpus = load_corpus(dir + "/corpus_" + space + ".txt");
    const std::string plain1 = transcript(bin, corpus, false);
    const std::string plain2 = transcript(bin, corpus, false);
    CHECK(plain1 == plain2);
    CHECK(plain1 == read_file(dir + "/expected_" + std::string(space) + ".txt"));

    const std::string json1 = transcript(bin, corpus, true);
    const std::string json2 = transcript(bin, corpus, true);
    CHECK(json1 == json2);
    CHECK(json1 == read_file(dir + "/expected_" + std::string(space) + ".json.txt"));

    // every successful json line validates
    std::istringstream lines(json1);
    std::string line;
    while (std::getline(lines, line)) {
      const auto tab = line.find('\t');
      REQUIRE(tab != std::string::npos);
      if (line.substr(0, tab) != "0") continue;
      CHECK(schema_check::validate(schema, json::parse(line.substr(tab + 1))));
    }
  }
}

TEST_CASE("cli reads the expression from stdin for '-'") {
  const std::string bin = env_or("MSPACE_BIN", "./build/tools/mspace");
  const auto r = run_binary("echo 'z0 | u0' | " + bin + " covers --space cantor-digits -");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "true\n");
}
