#include <catch2/catch_amalgamated.hpp>

#include "mspace/exponential.hpp"
#include "testutil.hpp"

using namespace mspace;
using testutil::Rng;

namespace {
const GeneratorId z0 = GeneratorId::digit(0, false);
const GeneratorId u0 = GeneratorId::digit(0, true);
const GeneratorId u1 = GeneratorId::digit(1, true);

// "digit i is b": halts after one query when defined and matching, suspends
// otherwise. Monotone in fuel and in definedness.
OpenPredicate digit_is(std::uint64_t i, bool b) {
  return [i, b](const PartialFunctionPoint& f) {
    const auto v = f.at(i);
    if (v && *v == b) return SemiDecider::halts_at(1);
    return SemiDecider::never();
  };
}

// "some digit among the first n is one"
OpenPredicate some_one_among(std::uint64_t n) {
  return [n](const PartialFunctionPoint& f) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto v = f.at(i);
      if (v && *v) return SemiDecider::halts_at(i + 1);
    }
    return SemiDecider::never();
  };
}

// accepted 3-bit prefixes: the open is the union of their cells
OpenPredicate cells_open(std::vector<std::string> accepted) {
  return [accepted = std::move(accepted)](const PartialFunctionPoint& f) {
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
}
}  // namespace

TEST_CASE("quotient of a machine accepts exactly its points") {
  Space sp(SpaceKind::CantorDigits);
  const auto open = quotient_q(compile(FormalMachine::of(z0)), sp);
  CHECK(open.accept(testutil::word_point("01")).run(10).has_value());
  CHECK_FALSE(open.accept(testutil::word_point("11")).run(10000).has_value());
}

TEST_CASE("quotient identifies machines equal up to absorption") {
  Space sp(SpaceKind::CantorDigits);
  const auto a = quotient_q(compile(FormalMachine::of(z0)), sp);
  const auto b = quotient_q(compile(FormalMachine({FormalMeet({z0}), FormalMeet({z0, u1})})), sp);
  for (const auto& w : testutil::all_words(3)) {
    const auto x = testutil::word_point(w);
    CHECK(a.accept(x).run(100).has_value() == b.accept(x).run(100).has_value());
  }
}

TEST_CASE("quotient of a cover halts on every sampled point") {
  Space sp(SpaceKind::CantorDigits);
  const auto open = quotient_q(compile(FormalMachine({FormalMeet({z0}), FormalMeet({u0})})), sp);
  for (const auto& w : testutil::all_words(3))
    CHECK(open.accept(testutil::word_point(w)).run(100).has_value());
}

TEST_CASE("section: box tests of named opens") {
  const auto s = section_s_cantor(digit_is(0, false));
  // p_{z0}: the assignment {0 -> 0} lies inside and u halts on it
  CHECK(test_box(s, GeneralizedPoint::finite({z0})).run(100).has_value());
  // p_{u0}: every consistent assignment inside {u0} has digit 0 undefined or one
  CHECK_FALSE(test_box(s, GeneralizedPoint::finite({u0})).run(20000).has_value());

  const auto s_top = section_s_cantor([](const PartialFunctionPoint&) {
    return SemiDecider::halts_at(1);
  });
  CHECK(test_box(s_top, GeneralizedPoint::finite(std::vector<GeneratorId>{})).run(100).has_value());

  const auto s_bot = section_s_cantor([](const PartialFunctionPoint&) {
    return SemiDecider::never();
  });
  CHECK_FALSE(test_box(s_bot, GeneralizedPoint::finite({z0, u1})).run(20000).has_value());
}

TEST_CASE("section is only defined for the digit presentation") {
  CHECK_THROWS_AS(section_s(Space(SpaceKind::UnitInterval), digit_is(0, false)),
                  UnsupportedOperationError);
  CHECK_NOTHROW(section_s(Space(SpaceKind::CantorDigits), digit_is(0, false)));
}

TEST_CASE("section laws: named samples") {
  const auto u = digit_is(0, false);
  const std::vector<ConcretePoint> pts{testutil::word_point("0"), testutil::word_point("10")};
  const auto report = check_section_laws(u, pts, 5000);
  REQUIRE(report.samples.size() == 2);
  CHECK(report.all_ok);
  CHECK(report.samples[0].u_halted);
  CHECK_FALSE(report.samples[1].u_halted);
}

TEST_CASE("section laws: a predicate of bounded depth at matched fuel") {
  const auto u = some_one_among(3);
  const std::vector<ConcretePoint> pts{testutil::word_point("0001", false),
                                       testutil::word_point("100")};
  const auto report = check_section_laws(u, pts, 3000);
  CHECK(report.all_ok);
  CHECK_FALSE(report.samples[0].u_halted);  // first three digits are zero
  CHECK(report.samples[1].u_halted);
}

TEST_CASE("section laws hold on randomized depth-bounded predicates", "[property]") {
  Rng rng(20240824);
  int cases = 0;
  for (int i = 0; i < 220; ++i) {
    // random set of accepted 3-cells
    std::vector<std::string> accepted;
    for (const auto& w : testutil::all_words(3))
      if (testutil::pick(rng, 0, 2) == 0) accepted.push_back(w);
    const auto u = cells_open(accepted);
    // random sample points of depth 5
    std::vector<ConcretePoint> pts;
    for (int s = 0; s < 4; ++s) {
      const auto w = testutil::all_words(5)[testutil::pick(rng, 0, 31)];
      pts.push_back(testutil::word_point(w));
    }
    const auto report = check_section_laws(u, pts, 2500);
    CHECK(report.all_ok);
    ++cases;
  }
  CHECK(cases == 220);
}
