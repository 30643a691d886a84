#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mspace/quantifier.hpp"
#include "mspace/runtime.hpp"
#include "mspace/spaces.hpp"

namespace mspace {

struct UnsupportedOperationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An open of the space presented observationally: a semi-decider per concrete
// point. Two opens are compared only by sampling.
struct OpenOnX {
  std::function<SemiDecider(const ConcretePoint&)> accept;
};

// A point of the dcpo of partial binary assignments: each index is 0, 1 or
// undefined (querying an undefined index suspends). Queries are pure.
class PartialFunctionPoint {
 public:
  using Fn = std::function<std::optional<bool>(std::uint64_t)>;

  explicit PartialFunctionPoint(Fn fn) : fn_(std::move(fn)) {}

  // Defined exactly on the indices assigned by the finite map.
  static PartialFunctionPoint from_assignments(std::vector<std::pair<std::uint64_t, bool>> as) {
    return PartialFunctionPoint([as = std::move(as)](std::uint64_t i) -> std::optional<bool> {
      for (const auto& [idx, bit] : as)
        if (idx == i) return bit;
      return std::nullopt;
    });
  }

  // The total point behind a concrete binary stream.
  static PartialFunctionPoint total(const ConcretePoint& x) {
    return PartialFunctionPoint([x](std::uint64_t i) -> std::optional<bool> { return x.digit(i); });
  }

  std::optional<bool> at(std::uint64_t i) const { return fn_(i); }

 private:
  Fn fn_;
};

// A predicate on partial points, fuel-indexed. For the section laws to hold
// it must be monotone both in fuel and in the definedness of its argument.
using OpenPredicate = std::function<SemiDecider(const PartialFunctionPoint&)>;

// The quotient from machines to opens: a machine is sent to the open that
// accepts exactly the points it halts on.
inline OpenOnX quotient_q(const MachineProcess& mp, const Space& space) {
  return OpenOnX{[mp, space](const ConcretePoint& x) {
    return evaluate(mp, space.point_embed(x));
  }};
}

namespace detail {

// Finite consistent digit assignments coded in ternary: digit i is absent,
// zero or one according to the i-th ternary digit of the code.
inline std::vector<std::pair<std::uint64_t, bool>> decode_assignment(std::uint64_t code) {
  std::vector<std::pair<std::uint64_t, bool>> out;
  for (std::uint64_t i = 0; code; ++i, code /= 3) {
    const auto t = code % 3;
    if (t == 1) out.emplace_back(i, false);
    if (t == 2) out.emplace_back(i, true);
  }
  return out;
}

}  // namespace detail

// The section of the quotient for the digit presentation: the open u is sent
// to a machine that dovetails u over every finite consistent digit
// assignment, emitting the assignment's meet as a branch once u halts on the
// matching partial point. Its box test against p_F halts exactly when u
// halts on the partial point of some consistent assignment inside F.
inline MachineProcess section_s_cantor(const OpenPredicate& u) {
  auto slots = [u](std::uint64_t n) -> MachineProcess::Slot {
    const auto [code, fuel] = detail::cantor_unpair(n);
    const auto assignment = detail::decode_assignment(code);
    const PartialFunctionPoint f = PartialFunctionPoint::from_assignments(assignment);
    if (!u(f).run(fuel)) return MachineProcess::Slot::skip();
    std::vector<GeneratorId> gens;
    gens.reserve(assignment.size());
    for (const auto& [idx, one] : assignment) gens.push_back(GeneratorId::digit(idx, one));
    return MachineProcess::Slot::mk_branch(FormalMeet(std::move(gens)));
  };
  return MachineProcess::enumerated(std::move(slots));
}

inline MachineProcess section_s(const Space& space, const OpenPredicate& u) {
  if (space.kind() != SpaceKind::CantorDigits)
    throw UnsupportedOperationError("the section is implemented for cantor-digits only");
  return section_s_cantor(u);
}

// Observational check of the section laws at the given samples and fuel:
//   (a) evaluating the section's machine on an embedded point agrees with u
//       on the total point behind it, and
//   (b) the quotient of the section's machine agrees with u on every sample.
// Both comparisons are halted-versus-suspended at the same fuel; the caller
// picks a fuel large enough for the predicates and samples at hand.
struct SectionLawReport {
  struct Sample {
    bool evaluation_law = false;  // (a)
    bool quotient_law = false;    // (b)
    bool u_halted = false;
  };
  std::vector<Sample> samples;
  bool all_ok = true;
};

inline SectionLawReport check_section_laws(const OpenPredicate& u,
                                           const std::vector<ConcretePoint>& sample_points,
                                           Fuel fuel) {
  Space space(SpaceKind::CantorDigits);
  const MachineProcess s_u = section_s_cantor(u);
  const OpenOnX q_s_u = quotient_q(s_u, space);

  SectionLawReport report;
  for (const auto& x : sample_points) {
    SectionLawReport::Sample s;
    const bool rhs = u(PartialFunctionPoint::total(x)).run(fuel).has_value();
    const bool lhs_eval = evaluate(s_u, space.point_embed(x)).run(fuel).has_value();
    const bool lhs_quot = q_s_u.accept(x).run(fuel).has_value();
    s.u_halted = rhs;
    s.evaluation_law = lhs_eval == rhs;
    s.quotient_law = lhs_quot == rhs;
    report.all_ok = report.all_ok && s.evaluation_law && s.quotient_law;
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace mspace
