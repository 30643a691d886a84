#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mspace/machine.hpp"

namespace mspace {

using Fuel = std::uint64_t;

// A fuel-indexed semi-decision: run(fuel) reports whether the computation has
// halted within the given budget, and if so at which step. The contract is
//   - monotone: Halted at fuel f implies the same Halted(at_step) for f' >= f,
//   - deterministic: repeated calls with equal fuel agree.
// Suspended is "no halt yet", never "false".
class SemiDecider {
 public:
  // Known fate of a decider: some deciders can tell, at construction time,
  // the exact fuel at which they halt (or that they never will). The fate is
  // an optimization hint consumed by schedulers; run() remains the semantics.
  struct Fate {
    bool known = false;
    std::optional<Fuel> halts_at;  // meaningful only when known
    static Fate unknown() { return Fate{}; }
    static Fate never() { return Fate{true, std::nullopt}; }
    static Fate at(Fuel f) { return Fate{true, f}; }
  };

  using RunFn = std::function<std::optional<Fuel>(Fuel)>;

  SemiDecider() : SemiDecider(never()) {}
  explicit SemiDecider(RunFn fn) : run_(std::move(fn)), fate_(Fate::unknown()) {}
  SemiDecider(RunFn fn, Fate fate) : run_(std::move(fn)), fate_(fate) {}

  // Halts at exactly the given step (step >= 1 unless the computation is
  // trivially complete, in which case 0 is allowed).
  static SemiDecider halts_at(Fuel step) {
    return SemiDecider(
        [step](Fuel fuel) -> std::optional<Fuel> {
          if (fuel >= step) return step;
          return std::nullopt;
        },
        Fate::at(step));
  }

  static SemiDecider never() {
    return SemiDecider([](Fuel) -> std::optional<Fuel> { return std::nullopt; },
                       Fate::never());
  }

  std::optional<Fuel> run(Fuel fuel) const { return run_(fuel); }
  const Fate& fate() const { return fate_; }

  // Smallest fuel at which the decider halts, or nullopt if it stays
  // suspended up to `limit`. Uses the fate when available.
  std::optional<Fuel> first_halt(Fuel limit) const {
    if (fate_.known) {
      if (fate_.halts_at && *fate_.halts_at <= limit) return fate_.halts_at;
      return std::nullopt;
    }
    return run_(limit);
  }

 private:
  RunFn run_;
  Fate fate_;
};

// A point of the power of Sierpinski space over the generator set: assigns to
// each generator a semi-decider. Models both embedded concrete points and the
// finite-support points fed to box tests. Queries are pure and re-entrant.
class GeneralizedPoint {
 public:
  using QueryFn = std::function<SemiDecider(const GeneratorId&)>;

  GeneralizedPoint() = default;
  explicit GeneralizedPoint(QueryFn q) : query_(std::move(q)) {}

  // Halts (in one step) exactly on members of the finite set F.
  static GeneralizedPoint finite(std::vector<GeneratorId> members) {
    auto set = std::make_shared<FormalMeet>(std::move(members));
    return GeneralizedPoint([set](const GeneratorId& g) {
      return set->contains(g) ? SemiDecider::halts_at(1) : SemiDecider::never();
    });
  }
  static GeneralizedPoint finite(const FormalMeet& members) {
    return finite(members.generators());
  }
  static GeneralizedPoint finite(std::initializer_list<GeneratorId> members) {
    return finite(std::vector<GeneratorId>(members));
  }

  // Halts (in one step) exactly on generators satisfying the predicate; the
  // intensional form of a finite point, usable for infinite sets.
  static GeneralizedPoint of_predicate(std::function<bool(const GeneratorId&)> pred) {
    return GeneralizedPoint([pred = std::move(pred)](const GeneratorId& g) {
      return pred(g) ? SemiDecider::halts_at(1) : SemiDecider::never();
    });
  }

  SemiDecider query(const GeneratorId& g) const { return query_(g); }

 private:
  QueryFn query_;
};

}  // namespace mspace
