#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mspace/machine.hpp"

namespace mspace {

// A formal equality or inequality between machines over one generator
// universe. Relations are data: nothing here decides them.
struct Relation {
  enum Kind { Equality, Inequality };  // Inequality: lhs <= rhs
  FormalMachine lhs;
  FormalMachine rhs;
  Kind kind = Equality;
};

// A presented frame: an enumerated generator universe, an optional partial
// order on generators (poset presentations), a relation schema, and the
// space-specific decision procedures the quantifiers rely on. The three
// built-in presentations are produced by the spaces module; the type is open
// for other presentations.
struct Presentation {
  std::string name;

  // Total injective enumeration of the generator universe.
  std::function<GeneratorId(std::uint64_t)> generator;

  // Optional partial order (less-or-equal) used by poset presentations.
  std::optional<std::function<bool(const GeneratorId&, const GeneratorId&)>> order;

  // Finite window of the relation schema: all relations whose generators lie
  // among the first `n` enumerated generators.
  std::function<std::vector<Relation>(std::uint64_t n)> relations_up_to;

  // Exact deciders supplied per space: is the machine a cover of the space,
  // and is the finite meet positive (non-bottom)?
  std::function<bool(const FormalMachine&)> covers;
  std::function<bool(const FormalMeet&)> positive;
};

}  // namespace mspace
