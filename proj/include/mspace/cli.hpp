#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "mspace/exponential.hpp"
#include "mspace/parser.hpp"
#include "mspace/quantifier.hpp"

namespace mspace {

// Exit codes of the command layer.
//   0: success, including a suspended semi-decision (a report, not a failure)
//   2: expression does not match the selected space
//   3: syntax error
//   4: budget or enumeration cap exceeded
enum : int {
  kExitOk = 0,
  kExitMismatch = 2,
  kExitSyntax = 3,
  kExitBudget = 4,
};

struct RunConfig {
  SpaceKind space = SpaceKind::CantorDigits;
  Fuel fuel = 1'000'000;
  QuantifierCaps caps;
  bool json = false;
};

struct CommandOutcome {
  int exit_code = kExitOk;
  std::string output;  // single line, newline-terminated by the caller
};

namespace detail {

inline std::optional<SpaceKind> machine_space(const FormalMachine& m) {
  for (const auto& b : m.branches())
    for (const auto& g : b.generators()) {
      if (g.is_digit()) return SpaceKind::CantorDigits;
      if (g.is_prefix()) return SpaceKind::CantorPrefix;
      if (g.is_interval()) return SpaceKind::UnitInterval;
      return std::nullopt;
    }
  return std::nullopt;  // bottom or pure top fit every space
}

inline std::string halt_text(const std::optional<Fuel>& halted, Fuel budget) {
  if (halted) return "HALTED(" + std::to_string(*halted) + ")";
  return "SUSPENDED(fuel-exhausted, " + std::to_string(budget) + ")";
}

}  // namespace detail

// Run one command against one expression. The output is a single line in
// plain mode, or one JSON object with fields {command, space, input, result,
// fuel_used} in json mode.
inline CommandOutcome run_command(const std::string& command, const RunConfig& cfg,
                                  const std::string& expr_text) {
  CommandOutcome out;
  nlohmann::json j{{"command", command}, {"space", space_name(cfg.space)},
                   {"input", expr_text}};

  auto finish = [&](const std::string& plain, const nlohmann::json& result,
                    Fuel fuel_used) {
    if (cfg.json) {
      j["result"] = result;
      j["fuel_used"] = fuel_used;
      out.output = j.dump();
    } else {
      out.output = plain;
    }
    return out;
  };

  try {
    const FormalMachine machine = parse_machine(expr_text);
    if (auto sk = detail::machine_space(machine); sk && *sk != cfg.space) {
      out.exit_code = kExitMismatch;
      out.output = "error: expression is for " + space_name(*sk) + ", not " +
                   space_name(cfg.space);
      return out;
    }
    Space space(cfg.space);

    if (command == "covers") {
      const bool c = space.covers(machine);
      return finish(c ? "true" : "false", c, 0);
    }
    if (command == "normalize") {
      const std::string n = to_dsl(normalize(machine));
      return finish(n, n, 0);
    }
    if (command == "forall") {
      const QuantRun r = forall_run(space, compile(machine), cfg.fuel, cfg.caps);
      nlohmann::json res;
      if (r.halted_at) res = {{"status", "halted"}, {"at_step", *r.halted_at}};
      else res = {{"status", "suspended"}, {"fuel", cfg.fuel}};
      return finish(detail::halt_text(r.halted_at, cfg.fuel), res, r.fuel_used);
    }
    if (command == "exists") {
      const QuantRun r = exists_run(space, compile(machine), cfg.fuel, cfg.caps);
      nlohmann::json res;
      if (r.halted_at) res = {{"status", "halted"}, {"at_step", *r.halted_at}};
      else res = {{"status", "suspended"}, {"fuel", cfg.fuel}};
      return finish(detail::halt_text(r.halted_at, cfg.fuel), res, r.fuel_used);
    }
    if (command == "search") {
      // Witness search: drive the existential dovetail far enough to be
      // definitive when the witness slot is computable, else use the budget.
      const FormalMachine n = normalize(machine);
      Fuel budget = cfg.fuel;
      bool definitive = false;
      std::optional<std::uint64_t> best_slot;
      bool any_positive = false;
      for (const auto& b : n.branches()) {
        if (!space.positive(b)) continue;
        any_positive = true;
        IndexSet f;
        bool indexed = true;
        for (const auto& g : b.generators()) {
          if (auto i = space.generator_index(g)) f.push_back(static_cast<std::uint32_t>(*i));
          else { indexed = false; break; }
        }
        if (!indexed) continue;
        if (auto slot = meet_slot(space, f))
          if (!best_slot || *slot < *best_slot) best_slot = *slot;
      }
      if (!any_positive) {
        definitive = true;  // no positive branch: the open is empty
        budget = 1;
      } else if (best_slot) {
        budget = std::max(budget, exists_fuel_bound(space, n.branches().size(), *best_slot,
                                                    cfg.caps));
        definitive = true;
      }
      const QuantRun r = exists_run(space, compile(n), budget, cfg.caps);
      if (r.halted_at && r.witness_meet) {
        const std::string w = to_dsl(detail::materialize(space, *r.witness_meet));
        return finish("witness: " + w, w, r.fuel_used);
      }
      const std::string plain =
          definitive ? "none" : "none (fuel-exhausted, " + std::to_string(budget) + ")";
      return finish(plain, nullptr, r.fuel_used);
    }

    out.exit_code = kExitSyntax;
    out.output = "error: unknown command '" + command + "'";
    return out;
  } catch (const ParseError& e) {
    out.exit_code = kExitSyntax;
    out.output = std::string("error: ") + e.what();
    return out;
  } catch (const IncompatibleSpaceError& e) {
    out.exit_code = kExitMismatch;
    out.output = std::string("error: ") + e.what();
    return out;
  } catch (const BudgetError& e) {
    out.exit_code = kExitBudget;
    out.output = std::string("error: ") + e.what();
    return out;
  } catch (const CapError& e) {
    out.exit_code = kExitBudget;
    out.output = std::string("error: ") + e.what();
    return out;
  } catch (const SizeBoundError& e) {
    out.exit_code = kExitBudget;
    out.output = std::string("error: ") + e.what();
    return out;
  }
}

}  // namespace mspace
