// Command-line front end: parse a machine expression, pick a space, run one
// of covers / forall / exists / normalize / search.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mspace/cli.hpp"

namespace {

std::string read_expression(const std::string& arg) {
  if (arg != "-") return arg;
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"machines over presented spaces"};
  app.require_subcommand(1);

  std::string space_name = "cantor-digits";
  std::string expr;
  mspace::RunConfig cfg;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--space", space_name, "cantor-digits | cantor-prefix | interval")
        ->capture_default_str();
    cmd->add_option("--fuel", cfg.fuel, "fuel budget for semi-decisions")
        ->capture_default_str();
    cmd->add_option("--max-family-size", cfg.caps.max_family_size,
                    "skip cover families larger than this")
        ->capture_default_str();
    cmd->add_option("--max-generator-index", cfg.caps.max_generator_index,
                    "skip families mentioning generators beyond this index")
        ->capture_default_str();
    cmd->add_flag("--json", cfg.json, "emit one JSON object instead of plain text");
    cmd->add_option("expr", expr, "machine expression ('-' reads stdin)")->required();
  };

  for (const char* name : {"covers", "forall", "exists", "normalize", "search"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  const auto kind = mspace::space_from_name(space_name);
  if (!kind) {
    std::cerr << "error: unknown space '" << space_name << "'\n";
    return mspace::kExitMismatch;
  }
  cfg.space = *kind;
  if (cfg.fuel < 1) {
    std::cerr << "error: fuel must be at least 1\n";
    return mspace::kExitBudget;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto outcome = mspace::run_command(command, cfg, read_expression(expr));
  if (outcome.exit_code == mspace::kExitOk) std::cout << outcome.output << "\n";
  else std::cerr << outcome.output << "\n";
  return outcome.exit_code;
}
