#pragma once

// The strategist command line: improve, baseline, tournament, rl-train,
// eval-guide, play, serve and anova.

#include <iosfwd>
#include <string>
#include <vector>

#include "strategist/game.h"
#include "strategist/heuristics.h"

namespace strategist::app {

// Returns the process exit status: 0 success, 1 pipeline failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// "builtin:<name>", a JSON heuristic spec file, a file holding a JSON string
// "builtin:<name>", or a program file.
HeuristicSpec load_strategy_arg(const std::string& arg, GameKind game);

// Run manifest: command, full configuration, template digests and seed.
json run_manifest(const std::string& command, const json& config, std::uint64_t seed);

}  // namespace strategist::app
