#pragma once

#include "strategist/heuristics.h"

namespace strategist::detail {

void register_builtin_heuristics(BuiltinRegistry& registry);
void register_rl_heuristics(BuiltinRegistry& registry);

// Integral values become JSON integers so they render without a trailing ".0".
ordered_json number(double x);

}  // namespace strategist::detail
