#pragma once

// Summary statistics and one-way analysis of variance.

#include <optional>
#include <vector>

#include "strategist/game.h"

namespace strategist {

double mean(const std::vector<double>& xs);
// Sample standard deviation (n - 1 denominator); nullopt below two samples.
std::optional<double> sample_sd(const std::vector<double>& xs);
std::optional<double> standard_error(const std::vector<double>& xs);

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  int df_between = 0;
  int df_within = 0;
  // Zero within-group variance with nonzero between-group variance.
  bool f_infinite = false;

  json to_json() const;
};

// F = MSB / MSW with p from the F distribution. Throws StrategistError unless
// there are at least two groups of at least two samples each.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

}  // namespace strategist
