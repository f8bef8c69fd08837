#include "strategist/stats.h"

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <numeric>

namespace strategist {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::optional<double> sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nullopt;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::optional<double> standard_error(const std::vector<double>& xs) {
  auto sd = sample_sd(xs);
  if (!sd) return std::nullopt;
  return *sd / std::sqrt(static_cast<double>(xs.size()));
}

json AnovaResult::to_json() const {
  json j{{"df_between", df_between}, {"df_within", df_within}, {"p", p}, {"f_infinite", f_infinite}};
  j["F"] = f_infinite ? json("inf") : json(f);
  return j;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw StrategistError("anova needs at least two groups");
  std::size_t total_n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw StrategistError("anova needs at least two samples per group");
    total_n += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(total_n);
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) ssw += (x - m) * (x - m);
  }
  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(total_n - groups.size());
  const double msb = ssb / r.df_between;
  const double msw = ssw / r.df_within;
  // Rounding noise in sums of squares is treated as zero.
  const double scale = std::max(1.0, grand * grand * static_cast<double>(total_n));
  const bool ssb_zero = ssb <= 1e-15 * scale;
  const bool ssw_zero = ssw <= 1e-15 * scale;
  if (ssw_zero) {
    if (ssb_zero) {
      r.f = 0.0;
      r.p = 1.0;
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.f_infinite = true;
      r.p = 0.0;
    }
    return r;
  }
  r.f = ssb_zero ? 0.0 : msb / msw;
  boost::math::fisher_f_distribution<double> dist(r.df_between, r.df_within);
  r.p = boost::math::cdf(boost::math::complement(dist, r.f));
  return r;
}

}  // namespace strategist
