#include "bestofn/analysis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bestofn::analysis {

double RunMetrics::quality_diff() const {
  if (qualities.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(qualities.begin(), qualities.end());
  return *hi - *lo;
}

double RunMetrics::max_quality() const {
  if (qualities.empty()) return 0.0;
  return *std::max_element(qualities.begin(), qualities.end());
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty set");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile p must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double idx = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  if (lo == hi) return values[lo];
  const double frac = idx - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::map<GroupKey, GroupStats> aggregate_metrics(const std::vector<RunMetrics>& runs) {
  struct Bucket {
    std::vector<double> successes;
    std::vector<double> ticks;
    long total = 0;
  };
  std::map<GroupKey, Bucket> buckets;
  for (const auto& run : runs) {
    GroupKey key{static_cast<int>(std::floor(run.quality_diff() / 0.1)), run.site_distance};
    auto& bucket = buckets[key];
    bucket.total += 1;
    if (run.success) bucket.successes.push_back(*run.success);
    if (run.ticks_to_converge) bucket.ticks.push_back(static_cast<double>(*run.ticks_to_converge));
  }

  std::map<GroupKey, GroupStats> out;
  for (auto& [key, bucket] : buckets) {
    GroupStats stats;
    stats.total = bucket.total;
    stats.converged = static_cast<long>(bucket.successes.size());
    if (!bucket.successes.empty()) {
      double sum = 0.0;
      for (double v : bucket.successes) sum += v;
      stats.mean_success = sum / static_cast<double>(bucket.successes.size());
      stats.success_p25 = percentile(bucket.successes, 0.25);
      stats.success_p75 = percentile(bucket.successes, 0.75);
    }
    if (!bucket.ticks.empty()) {
      double sum = 0.0;
      for (double v : bucket.ticks) sum += v;
      stats.mean_ticks = sum / static_cast<double>(bucket.ticks.size());
      stats.ticks_p25 = percentile(bucket.ticks, 0.25);
      stats.ticks_p75 = percentile(bucket.ticks, 0.75);
    }
    out[key] = stats;
  }
  return out;
}

}  // namespace bestofn::analysis
