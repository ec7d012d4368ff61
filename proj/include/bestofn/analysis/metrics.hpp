#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bestofn::analysis {

/// One simulation's outcome row.
struct RunMetrics {
  std::string sim_id;
  double site_distance = 0.0;
  std::vector<double> qualities;
  std::optional<int> chosen_site;           // absent when timed out
  std::optional<double> success;            // present iff converged
  std::optional<long> ticks_to_converge;    // present iff converged
  long runtime_ticks = 0;

  double quality_diff() const;
  double max_quality() const;
};

/// Linear interpolation between order statistics (index p*(n-1)).
double percentile(std::vector<double> values, double p);

struct GroupKey {
  int quality_diff_bin = 0;  // floor(diff / 0.1)
  double distance = 0.0;

  bool operator<(const GroupKey& o) const {
    if (quality_diff_bin != o.quality_diff_bin) return quality_diff_bin < o.quality_diff_bin;
    return distance < o.distance;
  }
};

struct GroupStats {
  long converged = 0;
  long total = 0;
  double mean_success = 0.0, success_p25 = 0.0, success_p75 = 0.0;
  double mean_ticks = 0.0, ticks_p25 = 0.0, ticks_p75 = 0.0;
};

/// Means and interquartile bounds per (quality-difference bin, distance)
/// group, bin width 0.1. Timed-out runs count toward `total` only; they
/// contribute to neither the success nor the time statistics.
std::map<GroupKey, GroupStats> aggregate_metrics(const std::vector<RunMetrics>& runs);

}  // namespace bestofn::analysis
