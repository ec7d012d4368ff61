#pragma once

#include <array>
#include <vector>

namespace bestofn::analysis {

/// Mean fraction of same-label points among each point's k nearest
/// neighbors (Euclidean, ties broken by index). Points with label < 0 are
/// excluded from both the query set and the neighbor pool.
double knn_label_agreement(const std::vector<std::array<double, 3>>& points,
                           const std::vector<int>& labels, int k);

/// Share of the most common non-negative label.
double majority_class_share(const std::vector<int>& labels);

}  // namespace bestofn::analysis
